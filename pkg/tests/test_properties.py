"""Hypothesis property tests for the invariants that hold on every instance."""
import numpy as np
from hypothesis import given, strategies as st

from minentlab.bounds import fano_check, guarantee_check, hmin_le_h_check, quantum_fano_check
from minentlab.discretize import (
    MetricSpace, covering_partition, greedy_packing_net, nearest_index, validate_discretization,
)
from minentlab.entfrac import singlet_overlap_qk
from minentlab.entropy import classical_hmin_success, conditional_shannon, random_joint_table
from minentlab.learning_sim import exhaustive_decoder_success, map_decoder_success
from minentlab.minent_sdp import pure_state_hmin_oracle, solve_hmin
from minentlab.quantum_core import (
    choi_matrix, channel_from_choi, random_channel, random_density, random_pure,
)

seeds = st.integers(0, 2 ** 32 - 1)


@given(seeds, st.integers(1, 5), st.integers(1, 5))
def test_table_bounds(seed, n_a, n_b):
    rng = np.random.default_rng(seed)
    t = random_joint_table(n_a, n_b, rng, sparsity=0.3)
    success, dec = map_decoder_success(t)
    assert success == classical_hmin_success(t)[0]
    assert fano_check(t, success).passed
    assert guarantee_check(t).passed
    assert hmin_le_h_check(t).passed
    if n_a ** n_b <= 4096:
        assert abs(exhaustive_decoder_success(t) - success) <= 1e-12


@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_quantum_fano(seed, d_r, d_b):
    rng = np.random.default_rng(seed)
    rank = int(rng.integers(1, d_r * d_b + 1))
    assert quantum_fano_check(random_pure((d_r, d_b), rng), random_density((d_r, d_b), rng, rank)).passed


@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_choi_round_trip(seed, d_in, d_out):
    rng = np.random.default_rng(seed)
    ch = random_channel(d_in, d_out, rng)
    np.testing.assert_allclose(choi_matrix(channel_from_choi(choi_matrix(ch), d_in, d_out)), choi_matrix(ch),
                               atol=1e-9)


@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_sdp_bounds(seed, d_r, d_b):
    rng = np.random.default_rng(seed)
    rho = random_density((d_r, d_b), rng)
    sol = solve_hmin(rho)
    assert sol.optimal and sol.gap <= 1e-7
    # 2^(-Hmin) lies in [1/d_R, d_R] and Hmin <= H(R|B)
    assert 1 / d_r - 1e-7 <= sol.primal_value <= d_r + 1e-7


@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_sdp_pure_oracle(seed, d_r, d_b):
    psi = random_pure((d_r, d_b), np.random.default_rng(seed))
    assert abs(solve_hmin(psi).primal_value - pure_state_hmin_oracle(psi)) <= 1e-6


@given(seeds, st.integers(1, 2), st.floats(0.05, 0.6))
def test_greedy_is_packing_and_net(seed, dim, eps):
    rng = np.random.default_rng(seed)
    pts = rng.random((int(rng.integers(1, 200)), dim))
    sp = MetricSpace(pts, metric=str(rng.choice(["euclidean", "absolute-difference"])), bounds=[[0, 1]] * dim)
    disc = covering_partition(greedy_packing_net(sp, eps))
    assert validate_discretization(disc) == []


@given(seeds, st.floats(0.05, 0.4))
def test_packing_probe_decodes(seed, eps):
    # on a 2 eps packing, a probe strictly within eps of a center maps to that center
    rng = np.random.default_rng(seed)
    sp = MetricSpace(rng.random((150, 1)), bounds=[[0, 1]])
    disc = greedy_packing_net(sp, 2 * eps)
    v = int(rng.integers(disc.size))
    probe = np.clip(disc.centers[v] + rng.uniform(-eps, eps) * 0.999, 0, 1)
    if abs(probe - disc.centers[v])[0] < eps:
        assert nearest_index(disc, probe) == v


@given(seeds)
def test_qk_partial_sums(seed):
    psi = random_pure((3, 3), np.random.default_rng(seed))
    vals = [k * singlet_overlap_qk(psi, k) for k in (1, 2, 3)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    assert abs(vals[-1] - pure_state_hmin_oracle(psi)) <= 1e-9


@given(seeds)
def test_conditional_shannon_below_log_alphabet(seed):
    t = random_joint_table(4, 3, np.random.default_rng(seed))
    assert 0 <= conditional_shannon(t) <= 2 + 1e-12
