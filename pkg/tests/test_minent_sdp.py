import numpy as np
import pytest

from minentlab.entropy import classical_hmin_success, diagonal_embedding, random_joint_table
from minentlab.errors import InvalidInput
from minentlab.minent_sdp import (
    bell_state, channel_from_dual, max_singlet_fraction, pure_state_hmin_oracle, solve_hmin,
)
from minentlab.quantum_core import (
    DensityOperator, apply_channel, depolarizing, random_density, random_pure, singlet_fraction,
)


def test_bell_value():
    sol = solve_hmin(bell_state())
    assert sol.optimal
    assert sol.primal_value == pytest.approx(2.0, abs=1e-7)
    assert sol.hmin == pytest.approx(-1.0, abs=1e-7)
    assert sol.gap <= 1e-8


def test_maximally_mixed_value():
    rho = DensityOperator(np.eye(4, dtype=complex) / 4, (2, 2))
    assert max_singlet_fraction(rho) == pytest.approx(0.5, abs=1e-7)


def test_depolarized_bell_closed_form():
    # optimal decoder is the identity: q = 2 * (1 - 3 lam / 4)
    rho = apply_channel(depolarizing(2, 0.5), bell_state(), 1)
    assert max_singlet_fraction(rho) == pytest.approx(1.25, abs=1e-7)


def test_pure_states_match_schmidt_oracle(rng):
    for _ in range(20):
        dims = tuple(int(x) for x in rng.integers(1, 5, size=2))
        psi = random_pure(dims, rng)
        assert solve_hmin(psi).primal_value == pytest.approx(pure_state_hmin_oracle(psi), abs=1e-7)


def test_classical_embeddings_match_column_maxima(rng):
    for _ in range(20):
        t = random_joint_table(int(rng.integers(1, 5)), int(rng.integers(1, 5)), rng, sparsity=0.2)
        sol = solve_hmin(diagonal_embedding(t))
        assert sol.primal_value == pytest.approx(classical_hmin_success(t)[0], abs=1e-7)


def test_asymmetric_dims_and_certificates(rng):
    rho = random_density((3, 2), rng)
    sol = solve_hmin(rho)
    assert sol.optimal
    assert sol.primal_residual <= 1e-10
    assert sol.dual_residual <= 1e-9
    assert sol.dual_value <= sol.primal_value + 1e-10


def test_decoder_recovered_from_dual(rng):
    rho = random_density((2, 3), rng)
    sol = solve_hmin(rho)
    dec = channel_from_dual(sol, rho=rho)
    assert singlet_fraction(rho, dec) == pytest.approx(sol.primal_value, abs=1e-7)


def test_infeasible_inputs():
    bad = np.diag([1.0, 0.5, -0.5, 0.0]).astype(complex)
    sol = solve_hmin(bad, (2, 2))
    assert sol.status == "infeasible_input"
    nonherm = np.eye(4, dtype=complex) / 4
    nonherm[0, 1] = 0.1
    assert solve_hmin(nonherm, (2, 2)).status == "infeasible_input"
    with pytest.raises(InvalidInput):
        channel_from_dual(sol)


def test_limits():
    with pytest.raises(InvalidInput):
        solve_hmin(np.eye(81) / 81, (9, 9))
    with pytest.raises(InvalidInput):
        solve_hmin(bell_state(), tol=1e-12)
    with pytest.raises(InvalidInput):
        solve_hmin(np.eye(4) / 4)


def test_oracle_requires_pure():
    with pytest.raises(InvalidInput):
        pure_state_hmin_oracle(DensityOperator(np.eye(4, dtype=complex) / 4, (2, 2)))
