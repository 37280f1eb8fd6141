import numpy as np
import pytest

from minentlab.discretize import Discretization, uniform_grid
from minentlab.entfrac import (
    Grid, build_projector, channel_family, embed_channel, grid_identity_deviation, grid_phi_eps,
    partition_singlet, singlet_overlap_qk, verify_thm1, verify_thm2,
)
from minentlab.entropy import von_neumann
from minentlab.errors import InvalidInput
from minentlab.quantum_core import (
    DensityOperator, depolarizing, identity_channel, partial_trace, random_channel, random_density,
    random_pure,
)

LOG2_3 = 1.584962500721156


def cells(k, kind="both"):
    sp = uniform_grid([[0, 1]], [k], midpoints=True)
    return Discretization(sp, np.arange(k), 1.0 / k, kind)


def test_partition_singlet_examples():
    phi = partition_singlet(cells(2))
    np.testing.assert_allclose(phi.matrix[[0, 3]][:, [0, 3]], np.full((2, 2), 0.5), atol=1e-15)
    assert partition_singlet(cells(1)).dim == 1
    v3 = partition_singlet(cells(3), "packing")
    assert von_neumann(partial_trace(v3, [0])) == pytest.approx(LOG2_3, abs=1e-12)


def test_partition_singlet_mode_checks():
    with pytest.raises(InvalidInput):
        partition_singlet(cells(2, "packing"), "partition")
    with pytest.raises(InvalidInput):
        partition_singlet(cells(2, "net"), "packing")
    with pytest.raises(InvalidInput):
        partition_singlet(cells(2), "ball")


def test_phi_eps_support_and_norm():
    g = Grid(0, 1, 10)
    st = grid_phi_eps(g, 2.0)
    assert np.all(st.amplitudes == g.h)
    assert st.norm == pytest.approx(1.0)  # m^2 entries of size 1/m
    sp = uniform_grid([[0, 1]], [1], midpoints=True)
    proj = build_projector(g, Discretization(sp, [0], 1.0, "both"), "W2")
    np.testing.assert_allclose(proj.apply(st.amplitudes), st.amplitudes, atol=1e-12)


def test_projector_idempotent(rng):
    g = Grid(0, 1, 12)
    for kind in ("W2", "V2"):
        proj = build_projector(g, Discretization(uniform_grid([[0, 1]], [3], midpoints=True), [0, 1, 2],
                                                 1 / 6, "both"), kind)
        m = proj.matrix
        assert m.shape == (144, 144)
        np.testing.assert_allclose(m @ m, m, atol=1e-9)
        np.testing.assert_allclose(m, m.conj().T, atol=1e-12)
        v = rng.normal(size=144)
        np.testing.assert_allclose(m @ (m @ v), m @ v, atol=1e-9)


def test_projector_rejects_coarse_grid():
    with pytest.raises(InvalidInput):
        build_projector(Grid(0, 1, 2), cells(4), "W2")


def test_grid_identity_exact_when_eps_covers_cells():
    # once eps reaches the cell diameter the band fills every same-cell block
    sp = uniform_grid([[0, 1]], [2], midpoints=True)
    for kind in ("W2", "V2"):
        d = Discretization(sp, [0, 1], 0.5, "both")
        for m in (200, 400):
            assert grid_identity_deviation(Grid(0, 1, m), d, 0.5, kind) <= 2 / m


def test_grid_identity_band_narrower_than_cells():
    # for eps below the cell diameter the projected band misses the block corners:
    # the overlap with the singlet tends to sqrt(3/4) at eps = 0.25
    sp = uniform_grid([[0, 1]], [2], midpoints=True)
    w = Discretization(sp, [0, 1], 0.25, "both")
    limit = np.sqrt(2 - 2 * np.sqrt(0.75))
    for m in (200, 400, 800):
        assert abs(grid_identity_deviation(Grid(0, 1, m), w, 0.25, "W2") - limit) <= 2 / m


def test_embed_channel_examples(rng):
    basis = np.eye(4)[:, :2]
    emb = embed_channel(identity_channel(2), 4, basis)
    x = random_density((2,), rng).matrix
    np.testing.assert_allclose(emb(basis @ x @ basis.T), basis @ x @ basis.T, atol=1e-12)

    q, _ = np.linalg.qr(rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2)))
    emb = embed_channel(depolarizing(2, 1.0), 3, q)
    out = emb(q @ x @ q.conj().T)
    np.testing.assert_allclose(out, q @ q.conj().T / 2, atol=1e-12)

    a, b = random_channel(2, 2, rng), random_channel(2, 2, rng)
    y = q @ x @ q.conj().T
    np.testing.assert_allclose(embed_channel(a.compose(b), 3, q)(y),
                               embed_channel(a, 3, q)(embed_channel(b, 3, q)(y)), atol=1e-9)
    with pytest.raises(InvalidInput):
        embed_channel(identity_channel(2), 3, np.ones((3, 2)))


def test_thm1_examples():
    r = verify_thm1(cells(2), identity_channel(2))
    assert r.lhs == pytest.approx(1.0, abs=1e-6) and r.rhs == pytest.approx(1.0, abs=1e-9)
    r = verify_thm1(cells(2), depolarizing(2, 1.0))
    assert r.lhs == pytest.approx(-1.0, abs=1e-6) and r.rhs == pytest.approx(-1.0, abs=1e-9)
    r = verify_thm1(cells(2), depolarizing(2, 0.5))
    assert r.slack > 0.5


def test_thm2_examples():
    r = verify_thm2(cells(2), identity_channel(2))
    assert r.lhs == pytest.approx(0.0, abs=1e-6) and r.rhs == pytest.approx(-1 / LOG2_3) and r.passed
    r = verify_thm2(cells(2), depolarizing(2, 1.0))
    assert r.lhs == pytest.approx(0.75, abs=1e-6) and r.rhs == pytest.approx(1 / LOG2_3, abs=1e-12)
    assert verify_thm2(cells(2), depolarizing(2, 0.5)).passed
    with pytest.raises(InvalidInput):
        verify_thm2(cells(1), identity_channel(1))
    with pytest.raises(InvalidInput):
        verify_thm1(cells(2), identity_channel(3))


def test_channel_family_size(rng):
    assert len(list(channel_family(3, rng, 4))) == 11


def test_qk_examples():
    bell = partition_singlet(cells(2))
    assert singlet_overlap_qk(bell, 2) == pytest.approx(1.0)
    prod = DensityOperator.from_ket(np.kron([1, 0], [1, 0]), (2, 2))
    assert singlet_overlap_qk(prod, 2) == pytest.approx(0.5)
    ghz = partition_singlet(cells(3))
    assert singlet_overlap_qk(ghz, 2) == pytest.approx(2 / 3)
    with pytest.raises(InvalidInput):
        singlet_overlap_qk(DensityOperator(np.eye(4, dtype=complex) / 4, (2, 2)), 2)
    with pytest.raises(InvalidInput):
        singlet_overlap_qk(bell, 3)


def test_qk_partial_sums_grow(rng):
    psi = random_pure((3, 4), rng)
    vals = [k * singlet_overlap_qk(psi, k) for k in (1, 2, 3)]
    assert vals == sorted(vals)
