import numpy as np
import pytest

from minentlab.entropy import (
    as_joint_table, binary_entropy, classical_hmin_success, conditional_shannon,
    conditional_von_neumann, diagonal_embedding, shannon, spectrum, von_neumann,
)
from minentlab.errors import InvalidInput
from minentlab.quantum_core import DensityOperator, maximally_entangled

# frozen oracle values (independent closed forms)
H2_QUARTER = 0.8112781244591328   # h2(0.25)
LOG2_3 = 1.584962500721156


def test_binary_entropy_values():
    assert binary_entropy(0.25) == pytest.approx(H2_QUARTER, abs=1e-15)
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(0.5) == 1.0
    with pytest.raises(InvalidInput):
        binary_entropy(1.2)


def test_shannon_uniform():
    assert shannon(np.full(3, 1 / 3)) == pytest.approx(LOG2_3, abs=1e-14)


def test_conditional_shannon_bsc():
    t = np.array([[0.375, 0.125], [0.125, 0.375]])
    assert conditional_shannon(t) == pytest.approx(H2_QUARTER, abs=1e-14)
    assert classical_hmin_success(t)[0] == pytest.approx(0.75, abs=1e-15)


def test_conditional_shannon_independent_and_correlated():
    assert conditional_shannon(np.full((4, 4), 1 / 16)) == pytest.approx(2.0, abs=1e-14)
    assert conditional_shannon(np.eye(3) / 3) == 0.0


def test_joint_table_validation():
    with pytest.raises(InvalidInput):
        as_joint_table([[0.5, 0.6]])
    with pytest.raises(InvalidInput):
        as_joint_table([[-0.1, 1.1]])
    with pytest.raises(InvalidInput):
        classical_hmin_success(np.zeros((2, 2)))


def test_quantum_entropies_bell():
    phi = maximally_entangled(2)
    assert von_neumann(phi) == pytest.approx(0.0, abs=1e-12)
    assert conditional_von_neumann(phi) == pytest.approx(-1.0, abs=1e-12)


def test_spectrum_rejects_negative():
    m = np.diag([1.0 + 1e-6, -1e-6]).astype(complex)
    with pytest.raises(InvalidInput):
        spectrum(m)
    w = spectrum(np.diag([1.0 + 1e-11, -1e-11]).astype(complex))
    assert w.min() == 0.0


def test_diagonal_embedding_entropy_matches():
    t = np.array([[0.1, 0.2, 0.1], [0.3, 0.1, 0.2]])
    rho = diagonal_embedding(t)
    assert rho.dims == (2, 3)
    assert conditional_von_neumann(rho) == pytest.approx(conditional_shannon(t), abs=1e-12)


def test_depolarized_bell_joint_entropy():
    # eigenvalues 1 - 3/8 and 1/8 (three times) at lambda = 0.5
    w = np.array([0.625, 0.125, 0.125, 0.125])
    rho = DensityOperator(np.diag(w).astype(complex), (2, 2))
    assert von_neumann(rho) == pytest.approx(1.5487949406953985, abs=1e-12)
