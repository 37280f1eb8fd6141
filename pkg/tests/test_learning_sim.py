import numpy as np
import pytest

from minentlab.discretize import Discretization, covering_partition, from_centers, uniform_grid
from minentlab.entropy import classical_hmin_success, conditional_shannon, random_joint_table
from minentlab.errors import InvalidInput
from minentlab.learning_sim import (
    LearningTask, best_cell_success, exact_learning_scenario, exhaustive_decoder_success,
    induced_joint, make_loss, make_score, map_decoder_success, minimax_risk_exhaustive,
    minimax_risk_lp, monte_carlo_risk,
)
from minentlab.minent_sdp import max_singlet_fraction
from minentlab.quantum_core import DensityOperator, apply_channel, dephase


def grid_task(lik, prior=None, loss="zero-one", eps=0.125, **kw):
    lik = np.asarray(lik, float)
    sp = uniform_grid([[0, 1]], [len(lik)], midpoints=True)
    model = covering_partition(Discretization(sp, np.arange(len(lik)), eps, "both"))
    return LearningTask(model, lik, prior, loss=loss, epsilon=eps, **kw)


def test_task_validation():
    with pytest.raises(InvalidInput):
        grid_task([[0.5, 0.6], [0.5, 0.5]])
    with pytest.raises(InvalidInput):
        grid_task(np.full((2, 2), 0.5), prior=[0.2, 0.2])
    with pytest.raises(InvalidInput):
        grid_task(np.full((2, 2), 0.5), loss="hinge")
    with pytest.raises(InvalidInput):
        grid_task(np.full((2, 2), 0.5), score="c-minus-t")
    assert grid_task(np.full((2, 2), 0.5), score="c-minus-t", score_c=2.0).score_fn(0.5) == 1.5


def test_loss_and_score_shapes():
    assert make_loss("zero-one", 0.1)(np.array([0.05, 0.1, 0.2])).tolist() == [0.0, 1.0, 1.0]
    assert make_score("indicator", 0.1)(np.array([0.05, 0.1, 0.2])).tolist() == [1.0, 1.0, 0.0]
    assert make_loss("squared", 0.1)(0.5) == 0.25


def test_induced_joint_examples():
    noiseless = grid_task(np.eye(3), eps=1 / 6)
    t = induced_joint(noiseless, noiseless.model)
    assert conditional_shannon(t) == 0.0
    indep = grid_task(np.full((4, 3), 1 / 3))
    assert conditional_shannon(induced_joint(indep, indep.model)) == pytest.approx(2.0)
    bsc = grid_task([[0.75, 0.25], [0.25, 0.75]], eps=0.25)
    np.testing.assert_allclose(induced_joint(bsc, bsc.model), [[0.375, 0.125], [0.125, 0.375]])


def test_induced_joint_rejects_foreign_space():
    task = grid_task(np.full((2, 2), 0.5))
    other = from_centers(uniform_grid([[0, 1]], 3), [[0.0]], 1.0)
    with pytest.raises(InvalidInput):
        induced_joint(task, other)


def test_map_decoder_examples():
    s, dec = map_decoder_success(np.eye(3) / 3)
    assert s == 1.0 and dec.tolist() == [0, 1, 2]
    s, _ = map_decoder_success(np.outer([0.2, 0.5, 0.3], [0.5, 0.5]))
    assert s == pytest.approx(0.5)
    s, dec = map_decoder_success([[0.375, 0.125], [0.125, 0.375]])
    assert s == 0.75 and dec.tolist() == [0, 1]


def test_map_matches_exhaustive(rng):
    for _ in range(30):
        t = random_joint_table(int(rng.integers(1, 5)), int(rng.integers(1, 5)), rng, 0.3)
        assert map_decoder_success(t)[0] == pytest.approx(exhaustive_decoder_success(t), abs=1e-12)
        assert map_decoder_success(t)[0] == classical_hmin_success(t)[0]


def test_best_cell_at_least_average(rng):
    # with a uniform prior the MAP success is the average of the per-cell hit rates
    for _ in range(30):
        lik = rng.dirichlet(np.ones(4), size=3)
        t = lik / 3
        assert best_cell_success(t) >= map_decoder_success(t)[0] - 1e-12


def test_minimax_independence():
    task = grid_task(np.full((4, 3), 1 / 3))
    assert minimax_risk_exhaustive(task) == pytest.approx(1.0)
    assert minimax_risk_lp(task) == pytest.approx(0.75, abs=1e-9)


def test_minimax_lp_below_deterministic(rng):
    for _ in range(5):
        lik = rng.dirichlet(np.ones(3), size=3)
        task = grid_task(lik, eps=1 / 6)
        assert minimax_risk_lp(task) <= minimax_risk_exhaustive(task) + 1e-9


def test_monte_carlo_examples():
    noiseless = grid_task(np.eye(4))
    res = monte_carlo_risk(noiseless, "map-center", 500, seed=1)
    assert res.expected_loss == 0.0 and res.success == 1.0
    indep = grid_task(np.full((4, 3), 1 / 3))
    res = monte_carlo_risk(indep, "map-center", 4000, seed=2)
    assert res.expected_loss + res.half_width >= 0.5
    assert monte_carlo_risk(indep, "map-center", 100, seed=3) == monte_carlo_risk(indep, "map-center", 100, seed=3)
    fixed = monte_carlo_risk(indep, "map-center", 100, seed=3, target=0)
    assert fixed.success == 1.0  # the MAP estimator always answers the first cell
    with pytest.raises(InvalidInput):
        monte_carlo_risk(indep, "nearest", 10, 0)
    with pytest.raises(InvalidInput):
        monte_carlo_risk(indep, "map-center", 0, 0)


def test_exact_learning_examples():
    one = exact_learning_scenario(2, [5], 1)
    assert map_decoder_success(one.table)[0] == pytest.approx(1.0)
    opposite = exact_learning_scenario(2, [0b0000, 0b1111], 1)
    assert map_decoder_success(opposite.table)[0] == pytest.approx(1.0)
    close = exact_learning_scenario(2, [0b0000, 0b0001], 1)
    assert map_decoder_success(close.table)[0] == pytest.approx(0.625, abs=1e-15)
    for k in close.kets:
        assert np.linalg.norm(k) == pytest.approx(1.0)


def test_exact_learning_more_queries():
    inst = exact_learning_scenario(2, [0b0000, 0b0001], 2)
    # the concepts are told apart unless both queries avoid input 0
    assert map_decoder_success(inst.table)[0] == pytest.approx(1 - 0.5 * (3 / 4) ** 2)
    assert len(inst.outcome_labels) == inst.table.shape[1]


def test_exact_learning_dephased_states():
    inst = exact_learning_scenario(2, [1, 2, 7], 1)
    np.testing.assert_allclose(inst.dephased_table(), inst.table, atol=1e-15)
    cq = inst.cq_state()
    deph = apply_channel(dephase(cq.dims[1]), cq, 1)
    deph = DensityOperator(deph.matrix, deph.dims)
    assert max_singlet_fraction(deph) == pytest.approx(map_decoder_success(inst.table)[0], abs=1e-6)
    assert inst.coherent_state().is_pure()


def test_exact_learning_limits():
    with pytest.raises(InvalidInput):
        exact_learning_scenario(4, [0], 1)
    with pytest.raises(InvalidInput):
        exact_learning_scenario(2, [0], 5)
    with pytest.raises(InvalidInput):
        exact_learning_scenario(2, [16], 1)
    with pytest.raises(InvalidInput):
        exact_learning_scenario(2, [[0, 1, 0]], 1)
