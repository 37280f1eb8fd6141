"""Finite learning tasks with cell-constant observation models.

A task assigns every candidate parameter the observation law of its model
cell, so joint tables, MAP decoders and minimax risks are exact finite
computations.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import linprog

from .discretize import Discretization, covering_partition, pairwise
from .entropy import as_joint_table
from .errors import InvalidInput
from .quantum_core import DensityOperator

EXHAUSTIVE_LIMIT = 4096


# ---- losses and scores ----------------------------------------------------

def make_loss(name: str, epsilon: float) -> Callable[[np.ndarray], np.ndarray]:
    if name == "squared":
        return lambda t: np.asarray(t, dtype=float) ** 2
    if name == "absolute":
        return lambda t: np.asarray(t, dtype=float)
    if name == "zero-one":
        return lambda t: (np.asarray(t, dtype=float) >= epsilon - 1e-12).astype(float)
    raise InvalidInput(f"unknown loss {name!r}")


def make_score(name: str, epsilon: float, c: float | None = None) -> Callable[[np.ndarray], np.ndarray]:
    if name == "indicator":
        return lambda t: (np.asarray(t, dtype=float) <= epsilon + 1e-12).astype(float)
    if name == "c-minus-t":
        if c is None:
            raise InvalidInput("c-minus-t score needs a constant c")
        return lambda t: c - np.asarray(t, dtype=float)
    raise InvalidInput(f"unknown score {name!r}")


def _monotone(f, probe: np.ndarray, increasing: bool) -> bool:
    v = f(probe)
    dv = np.diff(v)
    return bool(np.all(dv >= -1e-12) if increasing else np.all(dv <= 1e-12))


# ---- tasks ----------------------------------------------------------------

@dataclass
class LearningTask:
    """Observation model ``likelihood[w, b] = p(b | cell w)`` over ``model`` cells."""

    model: Discretization
    likelihood: np.ndarray
    prior: np.ndarray | None = None
    loss: str = "zero-one"
    score: str = "indicator"
    epsilon: float = 0.0
    score_c: float | None = None
    loss_fn: Callable = field(init=False, repr=False)
    score_fn: Callable = field(init=False, repr=False)

    def __post_init__(self):
        if self.model.cells is None:
            self.model = covering_partition(self.model)
        lik = np.asarray(self.likelihood, dtype=float)
        if lik.ndim != 2 or lik.shape[0] != self.model.size:
            raise InvalidInput("likelihood needs one row per model cell")
        if np.any(lik < 0) or np.max(np.abs(lik.sum(axis=1) - 1)) > 1e-12:
            raise InvalidInput("likelihood rows must be probability vectors")
        self.likelihood = lik
        prior = np.full(self.model.size, 1 / self.model.size) if self.prior is None else np.asarray(self.prior, float)
        if prior.shape != (self.model.size,) or np.any(prior < 0) or abs(prior.sum() - 1) > 1e-12:
            raise InvalidInput("prior must be a probability vector over cells")
        self.prior = prior
        self.loss_fn = make_loss(self.loss, self.epsilon)
        self.score_fn = make_score(self.score, self.epsilon, self.score_c)
        probe = np.linspace(0, max(self.space.diameter(), self.epsilon) * 1.5 + 1e-9, 257)
        if not _monotone(self.loss_fn, probe, True):
            raise InvalidInput("loss must be non-decreasing")
        if not _monotone(self.score_fn, probe, False):
            raise InvalidInput("score must be non-increasing")

    @property
    def space(self):
        return self.model.space

    @property
    def n_obs(self) -> int:
        return self.likelihood.shape[1]

    def point_likelihood(self) -> np.ndarray:
        """``p(b | alpha)`` for every candidate ``alpha`` (rows)."""
        return self.likelihood[self.model.cells]


def induced_joint(task: LearningTask, disc: Discretization, prior=None) -> np.ndarray:
    """Joint table of (center index, observation); uniform over centers by default."""
    if disc.space is not task.space and not (
            disc.space.points.shape == task.space.points.shape
            and np.array_equal(disc.space.points, task.space.points)):
        raise InvalidInput("discretization and task live on different candidate sets")
    rows = task.point_likelihood()[disc.center_indices]
    prior = np.full(disc.size, 1 / disc.size) if prior is None else np.asarray(prior, float)
    if prior.shape != (disc.size,):
        raise InvalidInput("prior must have one entry per center")
    return prior[:, None] * rows


def map_decoder_success(t) -> tuple[float, np.ndarray]:
    """MAP decoder ``b -> argmax_a p(a, b)`` (lowest index on ties) and its success."""
    p = as_joint_table(t)
    dec = p.argmax(axis=0)
    return float(p[dec, np.arange(p.shape[1])].sum()), dec


def exhaustive_decoder_success(t, limit: int = EXHAUSTIVE_LIMIT) -> float:
    """Best success over every deterministic decoder; refuses more than ``limit`` decoders."""
    p = as_joint_table(t)
    n_a, n_b = p.shape
    if n_a ** n_b > limit:
        raise InvalidInput("too many decoders to enumerate")
    # row k of ``decs`` is the k-th decoder written in base n_a
    decs = np.indices((n_a,) * n_b).reshape(n_b, -1).T
    return float(p[decs, np.arange(n_b)].sum(axis=1).max())


def best_cell_success(t, decoder=None) -> float:
    """``max_w Pr(decoder(B) = w | W = w)`` for a joint table with nonzero rows."""
    p = as_joint_table(t)
    if decoder is None:
        _, decoder = map_decoder_success(p)
    rows = p.sum(axis=1)
    hit = np.array([p[w, decoder == w].sum() for w in range(p.shape[0])])
    return float(np.max(hit[rows > 0] / rows[rows > 0]))


def loss_matrix(task: LearningTask, fn=None) -> np.ndarray:
    """``L[a_hat, alpha] = fn(d(a_hat, alpha))`` over candidates."""
    fn = task.loss_fn if fn is None else fn
    pts = task.space.points
    return fn(pairwise(task.space.metric, pts, pts))


def minimax_risk_exhaustive(task: LearningTask) -> float:
    """``min_est max_alpha E[loss]`` over deterministic estimators B -> candidates."""
    n_pts, n_b = len(task.space), task.n_obs
    if n_pts ** n_b > EXHAUSTIVE_LIMIT:
        raise InvalidInput("too many estimators to enumerate")
    lik = task.point_likelihood()           # (alpha, b)
    lm = loss_matrix(task)                  # (a_hat, alpha)
    ests = np.indices((n_pts,) * n_b).reshape(n_b, -1).T
    # risk[k, alpha] = sum_b p(b|alpha) L[est_k(b), alpha]
    risk = np.einsum("ab,kba->ka", lik, lm[ests])
    return float(risk.max(axis=1).min())


def minimax_risk_lp(task: LearningTask) -> float:
    """Minimax risk over randomized estimators, solved as a linear program."""
    n_pts, n_b = len(task.space), task.n_obs
    lik = task.point_likelihood()
    lm = loss_matrix(task)
    nv = n_pts * n_b  # q[a_hat, b] flattened a_hat-major
    c = np.zeros(nv + 1)
    c[-1] = 1.0
    # sum_{a,b} p(b|alpha) L[a, alpha] q[a, b] - t <= 0
    a_ub = np.zeros((n_pts, nv + 1))
    for alpha in range(n_pts):
        a_ub[alpha, :nv] = (lm[:, alpha][:, None] * lik[alpha][None, :]).reshape(-1)
    a_ub[:, -1] = -1.0
    a_eq = np.zeros((n_b, nv + 1))
    for b in range(n_b):
        a_eq[b, b:nv:n_b] = 1.0
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(n_pts), A_eq=a_eq, b_eq=np.ones(n_b),
                  bounds=[(0, None)] * nv + [(None, None)], method="highs")
    if not res.success:
        raise RuntimeError(f"minimax LP failed: {res.message}")
    return float(res.fun)


# ---- Monte Carlo ----------------------------------------------------------

class MonteCarloResult(NamedTuple):
    expected_loss: float
    success: float
    half_width: float


def substream(seed: int, index: int = 0) -> np.random.Generator:
    """Counter-based generator for substream ``index`` of ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def map_center_estimator(task: LearningTask) -> Callable[[np.ndarray], np.ndarray]:
    """Observation index -> coordinates of the MAP model cell's center."""
    post = task.prior[:, None] * task.likelihood
    cell = post.argmax(axis=0)
    centers = task.model.centers
    return lambda b: centers[cell[np.asarray(b)]]


ESTIMATORS = {"map-center": map_center_estimator}


def monte_carlo_risk(task: LearningTask, estimator, samples: int, seed: int,
                     target: int | None = None, stream: int = 0) -> MonteCarloResult:
    """Sample-mean loss and epsilon-success of ``estimator`` with a 95% normal interval.

    ``target`` fixes the parameter (candidate index); otherwise cells are
    drawn from the prior and the parameter is the cell's center.
    """
    if samples < 1:
        raise InvalidInput("need at least one sample")
    if isinstance(estimator, str):
        if estimator not in ESTIMATORS:
            raise InvalidInput(f"unknown estimator {estimator!r}")
        estimator = ESTIMATORS[estimator](task)
    rng = substream(seed, stream)
    if target is None:
        cells = rng.choice(task.model.size, size=samples, p=task.prior)
        alpha = task.model.center_indices[cells]
    else:
        alpha = np.full(samples, int(target))
        cells = task.model.cells[alpha]
    cdf = np.cumsum(task.likelihood[cells], axis=1)
    u = rng.random(samples)[:, None]
    obs = np.minimum((u >= cdf).sum(axis=1), task.n_obs - 1)
    est = np.asarray(estimator(obs), dtype=float).reshape(samples, -1)
    pts = task.space.points[alpha]
    if task.space.metric == "euclidean":
        dist = np.sqrt(((est - pts) ** 2).sum(axis=1))
    else:
        dist = np.abs(est - pts).sum(axis=1)
    losses = task.loss_fn(dist)
    hits = (dist <= task.epsilon + 1e-12).astype(float)
    sd = losses.std(ddof=1) if samples > 1 else 0.0
    return MonteCarloResult(float(losses.mean()), float(hits.mean()), float(1.96 * sd / np.sqrt(samples)))


# ---- exact learning ---------------------------------------------------------

@dataclass
class ExactLearningInstance:
    n_bits: int
    concepts: np.ndarray          # (|C|, 2^n) truth tables
    m: int
    p_x: np.ndarray
    prior: np.ndarray
    table: np.ndarray             # p(a, b), b = m query outcomes (x, c(x))
    kets: list[np.ndarray] | None = None

    @property
    def outcome_labels(self) -> list[tuple[tuple[int, int], ...]]:
        single = [(x, y) for x in range(2 ** self.n_bits) for y in (0, 1)]
        return list(itertools.product(single, repeat=self.m))

    def cq_state(self) -> DensityOperator:
        """``sum_a p(a) |a><a| ⊗ |psi_a><psi_a|``."""
        if self.kets is None:
            raise InvalidInput("instance built without quantum examples")
        d_b = self.kets[0].size
        m = np.zeros((len(self.kets) * d_b,) * 2, dtype=complex)
        for a, (pa, k) in enumerate(zip(self.prior, self.kets)):
            blk = slice(a * d_b, (a + 1) * d_b)
            m[blk, blk] = pa * np.outer(k, k.conj())
        return DensityOperator(m, (len(self.kets), d_b))

    def coherent_state(self) -> DensityOperator:
        """``sum_a sqrt(p(a)) |a> ⊗ |psi_a>``."""
        if self.kets is None:
            raise InvalidInput("instance built without quantum examples")
        v = np.concatenate([np.sqrt(pa) * k for pa, k in zip(self.prior, self.kets)])
        return DensityOperator.from_ket(v, (len(self.kets), self.kets[0].size))

    def dephased_table(self) -> np.ndarray:
        """Joint table read off the computational-basis diagonal of the quantum examples."""
        if self.kets is None:
            raise InvalidInput("instance built without quantum examples")
        return np.array([pa * np.abs(k) ** 2 for pa, k in zip(self.prior, self.kets)])


def _truth_table(c, n_inputs: int) -> np.ndarray:
    if isinstance(c, (int, np.integer)):
        if not 0 <= c < 2 ** n_inputs:
            raise InvalidInput(f"concept {c} is not a {n_inputs}-entry truth table")
        return np.array([(int(c) >> x) & 1 for x in range(n_inputs)])
    t = np.asarray(c, dtype=int).reshape(-1)
    if t.size != n_inputs or np.any((t != 0) & (t != 1)):
        raise InvalidInput("truth tables must be 0/1 sequences of length 2^n")
    return t


def exact_learning_scenario(n_bits: int, concepts: Sequence, m: int, p_x=None, prior=None,
                            with_states: bool = True) -> ExactLearningInstance:
    """Joint law of a concept and ``m`` iid labelled queries ``(x, c(x))``."""
    if not 1 <= n_bits <= 3 or not 1 <= len(concepts) <= 16 or not 1 <= m <= 4:
        raise InvalidInput("exact-learning instances are limited to n <= 3, |C| <= 16, m <= 4")
    n_in = 2 ** n_bits
    tables = np.array([_truth_table(c, n_in) for c in concepts])
    p_x = np.full(n_in, 1 / n_in) if p_x is None else np.asarray(p_x, float)
    if p_x.shape != (n_in,) or np.any(p_x < 0) or abs(p_x.sum() - 1) > 1e-12:
        raise InvalidInput("p_x must be a distribution over the 2^n inputs")
    prior = np.full(len(tables), 1 / len(tables)) if prior is None else np.asarray(prior, float)
    if prior.shape != (len(tables),) or np.any(prior < 0) or abs(prior.sum() - 1) > 1e-12:
        raise InvalidInput("prior must be a distribution over concepts")
    rows, kets = [], []
    for t in tables:
        one = np.zeros(2 * n_in)
        one[2 * np.arange(n_in) + t] = p_x
        amp = np.sqrt(one).astype(complex)
        row, ket = one, amp
        for _ in range(m - 1):
            row = np.kron(row, one)
            ket = np.kron(ket, amp)
        rows.append(row)
        kets.append(ket)
    table = prior[:, None] * np.array(rows)
    return ExactLearningInstance(n_bits, tables, m, p_x, prior, table, kets if with_states else None)
