"""Both sides of each inequality, packaged as BoundReports.

Every check orients ``slack`` so that ``slack >= 0`` means the inequality
holds. Analytic checks use tolerance 1e-9; checks with an SDP value in
them use 1e-6.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .discretize import Discretization, covering_partition, greedy_packing_net
from .entropy import (
    as_joint_table, binary_entropy, classical_hmin_success, conditional_shannon,
    von_neumann,
)
from .errors import InvalidInput
from .learning_sim import (
    EXHAUSTIVE_LIMIT, LearningTask, best_cell_success, induced_joint, map_decoder_success,
    minimax_risk_exhaustive, minimax_risk_lp,
)
from .minent_sdp import max_singlet_fraction
from .quantum_core import DensityOperator, apply_channel, dephase

ANALYTIC_TOL = 1e-9
SDP_TOL = 1e-6
LOG_FLOOR = 1e-12


@dataclass(frozen=True)
class BoundReport:
    name: str
    lhs: float
    rhs: float
    slack: float
    passed: bool
    instance: str = ""
    seed: int | None = None
    config_hash: str = ""

    @classmethod
    def build(cls, name: str, lhs: float, rhs: float, *, slack: float | None = None,
              tol: float = ANALYTIC_TOL, instance: str = "", seed: int | None = None,
              config_hash: str = "") -> "BoundReport":
        """``slack`` defaults to ``lhs - rhs``; the report passes iff ``slack >= -tol``."""
        lhs, rhs = float(lhs), float(rhs)
        slack = lhs - rhs if slack is None else float(slack)
        return cls(name, lhs, rhs, slack, bool(slack >= -tol), instance, seed, config_hash)

    def with_provenance(self, seed: int | None, config_hash: str) -> "BoundReport":
        return BoundReport(self.name, self.lhs, self.rhs, self.slack, self.passed,
                           self.instance, seed, config_hash)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return {k: d[k] for k in ("name", "lhs", "rhs", "slack", "pass", "instance", "seed", "config_hash")}

    @classmethod
    def from_dict(cls, d: dict) -> "BoundReport":
        seed = d.get("seed")
        return cls(str(d["name"]), float(d["lhs"]), float(d["rhs"]), float(d["slack"]),
                   bool(d["pass"]), str(d.get("instance", "")),
                   None if seed in (None, "") else int(seed), str(d.get("config_hash", "")))


def fano_bits(p: float, alphabet: int) -> float:
    """``h2(p) + (1 - p) log2(alphabet - 1)``."""
    p = min(max(float(p), 0.0), 1.0)
    return binary_entropy(p) + (1 - p) * np.log2(alphabet - 1)


# ---- classical ----------------------------------------------------------

def fano_check(t, success: float, instance: str = "") -> BoundReport:
    """H(A|B) <= h2(s) + (1 - s) log2(|A| - 1) for an estimator with success ``s``."""
    p = as_joint_table(t)
    n_a = p.shape[0]
    if n_a == 1:
        return BoundReport.build("fano", 0.0, 0.0, instance=instance or "unit=bits; |A|=1")
    lhs = fano_bits(success, n_a)
    rhs = conditional_shannon(p)
    return BoundReport.build("fano", lhs, rhs, instance=instance or f"unit=bits; |A|={n_a} |B|={p.shape[1]}")


def guarantee_check(t, instance: str = "") -> BoundReport:
    """Optimal success >= 2^(-H(A|B))."""
    p = as_joint_table(t)
    lhs, _ = classical_hmin_success(p)
    rhs = 2.0 ** (-conditional_shannon(p))
    return BoundReport.build("guarantee", lhs, rhs,
                             instance=instance or f"unit=probability; |A|={p.shape[0]} |B|={p.shape[1]}")


def hmin_le_h_check(t, instance: str = "") -> BoundReport:
    p = as_joint_table(t)
    _, hmin = classical_hmin_success(p)
    return BoundReport.build("hmin_le_h", conditional_shannon(p), hmin,
                             instance=instance or f"unit=bits; |A|={p.shape[0]} |B|={p.shape[1]}")


# ---- quantum ------------------------------------------------------------

def quantum_fano_check(psi: DensityOperator, rho: DensityOperator, instance: str = "") -> BoundReport:
    """H(RB)_rho <= h2(p) + (1 - p) log2(D - 1) with ``p = <psi|rho|psi>``, ``D = dim RB``."""
    if tuple(psi.dims) != tuple(rho.dims):
        raise InvalidInput(f"psi dims {psi.dims} differ from rho dims {rho.dims}")
    if not psi.is_pure():
        raise InvalidInput("psi must be pure")
    big = rho.dim
    if big == 1:
        return BoundReport.build("quantum_fano", 0.0, 0.0, instance=instance or "unit=bits; D=1")
    p = float(np.real(np.vdot(psi.matrix, rho.matrix)))
    lhs = fano_bits(p, big)
    rhs = von_neumann(rho)
    return BoundReport.build("quantum_fano", lhs, rhs,
                             instance=instance or f"unit=bits; dims={tuple(rho.dims)} p={p!r}")


def singlet_fano_check(rho: DensityOperator, instance: str = "") -> BoundReport:
    """Quantum Fano with ``p = q(R|B)/d``, the best overlap with the maximally entangled state."""
    if len(rho.dims) != 2 or rho.dims[0] != rho.dims[1]:
        raise InvalidInput("singlet instantiation needs R and B of equal dimension")
    d = rho.dims[0]
    if d == 1:
        return BoundReport.build("singlet_fano", 0.0, 0.0, instance=instance or "unit=bits; d=1")
    p = max_singlet_fraction(rho) / d
    lhs = fano_bits(p, d * d)
    rhs = von_neumann(rho)
    return BoundReport.build("singlet_fano", lhs, rhs, tol=SDP_TOL,
                             instance=instance or f"unit=bits; d={d} p={p!r}")


def _dephased_table(rho: DensityOperator) -> np.ndarray:
    diag = np.real(np.diag(rho.matrix)).clip(0, None)
    if diag.sum() <= 0:
        raise InvalidInput("state has no diagonal mass")
    return (diag / diag.sum()).reshape(rho.dims)


def dephasing_reduction_check(rho: DensityOperator, instance: str = "") -> BoundReport:
    """SDP value of the fully dephased state equals the MAP success of its diagonal table."""
    if len(rho.dims) != 2:
        raise InvalidInput("dephasing reduction needs a bipartite state")
    d_r, d_b = rho.dims
    table = _dephased_table(rho)
    deph = apply_channel(dephase(d_b), apply_channel(dephase(d_r), rho, 0), 1)
    deph = DensityOperator(deph.matrix / np.trace(deph.matrix).real, deph.dims)
    lhs = max_singlet_fraction(deph)
    rhs, _ = map_decoder_success(table)
    return BoundReport.build("dephasing_reduction", lhs, rhs, slack=SDP_TOL - abs(lhs - rhs), tol=0.0,
                             instance=instance or f"unit=probability; dims={(d_r, d_b)}")


# ---- learning bounds ----------------------------------------------------

def minimax_bound(hvb: float, cardinality: int, loss_at_eps: float) -> float:
    """``loss(eps) (H(V|B) - 1) / log2|V|``, clamped at 0."""
    if cardinality < 2:
        raise InvalidInput("the minimax bound needs |V| >= 2")
    return max(float(loss_at_eps) * (float(hvb) - 1.0) / np.log2(cardinality), 0.0)


def learning_guarantee_bound(hwb: float, score_at_eps: float) -> float:
    """``log2 s(eps) - H(W|B)``."""
    if not score_at_eps > 0:
        raise InvalidInput("score at epsilon must be strictly positive")
    return float(np.log2(score_at_eps) - hwb)


def minimax_risk(task: LearningTask) -> tuple[float, str]:
    """Deterministic minimax risk when enumerable, otherwise the randomized LP value."""
    if len(task.space) ** task.n_obs <= EXHAUSTIVE_LIMIT:
        return minimax_risk_exhaustive(task), "exhaustive"
    return minimax_risk_lp(task), "lp"


def prop2_check(task: LearningTask, epsilon: float | None = None, packing: Discretization | None = None,
                instance: str = "") -> BoundReport:
    """Minimax risk against the packing bound; the packing has radius ``2 * epsilon``."""
    epsilon = task.epsilon if epsilon is None else epsilon
    v = greedy_packing_net(task.space, 2 * epsilon) if packing is None else packing
    if v.size < 2:
        raise InvalidInput("the 2*epsilon packing has fewer than two points")
    hvb = conditional_shannon(induced_joint(task, v))
    rhs = minimax_bound(hvb, v.size, float(task.loss_fn(epsilon)))
    lhs, how = minimax_risk(task)
    return BoundReport.build("prop2_minimax", lhs, rhs,
                             instance=instance or f"unit=loss; |V|={v.size} H(V|B)={hvb!r} risk={how}")


def prop3_check(task: LearningTask, epsilon: float | None = None, net: Discretization | None = None,
                instance: str = "") -> BoundReport:
    """``log2(s(eps) * best-cell success) >= log2 s(eps) - H(W|B)`` on an epsilon-net.

    ``epsilon`` defaults to the task's own scale, which also sets the score.
    """
    epsilon = task.epsilon if epsilon is None else epsilon
    w = covering_partition(greedy_packing_net(task.space, epsilon) if net is None else net)
    joint = induced_joint(task, w)
    hwb = conditional_shannon(joint)
    s_eps = float(task.score_fn(epsilon))
    best = best_cell_success(joint)
    lhs = float(np.log2(max(s_eps * best, LOG_FLOOR)))
    rhs = learning_guarantee_bound(hwb, max(s_eps, LOG_FLOOR))
    return BoundReport.build("prop3_guarantee", lhs, rhs,
                             instance=instance or f"unit=bits; |W|={w.size} H(W|B)={hwb!r} best_cell={best!r}")

