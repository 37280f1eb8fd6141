"""Shannon, min- and von Neumann entropies. All logarithms are base 2 (bits)."""
from __future__ import annotations

import numpy as np

from .errors import InvalidInput
from .quantum_core import DensityOperator, hermitian_eig, ptrace

EIG_CLIP = 1e-10


def as_joint_table(t) -> np.ndarray:
    """Validate a joint distribution ``p[a, b]`` (rows: target, columns: observation)."""
    p = np.asarray(t, dtype=float)
    if p.ndim != 2 or p.size == 0:
        raise InvalidInput("joint table must be a non-empty 2-D array")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise InvalidInput("joint table entries must be finite and nonnegative")
    if abs(p.sum() - 1.0) > 1e-12:
        raise InvalidInput(f"joint table sums to {p.sum()!r}, not 1")
    return p


def random_joint_table(n_a: int, n_b: int, rng: np.random.Generator, sparsity: float = 0.0) -> np.ndarray:
    p = rng.exponential(size=(n_a, n_b))
    if sparsity:
        p[rng.random((n_a, n_b)) < sparsity] = 0.0
        if p.sum() == 0:
            p[rng.integers(n_a), rng.integers(n_b)] = 1.0
    return p / p.sum()


def _plogp(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def shannon(p) -> float:
    return _plogp(p)


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise InvalidInput(f"binary entropy argument {p!r} outside [0, 1]")
    return _plogp(np.array([p, 1.0 - p]))


def conditional_shannon(t) -> float:
    """H(A|B) = H(AB) - H(B)."""
    p = as_joint_table(t)
    return max(_plogp(p) - _plogp(p.sum(axis=0)), 0.0)


def classical_hmin_success(t) -> tuple[float, float]:
    """Optimal guessing probability ``sum_b max_a p(a, b)`` and Hmin(A|B) = -log2 of it."""
    p = np.asarray(t, dtype=float)
    if p.ndim == 2 and p.size and not np.any(p):
        raise InvalidInput("all-zero table")
    p = as_joint_table(p)
    success = float(p.max(axis=0).sum())
    return success, float(-np.log2(success))


def spectrum(rho: DensityOperator | np.ndarray) -> np.ndarray:
    m = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho)
    w, _ = hermitian_eig(m, atol=1e-9)
    if w.min() < -EIG_CLIP:
        raise InvalidInput(f"state has eigenvalue {w.min():.3e} below tolerance")
    return np.clip(w, 0.0, None)


def von_neumann(rho: DensityOperator | np.ndarray) -> float:
    return _plogp(spectrum(rho))


def conditional_von_neumann(rho: DensityOperator) -> float:
    """H(R|B) = S(RB) - S(B) for a bipartite state on R ⊗ B."""
    if len(rho.dims) != 2:
        raise InvalidInput("conditional entropy needs a bipartite state")
    return von_neumann(rho) - von_neumann(ptrace(rho.matrix, rho.dims, [1]))


def diagonal_embedding(t) -> DensityOperator:
    """Classical joint table as a diagonal state on C^|A| ⊗ C^|B|."""
    p = as_joint_table(t)
    return DensityOperator(np.diag(p.reshape(-1)).astype(complex), p.shape)
