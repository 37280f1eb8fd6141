"""Dense finite-dimensional states and channels.

Matrices are plain complex ``numpy`` arrays. ``DensityOperator`` and
``Channel`` wrap them with the tensor-factor metadata needed for partial
traces and local channel application.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .errors import InvalidInput

HERM_TOL = 1e-12
PSD_TOL = 1e-10
TRACE_TOL = 1e-10
TP_TOL = 1e-10


def dag(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def is_hermitian(m: np.ndarray, atol: float = HERM_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m - dag(m)), initial=0.0) <= atol)


def is_psd(m: np.ndarray, atol: float = PSD_TOL) -> bool:
    m = np.asarray(m)
    if not is_hermitian(m, max(atol, HERM_TOL)):
        return False
    return bool(np.linalg.eigvalsh(m).min(initial=0.0) >= -atol)


def hermitian_eig(m: np.ndarray, atol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues in descending order.

    Returns ``(w, u)`` with ``m = u @ diag(w) @ u^H`` and ``u`` unitary.
    """
    m = np.asarray(m, dtype=complex)
    if not is_hermitian(m, atol):
        raise InvalidInput("hermitian_eig requires a Hermitian matrix")
    w, u = np.linalg.eigh((m + dag(m)) / 2)
    return w[::-1].copy(), u[:, ::-1].copy()


def _check_dims(dim: int, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims) or prod(dims) != dim:
        raise InvalidInput(f"factor dims {dims} do not multiply to {dim}")
    return dims


@dataclass(frozen=True)
class DensityOperator:
    """Unit-trace PSD matrix on a tensor product with factor dimensions ``dims``."""

    matrix: np.ndarray
    dims: tuple[int, ...]
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidInput("density operator must be a square matrix")
        if not np.all(np.isfinite(m)):
            raise InvalidInput("density operator has non-finite entries")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", _check_dims(m.shape[0], self.dims))
        if self.check:
            if not is_hermitian(m, 1e-10):
                raise InvalidInput("density operator is not Hermitian")
            if abs(np.trace(m).real - 1.0) > TRACE_TOL:
                raise InvalidInput(f"density operator has trace {np.trace(m).real!r}")
            if np.linalg.eigvalsh((m + dag(m)) / 2).min() < -PSD_TOL:
                raise InvalidInput("density operator is not positive semidefinite")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_ket(cls, psi, dims: Sequence[int] | None = None) -> "DensityOperator":
        psi = np.asarray(psi, dtype=complex).ravel()
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise InvalidInput("zero vector is not a state")
        psi = psi / norm
        return cls(np.outer(psi, psi.conj()), dims if dims is not None else (psi.size,))

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def is_pure(self, atol: float = 1e-9) -> bool:
        return float(np.linalg.eigvalsh(self.matrix).max()) >= 1 - atol


@dataclass(frozen=True)
class Channel:
    """Completely positive trace-preserving map in Kraus form."""

    kraus: tuple[np.ndarray, ...]
    in_dim: int
    out_dim: int

    def __post_init__(self):
        ks = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        if not ks:
            raise InvalidInput("channel needs at least one Kraus operator")
        for k in ks:
            if k.shape != (self.out_dim, self.in_dim):
                raise InvalidInput(
                    f"Kraus operator shape {k.shape} != ({self.out_dim}, {self.in_dim})")
        tp = sum(dag(k) @ k for k in ks)
        if np.max(np.abs(tp - np.eye(self.in_dim))) > TP_TOL:
            raise InvalidInput("Kraus operators are not trace preserving")
        object.__setattr__(self, "kraus", ks)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return sum(k @ x @ dag(k) for k in self.kraus)

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        """Heisenberg-picture action (unital, completely positive)."""
        return sum(dag(k) @ y @ k for k in self.kraus)

    def compose(self, first: "Channel") -> "Channel":
        """``self ∘ first``."""
        if first.out_dim != self.in_dim:
            raise InvalidInput("cannot compose channels with mismatched dimensions")
        ks = [a @ b for a in self.kraus for b in first.kraus]
        ks = [k for k in ks if np.any(np.abs(k) > 1e-15)] or ks[:1]
        return Channel(tuple(ks), first.in_dim, self.out_dim)

    def choi(self) -> np.ndarray:
        return choi_matrix(self)


def ptrace(m: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Partial trace of a matrix over every factor not in ``keep`` (kept in order)."""
    dims = tuple(dims)
    n = len(dims)
    keep = sorted(set(keep))
    t = np.asarray(m).reshape(dims + dims)
    # trace out from the last factor so axis numbers stay valid
    cur = n
    for ax in reversed(range(n)):
        if ax in keep:
            continue
        t = np.trace(t, axis1=ax, axis2=ax + cur)
        cur -= 1
    d = prod(dims[k] for k in keep)
    return t.reshape(d, d)


def partial_trace(rho: DensityOperator, keep: Sequence[int]) -> DensityOperator:
    keep = list(keep)
    if not keep or any(k not in range(len(rho.dims)) for k in keep) or len(set(keep)) != len(keep):
        raise InvalidInput(f"bad factor selection {keep} for dims {rho.dims}")
    red = ptrace(rho.matrix, rho.dims, keep)
    return DensityOperator(red, tuple(rho.dims[k] for k in sorted(keep)))


def _lift(k: np.ndarray, dims: Sequence[int], factor: int) -> np.ndarray:
    left = prod(dims[:factor])
    right = prod(dims[factor + 1:])
    return np.kron(np.kron(np.eye(left), k), np.eye(right))


def apply_channel(ch: Channel, rho: DensityOperator, factor: int) -> DensityOperator:
    """Apply ``ch`` to tensor factor ``factor`` of ``rho``: sum_K (I⊗K⊗I) rho (I⊗K⊗I)^H."""
    if factor not in range(len(rho.dims)) or rho.dims[factor] != ch.in_dim:
        raise InvalidInput(f"channel input dim {ch.in_dim} does not match factor {factor} of {rho.dims}")
    dims = rho.dims
    out = np.zeros((rho.dim // ch.in_dim * ch.out_dim,) * 2, dtype=complex)
    for k in ch.kraus:
        big = _lift(k, dims, factor)
        out += big @ rho.matrix @ dag(big)
    new_dims = dims[:factor] + (ch.out_dim,) + dims[factor + 1:]
    return DensityOperator((out + dag(out)) / 2, new_dims)


def choi_matrix(ch: Channel) -> np.ndarray:
    """Unnormalized Choi matrix ``sum_ij |i><j| ⊗ N(|i><j|)`` on input ⊗ output."""
    d = ch.in_dim
    c = np.zeros((d * ch.out_dim,) * 2, dtype=complex)
    for k in ch.kraus:
        # (I⊗K) sum_i |i>|i>
        v = k.T.reshape(-1)
        c += np.outer(v, v.conj())
    return c


def channel_from_choi(c: np.ndarray, in_dim: int, out_dim: int, atol: float = 1e-8) -> Channel:
    c = np.asarray(c, dtype=complex)
    if c.shape != (in_dim * out_dim,) * 2:
        raise InvalidInput("Choi matrix has the wrong shape")
    if not is_hermitian(c, atol):
        raise InvalidInput("Choi matrix is not Hermitian")
    w, u = np.linalg.eigh((c + dag(c)) / 2)
    if w.min() < -atol:
        raise InvalidInput("Choi matrix is not positive semidefinite")
    if np.max(np.abs(ptrace(c, (in_dim, out_dim), [0]) - np.eye(in_dim))) > atol:
        raise InvalidInput("Choi matrix is not trace preserving")
    kraus = []
    for lam, vec in zip(w, u.T):
        if lam <= 1e-14:
            continue
        kraus.append(np.sqrt(lam) * vec.reshape(in_dim, out_dim).T)
    # absorb the residual so the Kraus set is TP to machine precision
    tp = sum(dag(k) @ k for k in kraus)
    fix = np.linalg.inv(sla.sqrtm(tp))
    kraus = [k @ fix for k in kraus]
    return Channel(tuple(kraus), in_dim, out_dim)


def computational_basis(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def dephase(dim: int, basis: np.ndarray | None = None) -> Channel:
    """Completely dephasing channel ``X -> sum_i |i><i| <i|X|i>`` in ``basis`` (columns)."""
    basis = computational_basis(dim) if basis is None else np.asarray(basis, dtype=complex)
    if basis.shape != (dim, dim) or not np.allclose(dag(basis) @ basis, np.eye(dim), atol=1e-10):
        raise InvalidInput("dephasing basis must be a unitary matrix")
    return Channel(tuple(np.outer(b, b.conj()) for b in basis.T), dim, dim)


def maximally_entangled(d: int) -> DensityOperator:
    """``|phi> = d^(-1/2) sum_a |a>|a>`` as a pure density operator on d ⊗ d."""
    if d < 1:
        raise InvalidInput("dimension must be positive")
    return DensityOperator.from_ket(maximally_entangled_ket(d), (d, d))


def maximally_entangled_ket(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)


def partition_weighted_entangled(weights: Sequence[float]) -> DensityOperator:
    """``sum_a sqrt(p_a) |a>|a>`` for a probability vector over indicator states."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0 or np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
        raise InvalidInput("weights must be a probability vector")
    d = w.size
    return DensityOperator.from_ket(np.diag(np.sqrt(w)).reshape(-1), (d, d))


def singlet_fraction(rho: DensityOperator, dec: Channel) -> float:
    """``q(R|B) = d_R <phi|(I ⊗ D)(rho)|phi>`` for a decoder ``D: B -> R``."""
    if len(rho.dims) != 2:
        raise InvalidInput("singlet fraction needs a bipartite state")
    d_r, d_b = rho.dims
    if dec.in_dim != d_b or dec.out_dim != d_r:
        raise InvalidInput("decoder must map B onto a copy of R")
    out = apply_channel(dec, rho, 1).matrix
    phi = maximally_entangled_ket(d_r)
    return float(d_r * np.real(phi.conj() @ out @ phi))


# ---- standard channels --------------------------------------------------

def identity_channel(d: int) -> Channel:
    return Channel((np.eye(d, dtype=complex),), d, d)


def depolarizing(d: int, lam: float) -> Channel:
    """``rho -> (1 - lam) rho + lam Tr(rho) I/d``."""
    if not 0 <= lam <= 1:
        raise InvalidInput("depolarizing parameter must lie in [0, 1]")
    ks = [np.sqrt(1 - lam) * np.eye(d, dtype=complex)] if lam < 1 else []
    for i in range(d):
        for j in range(d):
            k = np.zeros((d, d), dtype=complex)
            k[i, j] = np.sqrt(lam / d)
            ks.append(k)
    return Channel(tuple(ks), d, d)


def classical_stochastic(matrix) -> Channel:
    """Channel realizing a column-stochastic matrix ``P[b, a] = p(b|a)`` on basis states."""
    p = np.asarray(matrix, dtype=float)
    if p.ndim != 2 or np.any(p < 0) or np.max(np.abs(p.sum(axis=0) - 1)) > 1e-12:
        raise InvalidInput("stochastic matrix columns must be probability vectors")
    d_out, d_in = p.shape
    ks = []
    for b in range(d_out):
        for a in range(d_in):
            if p[b, a] > 0:
                k = np.zeros((d_out, d_in), dtype=complex)
                k[b, a] = np.sqrt(p[b, a])
                ks.append(k)
    return Channel(tuple(ks), d_in, d_out)


def measure_prepare(states: Sequence[np.ndarray], basis: np.ndarray | None = None) -> Channel:
    """Measure in ``basis`` and prepare ``states[i]`` on outcome ``i``."""
    states = [np.asarray(s, dtype=complex) for s in states]
    d_in = len(states)
    basis = computational_basis(d_in) if basis is None else np.asarray(basis, dtype=complex)
    d_out = states[0].shape[0]
    ks = []
    for i, s in enumerate(states):
        if s.shape != (d_out, d_out) or not is_psd(s, 1e-10) or abs(np.trace(s) - 1) > 1e-10:
            raise InvalidInput("prepared states must be density matrices of equal size")
        w, u = np.linalg.eigh(s)
        for lam, vec in zip(w, u.T):
            if lam > 1e-15:
                ks.append(np.sqrt(lam) * np.outer(vec, basis[:, i].conj()))
    return Channel(tuple(ks), d_in, d_out)


def standard_channel(name: str, d: int, *params) -> Channel:
    """Build a named channel: identity | depolarizing | dephasing | classical_stochastic | measure_prepare."""
    if name == "identity":
        return identity_channel(d)
    if name == "depolarizing":
        return depolarizing(d, float(params[0]))
    if name == "dephasing":
        return dephase(d)
    if name == "classical_stochastic":
        return classical_stochastic(params[0])
    if name == "measure_prepare":
        return measure_prepare(params[0])
    raise InvalidInput(f"unknown channel {name!r}")


# ---- random instances ---------------------------------------------------

def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_ket(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_pure(dims: Sequence[int], rng: np.random.Generator) -> DensityOperator:
    return DensityOperator.from_ket(random_ket(prod(dims), rng), dims)


def random_density(dims: Sequence[int], rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    """Induced-measure random state of the given rank (full rank by default)."""
    d = prod(dims)
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ dag(g)
    m /= np.trace(m).real
    return DensityOperator((m + dag(m)) / 2, dims)


def random_channel(d_in: int, d_out: int, rng: np.random.Generator, n_kraus: int | None = None) -> Channel:
    """Random CPTP map from a Haar-random isometry into ``d_out * n_kraus``."""
    n_kraus = d_in * d_out if n_kraus is None else n_kraus
    big = d_out * n_kraus
    z = rng.standard_normal((big, d_in)) + 1j * rng.standard_normal((big, d_in))
    v, _ = np.linalg.qr(z)
    ks = tuple(v[i * d_out:(i + 1) * d_out, :] for i in range(n_kraus))
    return Channel(ks, d_in, d_out)
