"""Entanglement-fraction task on discretized parameter spaces.

Partition and packing singlets live in the abstract cell basis; the grid
objects (band state, cell projectors) live on a uniform 1-D grid whose
basis vectors are unit-normalized cell indicators.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy.linalg import null_space

from .bounds import SDP_TOL, BoundReport
from .discretize import DIST_TOL, Discretization, validate_discretization
from .entropy import conditional_von_neumann, von_neumann
from .errors import InvalidInput
from .minent_sdp import solve_hmin
from .quantum_core import (
    Channel, DensityOperator, apply_channel, dag, dephase, depolarizing, identity_channel,
    maximally_entangled, random_channel,
)


def partition_singlet(disc: Discretization, mode: str = "partition") -> DensityOperator:
    """``|W|^(-1/2) sum_w |w>|w>`` over the cells (partition) or balls (packing) of ``disc``."""
    if disc.size == 0:
        raise InvalidInput("empty discretization")
    if mode == "partition":
        if not disc.is_net:
            raise InvalidInput("partition singlet needs an epsilon-net")
    elif mode == "packing":
        if not disc.is_packing:
            raise InvalidInput("packing singlet needs a packing")
    else:
        raise InvalidInput(f"unknown mode {mode!r}")
    problems = validate_discretization(disc)
    if problems:
        raise InvalidInput("; ".join(problems))
    return maximally_entangled(disc.size)


# ---- grid objects ---------------------------------------------------------

@dataclass(frozen=True)
class Grid:
    lo: float
    hi: float
    m: int

    def __post_init__(self):
        if self.m < 1 or not self.hi > self.lo:
            raise InvalidInput("grid needs m >= 1 cells on a non-empty interval")

    @property
    def h(self) -> float:
        return (self.hi - self.lo) / self.m

    @property
    def midpoints(self) -> np.ndarray:
        return self.lo + self.h * (np.arange(self.m) + 0.5)


@dataclass(frozen=True)
class GridState:
    """Bipartite grid state: ``amplitudes[i, j]`` on indicator pair (i, j)."""

    grid: Grid
    amplitudes: np.ndarray
    norm: float

    def normalized(self) -> np.ndarray:
        if self.norm == 0:
            raise InvalidInput("zero state")
        return self.amplitudes / self.norm


def grid_phi_eps(grid: Grid, epsilon: float) -> GridState:
    """Unnormalized band state ``int int 1{|r - a| <= eps} |r>|a>`` on the grid.

    Each cell pair gets the band indicator at the cell midpoints times ``h``
    (the overlap of two unit-normalized indicators with the band).
    """
    if not epsilon > 0:
        raise InvalidInput("epsilon must be positive")
    x = grid.midpoints
    amp = np.where(np.abs(x[:, None] - x[None, :]) <= epsilon + DIST_TOL, grid.h, 0.0)
    return GridState(grid, amp, float(np.linalg.norm(amp)))


@dataclass(frozen=True)
class SubspaceProjector:
    """Projector onto grid pairs ``(r, a)`` whose cells share a nearest center.

    It is diagonal in the position basis, so it acts on bipartite amplitude
    matrices as an elementwise mask.
    """

    mask: np.ndarray         # (m, m) bool, True on pairs in the same cell
    vectors: np.ndarray      # (m, |W|) unit-normalized cell indicators
    kind: str
    disc: Discretization

    @property
    def matrix(self) -> np.ndarray:
        if self.mask.shape[0] > 40:
            raise InvalidInput("full bipartite projector only materialized for m <= 40")
        return np.diag(self.mask.reshape(-1).astype(float))

    def apply(self, amp: np.ndarray) -> np.ndarray:
        return np.where(self.mask, amp, 0.0)

    def embed_singlet(self) -> np.ndarray:
        """Grid amplitudes of the partition/packing singlet."""
        u = self.vectors
        return u @ u.T / np.sqrt(u.shape[1])


def build_projector(grid: Grid, disc: Discretization, kind: str = "W2") -> SubspaceProjector:
    """Same-cell projector for a net (``W2``) or a packing (``V2``) on the grid.

    Grid cells are assigned to their nearest center (lowest index on ties).
    """
    if disc.space.ndim != 1:
        raise InvalidInput("grid projectors are one-dimensional")
    if kind == "W2" and not disc.is_net:
        raise InvalidInput("W2 projector needs a net")
    if kind == "V2" and not disc.is_packing:
        raise InvalidInput("V2 projector needs a packing")
    if kind not in ("W2", "V2"):
        raise InvalidInput(f"unknown projector kind {kind!r}")
    dist = np.abs(grid.midpoints[:, None] - disc.centers[None, :, 0])
    owner = (dist <= dist.min(axis=1, keepdims=True) + DIST_TOL).argmax(axis=1)
    member = owner[:, None] == np.arange(disc.size)[None, :]
    counts = member.sum(axis=0)
    if np.any(counts == 0):
        raise InvalidInput("grid is coarser than the discretization cells")
    return SubspaceProjector(owner[:, None] == owner[None, :], member / np.sqrt(counts)[None, :], kind, disc)


def grid_identity_deviation(grid: Grid, disc: Discretization, epsilon: float, kind: str = "W2") -> float:
    """``|| P|Phi_eps> / ||P|Phi_eps>|| - phi_grid ||`` (Frobenius on amplitudes)."""
    proj = build_projector(grid, disc, kind)
    v = proj.apply(grid_phi_eps(grid, epsilon).amplitudes)
    nv = np.linalg.norm(v)
    if nv == 0:
        raise InvalidInput("projected band state vanishes")
    return float(np.linalg.norm(v / nv - proj.embed_singlet()))


# ---- channel embedding ----------------------------------------------------

def embed_channel(small: Channel, large_dim: int, basis: np.ndarray, atol: float = 1e-10) -> Channel:
    """Lift ``small`` on span(basis) to the full space; the complement is left untouched."""
    b = np.asarray(basis, dtype=complex)
    k = small.in_dim
    if small.out_dim != k:
        raise InvalidInput("only channels from a subspace to itself can be embedded")
    if b.shape != (large_dim, k):
        raise InvalidInput(f"basis must be a ({large_dim}, {k}) array")
    if np.max(np.abs(dag(b) @ b - np.eye(k))) > atol:
        raise InvalidInput("basis is not orthonormal")
    kraus = [b @ op @ dag(b) for op in small.kraus]
    if k < large_dim:
        comp = null_space(dag(b))
        kraus.append(comp @ dag(comp))
    return Channel(tuple(kraus), large_dim, large_dim)


# ---- theorem checks -------------------------------------------------------

def _noise_on(noise: Channel, d: int) -> Channel:
    if noise.in_dim != d or noise.out_dim != d:
        raise InvalidInput(f"noise must act on the {d}-dimensional cell space")
    return noise


def verify_thm1(disc: Discretization, noise: Channel, tol: float = SDP_TOL, instance: str = "") -> BoundReport:
    """``log2 2^(-Hmin(R|B)) >= -H(R|B)`` at the noisy partition singlet."""
    if disc.size > 8:
        raise InvalidInput("|W| <= 8")
    phi = partition_singlet(disc, "partition")
    sigma = apply_channel(_noise_on(noise, disc.size), phi, 1)
    sol = solve_hmin(sigma)
    if not sol.optimal:
        raise RuntimeError(f"min-entropy SDP ended with status {sol.status}")
    lhs = float(np.log2(sol.primal_value))
    rhs = -conditional_von_neumann(sigma)
    return BoundReport.build("thm1", lhs, rhs, tol=tol, instance=instance or f"unit=bits; |W|={disc.size}")


def verify_thm2(disc: Discretization, noise: Channel, tol: float = SDP_TOL, instance: str = "") -> BoundReport:
    """``1 - q/|V| >= (H(RB) - 1) / log2(|V|^2 - 1)`` at the noisy packing singlet."""
    if disc.size < 2:
        raise InvalidInput("|V| >= 2")
    phi = partition_singlet(disc, "packing")
    rho = apply_channel(_noise_on(noise, disc.size), phi, 1)
    sol = solve_hmin(rho)
    if not sol.optimal:
        raise RuntimeError(f"min-entropy SDP ended with status {sol.status}")
    lhs = 1.0 - sol.primal_value / disc.size
    rhs = (von_neumann(rho) - 1.0) / np.log2(disc.size ** 2 - 1)
    return BoundReport.build("thm2", lhs, rhs, tol=tol, instance=instance or f"unit=probability; |V|={disc.size}")


def singlet_overlap_qk(psi: DensityOperator, k: int) -> float:
    """``(sum of the k largest Schmidt coefficients)^2 / k``."""
    if len(psi.dims) != 2:
        raise InvalidInput("needs a bipartite state")
    if not psi.is_pure():
        raise InvalidInput("needs a pure state")
    if not 1 <= k <= min(psi.dims):
        raise InvalidInput(f"k must lie in [1, {min(psi.dims)}]")
    w, u = np.linalg.eigh(psi.matrix)
    s = np.linalg.svd(u[:, -1].reshape(psi.dims), compute_uv=False)
    return float(s[:k].sum() ** 2 / k)


DEPOLARIZING_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)


def channel_family(d: int, rng: np.random.Generator, n_random: int = 20) -> Iterator[tuple[str, Channel]]:
    """Identity, depolarizing grid, full dephasing and ``n_random`` random channels on ``d`` levels."""
    yield "identity", identity_channel(d)
    for lam in DEPOLARIZING_GRID:
        yield f"depolarizing:{lam}", depolarizing(d, lam)
    yield "dephasing", dephase(d)
    for i in range(n_random):
        yield f"random:{i}", random_channel(d, d, rng)
