"""Epsilon-packings, epsilon-nets and covering partitions on finite candidate grids."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import InvalidInput

METRICS = ("euclidean", "absolute-difference")
# distances are compared with this slack so grid round-off does not flip membership
DIST_TOL = 1e-12


def pairwise(metric: str, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Distance matrix between rows of ``x`` (n, p) and rows of ``y`` (m, p)."""
    diff = x[:, None, :] - y[None, :, :]
    if metric == "euclidean":
        return np.sqrt((diff ** 2).sum(axis=-1))
    if metric == "absolute-difference":
        return np.abs(diff).sum(axis=-1)
    raise InvalidInput(f"unknown metric {metric!r}")


@dataclass(frozen=True)
class MetricSpace:
    points: np.ndarray
    metric: str = "euclidean"
    bounds: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2:
            raise InvalidInput("points must be an (n, p) array")
        if self.metric not in METRICS:
            raise InvalidInput(f"unknown metric {self.metric!r}")
        if self.bounds is None:
            b = np.stack([pts.min(axis=0), pts.max(axis=0)], axis=1) if len(pts) else np.zeros((pts.shape[1], 2))
        else:
            b = np.asarray(self.bounds, dtype=float).reshape(-1, 2)
        if b.shape[0] != pts.shape[1]:
            raise InvalidInput("bounds must give one interval per coordinate")
        if len(pts) and (np.any(pts < b[:, 0] - DIST_TOL) or np.any(pts > b[:, 1] + DIST_TOL)):
            raise InvalidInput("candidate point outside bounds")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "bounds", b)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def ndim(self) -> int:
        return self.points.shape[1]

    def distance(self, x, y) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        y = np.atleast_2d(np.asarray(y, dtype=float))
        return pairwise(self.metric, x, y)

    def contains(self, point) -> bool:
        p = np.asarray(point, dtype=float).reshape(-1)
        return p.size == self.ndim and bool(
            np.all(p >= self.bounds[:, 0] - DIST_TOL) and np.all(p <= self.bounds[:, 1] + DIST_TOL))

    def diameter(self) -> float:
        return float(pairwise(self.metric, self.points, self.points).max(initial=0.0))


def uniform_grid(bounds: Sequence[Sequence[float]], counts: int | Sequence[int],
                 metric: str = "euclidean", midpoints: bool = False) -> MetricSpace:
    """Tensor grid over a box. ``midpoints`` places points at cell centres."""
    b = np.asarray(bounds, dtype=float).reshape(-1, 2)
    counts = [counts] * len(b) if np.isscalar(counts) else list(counts)
    axes = []
    for (lo, hi), n in zip(b, counts):
        if midpoints:
            h = (hi - lo) / n
            axes.append(lo + h * (np.arange(n) + 0.5))
        else:
            axes.append(np.linspace(lo, hi, n))
    mesh = np.meshgrid(*axes, indexing="ij")
    return MetricSpace(np.stack([m.ravel() for m in mesh], axis=1), metric, b)


@dataclass(frozen=True)
class Discretization:
    """Centers (indices into ``space.points``) at scale ``epsilon``.

    ``cells[i]`` is the center index owning candidate ``i`` once a covering
    partition has been built.
    """

    space: MetricSpace
    center_indices: np.ndarray
    epsilon: float
    kind: str = "both"
    cells: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("packing", "net", "both"):
            raise InvalidInput(f"unknown discretization kind {self.kind!r}")
        if self.epsilon < 0:
            raise InvalidInput("epsilon must be nonnegative")
        object.__setattr__(self, "center_indices", np.asarray(self.center_indices, dtype=int).reshape(-1))

    @property
    def centers(self) -> np.ndarray:
        return self.space.points[self.center_indices]

    @property
    def size(self) -> int:
        return len(self.center_indices)

    @property
    def is_net(self) -> bool:
        return self.kind in ("net", "both")

    @property
    def is_packing(self) -> bool:
        return self.kind in ("packing", "both")

    def cell_members(self, w: int) -> np.ndarray:
        if self.cells is None:
            raise InvalidInput("covering partition not built")
        return np.flatnonzero(self.cells == w)


def from_centers(space: MetricSpace, centers, epsilon: float, kind: str = "net") -> Discretization:
    """Discretization with explicitly given center coordinates (snapped to candidates)."""
    c = np.atleast_2d(np.asarray(centers, dtype=float))
    if c.shape[1] != space.ndim:
        c = c.reshape(-1, space.ndim)
    d = space.distance(c, space.points)
    idx = d.argmin(axis=1)
    if np.any(d[np.arange(len(c)), idx] > DIST_TOL):
        raise InvalidInput("centers must be candidate points")
    return Discretization(space, idx, float(epsilon), kind)


def greedy_packing_net(space: MetricSpace, epsilon: float) -> Discretization:
    """Maximal epsilon-packing by a greedy pass in candidate order.

    A candidate becomes a center unless it lies strictly within ``epsilon``
    of an earlier center, so the result is also an epsilon-net.
    """
    if not epsilon > 0:
        raise InvalidInput("epsilon must be positive")
    n = len(space)
    if n == 0:
        raise InvalidInput("empty candidate set")
    blocked = np.zeros(n, dtype=bool)
    centers = []
    i = 0
    while i < n:
        centers.append(i)
        d = space.distance(space.points[i], space.points)[0]
        blocked |= d < epsilon - DIST_TOL
        rest = np.flatnonzero(~blocked[i + 1:])
        if rest.size == 0:
            break
        i = i + 1 + rest[0]
    return Discretization(space, np.array(centers), float(epsilon), "both")


def _nearest(dist_row: np.ndarray) -> int:
    # lowest index among (numerically) tied minima
    return int(np.flatnonzero(dist_row <= dist_row.min() + DIST_TOL)[0])


def covering_partition(disc: Discretization) -> Discretization:
    if not disc.is_net:
        raise InvalidInput("covering partition needs a net")
    d = pairwise(disc.space.metric, disc.space.points, disc.centers)
    cells = np.array([_nearest(row) for row in d], dtype=int)
    return replace(disc, cells=cells)


def nearest_index(disc: Discretization, point) -> int:
    """Index (0-based) of the center closest to ``point``; lowest index on ties."""
    if not disc.space.contains(point):
        raise InvalidInput(f"point {point!r} outside the space bounds")
    p = np.asarray(point, dtype=float).reshape(1, -1)
    return _nearest(pairwise(disc.space.metric, p, disc.centers)[0])


def nearest_indices(disc: Discretization, points) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1, disc.space.ndim)
    d = pairwise(disc.space.metric, pts, disc.centers)
    m = d.min(axis=1, keepdims=True)
    return (d <= m + DIST_TOL).argmax(axis=1)


def validate_discretization(disc: Discretization) -> list[str]:
    problems = []
    if disc.size == 0:
        return ["no centers"]
    if np.any(disc.center_indices < 0) or np.any(disc.center_indices >= len(disc.space)):
        return ["center index out of range"]
    eps = disc.epsilon
    if disc.is_packing and disc.size > 1:
        dc = pairwise(disc.space.metric, disc.centers, disc.centers)
        np.fill_diagonal(dc, np.inf)
        i, j = np.unravel_index(dc.argmin(), dc.shape)
        if dc[i, j] < eps - DIST_TOL:
            problems.append(f"packing: centers {i} and {j} at distance {dc[i, j]:.6g} < epsilon {eps:.6g}")
    if disc.is_net:
        d = pairwise(disc.space.metric, disc.space.points, disc.centers).min(axis=1)
        bad = np.flatnonzero(d > eps + DIST_TOL)
        if bad.size:
            problems.append(f"net: {bad.size} candidate(s) farther than epsilon from every center, "
                            f"first {int(bad[0])} at {d[bad[0]]:.6g}")
    if disc.cells is not None:
        cells = np.asarray(disc.cells)
        if cells.shape != (len(disc.space),) or np.any(cells < 0) or np.any(cells >= disc.size):
            problems.append("cells: assignment must map every candidate to one center")
        else:
            d = pairwise(disc.space.metric, disc.space.points, disc.centers)
            own = d[np.arange(len(cells)), cells]
            if np.any(own > d.min(axis=1) + DIST_TOL):
                problems.append("cells: some candidate is not assigned to a nearest center")
    return problems
