"""Core geometry for anchored-box discrepancies.

Everything downstream is built on four small notions:

* a point set ``X`` of ``n`` points in ``[0,1)^d``,
* anchored test boxes ``[0,y)`` (open) and ``[0,y]`` (closed) for a corner
  ``y`` in ``[0,1]^d``,
* the local discrepancy at a corner, i.e. how far the box volume is from the
  fraction of points the box captures,
* the finite grids induced by the coordinate values of ``X``, on which every
  exact algorithm in this package searches.

Conventions are strict: points live in the half-open cube, corners in the
closed cube, and all membership tests are exact floating-point comparisons.
Discrepancy *values* carry rounding error; box membership never does.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "BudgetExceededError",
    "PointSet",
    "WeightedPointSet",
    "GridView",
    "LocalDiscrepancy",
    "CriticalCorner",
    "volume",
    "local_discrepancy",
    "grid_view",
    "classify_critical",
    "enumerate_critical",
    "snap_down",
    "snap_up",
]


class BudgetExceededError(RuntimeError):
    """An enumeration or cost model exceeded the caller-supplied budget."""


def _as_points(points, d: int | None = None) -> np.ndarray:
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1) if d in (None, 1) else arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError("points must form a 2-d array of shape (n, d)")
    return arr


@dataclass(frozen=True)
class PointSet:
    """``n`` points in ``[0,1)^d``, the object whose discrepancy is measured.

    Duplicate points and duplicate coordinates are allowed; a coordinate
    equal to 1 is not.
    """

    points: np.ndarray

    def __init__(self, points, d: int | None = None):
        arr = _as_points(points, d)
        if arr.shape[0] < 1:
            raise ValueError("a point set needs at least one point")
        if d is not None and arr.shape[1] != d:
            raise ValueError(f"expected dimension {d}, got {arr.shape[1]}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coordinates must be finite")
        if np.any(arr < 0.0) or np.any(arr >= 1.0):
            raise ValueError("coordinates must satisfy 0 <= c < 1")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "points", arr)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def project(self, dims) -> "PointSet":
        """Orthogonal projection onto the coordinates in ``dims`` (0-based)."""
        dims = list(dims)
        if not dims:
            raise ValueError("projection needs at least one coordinate")
        return PointSet(self.points[:, dims])


@dataclass(frozen=True)
class WeightedPointSet:
    """Points with arbitrary real weights; models signed discrete measures."""

    weights: np.ndarray
    points: np.ndarray

    def __init__(self, weights, points, d: int | None = None):
        w = np.asarray(weights, dtype=np.float64).reshape(-1)
        arr = _as_points(points, d)
        if arr.shape[0] != w.shape[0]:
            raise ValueError("one weight per point required")
        if not np.all(np.isfinite(w)) or not np.all(np.isfinite(arr)):
            raise ValueError("weights and coordinates must be finite")
        if np.any(arr < 0.0) or np.any(arr >= 1.0):
            raise ValueError("coordinates must satisfy 0 <= c < 1")
        w, arr = w.copy(), arr.copy()
        w.flags.writeable = False
        arr.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "points", arr)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @classmethod
    def equal_weights(cls, X: PointSet) -> "WeightedPointSet":
        return cls(np.full(X.n, 1.0 / X.n), X.points)


def _as_corner(y, d: int) -> np.ndarray:
    arr = np.asarray(y, dtype=np.float64).reshape(-1)
    if arr.shape[0] != d:
        raise ValueError(f"corner has dimension {arr.shape[0]}, expected {d}")
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("corner coordinates must lie in [0, 1]")
    return arr


def volume(y) -> float:
    """Volume of the anchored box with upper corner ``y`` (product of coords)."""
    arr = np.asarray(y, dtype=np.float64).reshape(-1)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("corner coordinates must lie in [0, 1]")
    return float(np.multiply.reduce(arr))


@dataclass(frozen=True)
class LocalDiscrepancy:
    """Local discrepancy data of one test corner."""

    delta: float          # volume - open_count/n
    delta_bar: float      # closed_count/n - volume
    delta_star: float     # max of the two
    open_count: int
    closed_count: int
    volume: float


def local_discrepancy(y, X: PointSet) -> LocalDiscrepancy:
    """Evaluate open/closed counts and local discrepancies at corner ``y``."""
    yv = _as_corner(y, X.d)
    a = int(np.count_nonzero(np.all(X.points < yv, axis=1)))
    ab = int(np.count_nonzero(np.all(X.points <= yv, axis=1)))
    v = volume(yv)
    delta = v - a / X.n
    delta_bar = ab / X.n - v
    return LocalDiscrepancy(delta, delta_bar, max(delta, delta_bar), a, ab, v)


def open_count(y, X: PointSet) -> int:
    yv = _as_corner(y, X.d)
    return int(np.count_nonzero(np.all(X.points < yv, axis=1)))


def closed_count(y, X: PointSet) -> int:
    yv = _as_corner(y, X.d)
    return int(np.count_nonzero(np.all(X.points <= yv, axis=1)))


@dataclass(frozen=True)
class GridView:
    """Per-coordinate sorted coordinate values of a point set.

    ``values[j]`` is the strictly increasing list of distinct j-th
    coordinates, ``aug_values[j]`` the same list with 1 appended, and
    ``orders[j]`` a stable argsort of the j-th coordinates (rank to point
    index).  The Cartesian products of these lists are the finite search
    spaces on which the open/closed local discrepancies attain the star
    discrepancy.
    """

    values: tuple
    aug_values: tuple
    sizes: tuple
    orders: tuple

    @property
    def grid_size(self) -> int:
        """Number of corners in the closed-side grid (product of sizes)."""
        out = 1
        for v in self.values:
            out *= len(v)
        return out

    @property
    def aug_grid_size(self) -> int:
        out = 1
        for v in self.aug_values:
            out *= len(v)
        return out


def grid_view(X: PointSet) -> GridView:
    values, aug, sizes, orders = [], [], [], []
    for j in range(X.d):
        col = X.points[:, j]
        vals = np.unique(col)
        vals.flags.writeable = False
        av = np.unique(np.append(col, 1.0))
        av.flags.writeable = False
        values.append(vals)
        aug.append(av)
        sizes.append(len(av))
        order = np.argsort(col, kind="stable")
        order.flags.writeable = False
        orders.append(order)
    return GridView(tuple(values), tuple(aug), tuple(sizes), tuple(orders))


def classify_critical(y, X: PointSet) -> tuple[bool, bool]:
    """Classify a corner as (delta-critical, deltabar-critical).

    A corner is delta-critical if every feasible enlargement of the open box
    strictly increases the point count (vacuously so where no enlargement is
    feasible), and deltabar-critical if every feasible shrinking of the
    closed box strictly decreases it.  Counts are piecewise constant, so it
    suffices to test a single-coordinate move to the neighboring grid value.
    """
    yv = _as_corner(y, X.d)
    gv = grid_view(X)
    a0 = open_count(yv, X)
    ab0 = closed_count(yv, X)

    is_delta = True
    for j in range(X.d):
        if yv[j] == 1.0:
            continue
        av = gv.aug_values[j]
        nxt = av[np.searchsorted(av, yv[j], side="right")]
        y2 = yv.copy()
        y2[j] = nxt
        if open_count(y2, X) == a0:
            is_delta = False
            break

    is_deltabar = True
    for j in range(X.d):
        if yv[j] == 0.0:
            continue
        vals = gv.values[j]
        pos = np.searchsorted(vals, yv[j], side="left")
        prev = vals[pos - 1] if pos > 0 else 0.0
        y2 = yv.copy()
        y2[j] = prev
        if closed_count(y2, X) == ab0:
            is_deltabar = False
            break

    return is_delta, is_deltabar


@dataclass(frozen=True)
class CriticalCorner:
    corner: np.ndarray
    kind: str   # "delta" (open box) or "deltabar" (closed box)
    count: int  # open count for "delta", closed count for "deltabar"


def enumerate_critical(X: PointSet, k: int | None = None,
                       budget: int = 1_000_000) -> list[CriticalCorner]:
    """All critical corners of the induced grids, optionally filtered by count.

    Delta-critical corners are searched in the augmented grid, deltabar ones
    in the plain grid.  With ``k`` given, only corners whose relevant count
    equals ``k`` are returned.  Intended for small instances; the total
    number of grid corners visited is capped by ``budget``.
    """
    import itertools

    gv = grid_view(X)
    total = gv.aug_grid_size + gv.grid_size
    if total > budget:
        raise BudgetExceededError(
            f"induced grid has {total} corners, exceeding the budget of {budget}")
    out: list[CriticalCorner] = []
    for y in itertools.product(*gv.aug_values):
        yv = np.array(y)
        is_d, _ = classify_critical(yv, X)
        if is_d:
            cnt = open_count(yv, X)
            if k is None or cnt == k:
                out.append(CriticalCorner(yv, "delta", cnt))
    for y in itertools.product(*gv.values):
        yv = np.array(y)
        _, is_db = classify_critical(yv, X)
        if is_db:
            cnt = closed_count(yv, X)
            if k is None or cnt == k:
                out.append(CriticalCorner(yv, "deltabar", cnt))
    return out


def snap_down(y, X: PointSet) -> np.ndarray:
    """Round each coordinate down to the nearest value in its grid (or 0).

    The result is the grid corner obtained by flooring every coordinate into
    ``values[j] + {0}``.  Point-in-closed-box outcomes are unchanged for every
    point, so the closed count is preserved and the closed-box local
    discrepancy never decreases.  The floor is unique, hence deterministic.
    """
    yv = _as_corner(y, X.d)
    gv = grid_view(X)
    out = np.empty(X.d)
    for j in range(X.d):
        vals = gv.values[j]
        pos = np.searchsorted(vals, yv[j], side="right")
        out[j] = vals[pos - 1] if pos > 0 else 0.0
    return out


def snap_up(y, X: PointSet, rng) -> np.ndarray:
    """Greedily raise coordinates onto the augmented grid without capturing points.

    Coordinates are processed in an order drawn uniformly at random from
    ``rng``; each is raised to the largest augmented-grid value that keeps the
    open count unchanged given the other (current) coordinates.  The result is
    maximal: raising any single coordinate further would capture a point.  The
    open-box local discrepancy never decreases.
    """
    rng = np.random.default_rng(rng)
    yv = _as_corner(y, X.d)
    pts = X.points
    z = yv.copy()
    order = rng.permutation(X.d)
    for j in order:
        others = np.all(np.delete(pts, j, axis=1) < np.delete(z, j), axis=1)
        blocked = pts[others & (pts[:, j] >= yv[j]), j]
        z[j] = blocked.min() if blocked.size else 1.0
    return z
