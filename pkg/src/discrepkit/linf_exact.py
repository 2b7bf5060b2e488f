"""Exact L-infinity star discrepancy.

The star discrepancy of a finite point set is attained on the finite grids
induced by the coordinate values of the set: the open-box local discrepancy
is maximized over the augmented grid (coordinate values plus 1) and the
closed-box one over the plain grid (Niederreiter 1972).  Everything in this
module is a strategy for searching those grids:

* :func:`star_1d` -- Niederreiter's sorted-order formula in dimension one.
* :func:`star_grid_enum` -- full enumeration of the induced grids by a
  d-dimensional cumulative count tensor.  Also handles signed weights and a
  continuous marginal distribution function in place of Lebesgue volume.
* :func:`star_2d`, :func:`star_3d` -- the incremental-sorting formulas of
  De Clerck (1986) as generalized by Bundschuh and Zhu (1993), which do not
  require distinct coordinates.
* :func:`star_dem` -- the decomposition scheme of Dobkin, Eppstein and
  Mitchell (1996) built on the Overmars-Yap partition: O(n^(d/2)) cells in
  which box counts separate per coordinate, each solved by a small dynamic
  program over (count, extremal volume) states.
* :func:`star_exact` -- dispatcher with a work estimate and budget.

Every result carries a witness corner; the returned value is always the
local discrepancy recomputed at the witness, so callers can verify any
output independently.
"""

from __future__ import annotations

import bisect
import math
import time
from dataclasses import dataclass

import numpy as np

from .pointset import BudgetExceededError, PointSet, WeightedPointSet, volume

__all__ = [
    "MarginalCDF",
    "StarResult",
    "star_1d",
    "star_2d",
    "star_3d",
    "star_grid_enum",
    "star_dem",
    "star_exact",
    "dem_cost_estimate",
]


@dataclass(frozen=True)
class MarginalCDF:
    """Coordinatewise piecewise-linear distribution function on [0,1]^d.

    ``tables[j]`` is a pair (knots, values) with strictly increasing knots
    spanning [0,1], nondecreasing values, and the exact endpoint conditions
    F(0) = 0 and F(1) = 1.  The induced box measure of [0, y) is the product
    of the marginal values F_j(y_j); continuity is what makes grid
    enumeration exact for it.
    """

    tables: tuple

    def __init__(self, tables):
        norm = []
        for knots, values in tables:
            k = np.asarray(knots, dtype=np.float64).reshape(-1)
            v = np.asarray(values, dtype=np.float64).reshape(-1)
            if k.shape != v.shape or k.size < 2:
                raise ValueError("each marginal needs matching knot/value lists")
            if np.any(np.diff(k) <= 0.0):
                raise ValueError("knots must be strictly increasing")
            if k[0] != 0.0 or k[-1] != 1.0:
                raise ValueError("knots must span [0, 1]")
            if v[0] != 0.0 or v[-1] != 1.0:
                raise ValueError("marginals must satisfy F(0) = 0 and F(1) = 1")
            if np.any(np.diff(v) < 0.0):
                raise ValueError("marginal values must be nondecreasing")
            k.flags.writeable = False
            v.flags.writeable = False
            norm.append((k, v))
        object.__setattr__(self, "tables", tuple(norm))

    @property
    def d(self) -> int:
        return len(self.tables)

    @classmethod
    def identity(cls, d: int) -> "MarginalCDF":
        return cls([(np.array([0.0, 1.0]), np.array([0.0, 1.0]))] * d)

    def marginal(self, j: int, x) -> np.ndarray:
        knots, values = self.tables[j]
        return np.interp(np.asarray(x, dtype=np.float64), knots, values)

    def value(self, y) -> float:
        yv = np.asarray(y, dtype=np.float64).reshape(-1)
        out = 1.0
        for j in range(self.d):
            out *= float(self.marginal(j, yv[j]))
        return float(out)


@dataclass(frozen=True)
class StarResult:
    """A star discrepancy value together with its verifying corner."""

    value: float
    witness: np.ndarray
    kind: str  # "open" (delta witness) or "closed" (deltabar witness)

    def __post_init__(self):
        w = np.asarray(self.witness, dtype=np.float64)
        w.flags.writeable = False
        object.__setattr__(self, "witness", w)


def _coerce(nu) -> tuple[np.ndarray, np.ndarray, bool]:
    """Return (points, weights, is_plain) for a plain or weighted set."""
    if isinstance(nu, PointSet):
        return nu.points, np.full(nu.n, 1.0 / nu.n), True
    if isinstance(nu, WeightedPointSet):
        return nu.points, nu.weights, False
    raise TypeError("expected a PointSet or WeightedPointSet")


def _mu_value(y: np.ndarray, G: MarginalCDF | None) -> float:
    if G is None:
        return volume(y)
    return G.value(y)


def local_values(nu, y, G: MarginalCDF | None = None) -> tuple[float, float]:
    """(open, closed) local discrepancies of a possibly weighted set at y.

    Open: mu([0,y)) minus the weight in the open box; closed: weight in the
    closed box minus mu.  This is the recomputation hook used to verify
    witnesses of every exact algorithm.
    """
    pts, w, is_plain = _coerce(nu)
    yv = np.asarray(y, dtype=np.float64).reshape(-1)
    mu = _mu_value(yv, G)
    if is_plain:
        n = pts.shape[0]
        open_w = int(np.count_nonzero(np.all(pts < yv, axis=1))) / n
        closed_w = int(np.count_nonzero(np.all(pts <= yv, axis=1))) / n
    else:
        open_w = float(np.sum(w[np.all(pts < yv, axis=1)]))
        closed_w = float(np.sum(w[np.all(pts <= yv, axis=1)]))
    return mu - open_w, closed_w - mu


def _result_at(nu, y: np.ndarray, kind: str, G: MarginalCDF | None = None) -> StarResult:
    op, cl = local_values(nu, y, G)
    return StarResult(op if kind == "open" else cl, y.copy(), kind)


def star_1d(X: PointSet) -> StarResult:
    """Exact star discrepancy in dimension one (Niederreiter's formula)."""
    if X.d != 1:
        raise ValueError("star_1d requires a one-dimensional point set")
    n = X.n
    xs = np.sort(X.points[:, 0], kind="stable")
    i = np.arange(1, n + 1)
    closed_terms = i / n - xs        # closed box at x_(i)
    open_terms = xs - (i - 1) / n    # open box at x_(i)
    ic = int(np.argmax(closed_terms))
    io = int(np.argmax(open_terms))
    if closed_terms[ic] >= open_terms[io]:
        return _result_at(X, np.array([xs[ic]]), "closed")
    return _result_at(X, np.array([xs[io]]), "open")


# ---------------------------------------------------------------------------
# grid enumeration via cumulative count tensors
# ---------------------------------------------------------------------------

def _axis_values(pts: np.ndarray) -> tuple[list[np.ndarray], list[np.ndarray]]:
    plain = [np.unique(pts[:, j]) for j in range(pts.shape[1])]
    aug = [np.unique(np.append(pts[:, j], 1.0)) for j in range(pts.shape[1])]
    return plain, aug


def _count_tensor(axes: list[np.ndarray], pts: np.ndarray, w: np.ndarray | None,
                  side: str) -> np.ndarray:
    """Cumulative weight tensor over the corner grid.

    Entry [t_1..t_d] is the total weight of points in the open box (side
    "open", strict comparisons) or closed box (side "closed") at the corner
    (axes[0][t_1], ..., axes[d-1][t_d]).  With ``w`` None, integer unit
    counts are accumulated instead (exact and faster).
    """
    shape = tuple(len(a) for a in axes)
    idx = np.empty((pts.shape[0], len(axes)), dtype=np.int64)
    for j, a in enumerate(axes):
        srt = "right" if side == "open" else "left"
        idx[:, j] = np.searchsorted(a, pts[:, j], side=srt)
    keep = np.all(idx < np.array(shape), axis=1)
    H = np.zeros(shape, dtype=np.int32 if w is None else np.float64)
    if np.any(keep):
        flat = np.ravel_multi_index(tuple(idx[keep].T), shape)
        if w is None:
            np.add.at(H.reshape(-1), flat, np.int32(1))
        else:
            np.add.at(H.reshape(-1), flat, w[keep])
    for ax in range(len(axes)):
        np.cumsum(H, axis=ax, out=H)
    return H


def _grid_side_max(axes: list[np.ndarray], mu_axes: list[np.ndarray],
                   counts: np.ndarray, sign: int,
                   scale: float = 1.0) -> tuple[float, tuple]:
    """Max over the corner grid of sign*(mu - scale*count), streamed along
    axis 0.  mu is the product of per-axis factors.  Returns (best, index)."""
    d = len(axes)
    if d == 1:
        vals = sign * (mu_axes[0] - scale * counts)
        t = int(np.argmax(vals))
        return float(vals[t]), (t,)
    rest = mu_axes[-1]
    for j in range(d - 2, 0, -1):
        rest = np.multiply.outer(mu_axes[j], rest)
    best = -np.inf
    best_idx: tuple = ()
    for t0 in range(len(axes[0])):
        slab = sign * (mu_axes[0][t0] * rest - scale * counts[t0])
        pos = int(np.argmax(slab))
        val = float(slab.reshape(-1)[pos])
        if val > best:
            best = val
            best_idx = (t0,) + np.unravel_index(pos, slab.shape)
    return best, best_idx


def star_grid_enum(nu, G: MarginalCDF | None = None,
                   budget: int = 20_000_000) -> StarResult:
    """Star discrepancy by full enumeration of the induced grids.

    Valid for signed weights and for a continuous product distribution
    function in place of Lebesgue measure: the measure of the point part is
    piecewise constant on grid cells while mu is coordinatewise nondecreasing
    and continuous, so the open-box maximum is attained on the augmented grid
    and the closed-box maximum on the plain grid.
    """
    pts, w, is_plain = _coerce(nu)
    d = pts.shape[1]
    if G is not None and G.d != d:
        raise ValueError("marginal table dimension mismatch")
    plain, aug = _axis_values(pts)
    aug_size = 1
    for a in aug:
        aug_size *= len(a)
    if aug_size > budget:
        raise BudgetExceededError(
            f"augmented grid has {aug_size} corners, exceeding the budget "
            f"of {budget}; consider cover or heuristic bounds")

    def mu_axis(j: int, vals: np.ndarray) -> np.ndarray:
        if G is None:
            return vals
        return G.marginal(j, vals)

    wts, scale = (None, 1.0 / pts.shape[0]) if is_plain else (w, 1.0)
    open_counts = _count_tensor(aug, pts, wts, "open")
    mu_open = [mu_axis(j, aug[j]) for j in range(d)]
    best_open, idx_open = _grid_side_max(aug, mu_open, open_counts, +1, scale)
    del open_counts

    closed_counts = _count_tensor(plain, pts, wts, "closed")
    mu_closed = [mu_axis(j, plain[j]) for j in range(d)]
    best_closed, idx_closed = _grid_side_max(plain, mu_closed, closed_counts, -1, scale)
    del closed_counts

    if best_open >= best_closed:
        y = np.array([aug[j][idx_open[j]] for j in range(d)])
        return _result_at(nu, y, "open", G)
    y = np.array([plain[j][idx_closed[j]] for j in range(d)])
    return _result_at(nu, y, "closed", G)


# ---------------------------------------------------------------------------
# dimension-specialized formulas
# ---------------------------------------------------------------------------

def star_2d(X: PointSet) -> StarResult:
    """Exact star discrepancy in dimension two.

    Points sorted by first coordinate; for each prefix the sorted second
    coordinates xi_0 = 0 <= xi_1 <= ... <= xi_i <= xi_{i+1} = 1 are maintained
    incrementally, and candidates k/n - x1_i * xi_k (closed) and
    x1_{i+1} * xi_{k+1} - k/n (open) are scanned.  No distinctness assumption
    is needed.
    """
    if X.d != 2:
        raise ValueError("star_2d requires a two-dimensional point set")
    n = X.n
    order = np.argsort(X.points[:, 0], kind="stable")
    P = X.points[order]
    x1 = np.concatenate(([0.0], P[:, 0], [1.0]))
    xi: list[float] = [0.0, 1.0]
    best = -np.inf
    best_corner = None
    best_kind = "open"
    for i in range(n + 1):
        if i >= 1:
            bisect.insort(xi, float(P[i - 1, 1]))
        for k in range(i + 1):
            closed_val = k / n - x1[i] * xi[k]
            if closed_val > best:
                best = closed_val
                best_corner = (x1[i], xi[k])
                best_kind = "closed"
            open_val = x1[i + 1] * xi[k + 1] - k / n
            if open_val > best:
                best = open_val
                best_corner = (x1[i + 1], xi[k + 1])
                best_kind = "open"
    return _result_at(X, np.array(best_corner), best_kind)


def star_3d(X: PointSet) -> StarResult:
    """Exact star discrepancy in dimension three (Bundschuh-Zhu).

    With sentinels (0,0,0) and (1,1,1) and points sorted by first coordinate,
    the second coordinates of each prefix are kept sorted together with their
    third components; for each prefix length i and each k the third
    components of the k lowest second coordinates plus the sentinels are
    sorted into eta, and candidates l/n - x1_i * xi_k * eta_l (closed) and
    x1_{i+1} * xi_{k+1} * eta_{l+1} - l/n (open) are scanned.
    """
    if X.d != 3:
        raise ValueError("star_3d requires a three-dimensional point set")
    n = X.n
    order = np.argsort(X.points[:, 0], kind="stable")
    P = X.points[order]
    x1 = np.concatenate(([0.0], P[:, 0], [1.0]))
    # (second, third) pairs sorted by second coordinate, sentinels included
    pairs: list[tuple[float, float]] = [(0.0, 0.0), (1.0, 1.0)]
    best = -np.inf
    best_corner = None
    best_kind = "open"
    for i in range(n + 1):
        if i >= 1:
            bisect.insort(pairs, (float(P[i - 1, 1]), float(P[i - 1, 2])))
        eta: list[float] = [pairs[0][1], pairs[i + 1][1]]  # thirds of sentinels
        for k in range(i + 1):
            # eta holds sorted third components of pairs[0..k] plus pairs[i+1]
            if k >= 1:
                bisect.insort(eta, pairs[k][1])
            xi_k, xi_k1 = pairs[k][0], pairs[k + 1][0]
            for l in range(k + 1):
                closed_val = l / n - x1[i] * xi_k * eta[l]
                if closed_val > best:
                    best = closed_val
                    best_corner = (x1[i], xi_k, eta[l])
                    best_kind = "closed"
                open_val = x1[i + 1] * xi_k1 * eta[l + 1] - l / n
                if open_val > best:
                    best = open_val
                    best_corner = (x1[i + 1], xi_k1, eta[l + 1])
                    best_kind = "open"
    return _result_at(X, np.array(best_corner), best_kind)


# ---------------------------------------------------------------------------
# Dobkin-Eppstein-Mitchell decomposition
# ---------------------------------------------------------------------------

@dataclass
class DemRegion:
    """A region [a,b] at a level of the recursive decomposition.

    ``inside`` indexes the points contained in [0, b); ``internal_dim`` maps
    a point index to the unique coordinate j <= level in which it is internal
    (strictly between a_j and b_j while being below b elsewhere).
    """

    level: int
    a: np.ndarray
    b: np.ndarray
    inside: list
    internal_dim: dict


def _dem_cuts(coords: np.ndarray, forced: set, cap: int) -> list[float]:
    """Cut values along one axis: forced values plus enough extra cuts that
    every open gap holds at most ``cap`` strictly inside coordinates."""
    cuts = sorted(forced | {0.0, 1.0})
    final = [cuts[0]]
    for t in range(len(cuts) - 1):
        lo, hi = cuts[t], cuts[t + 1]
        inside = np.sort(coords[(coords > lo) & (coords < hi)])
        while inside.size > cap:
            v = float(inside[cap - 1])
            final.append(v)
            inside = inside[inside > v]
        final.append(hi)
    return final


def star_dem(X: PointSet, validate: bool = False) -> StarResult:
    """Exact star discrepancy by recursive region decomposition.

    Space is subdivided one coordinate at a time into O(sqrt(n)) slabs per
    level, cutting at the coordinates of already-internal points (so no point
    is ever internal in two dimensions) and at extra coordinates so that no
    slab receives more than ceil(sqrt(n)) new internal points.  In a final
    cell every contained point is either below the lower corner in all
    coordinates or internal in exactly one, so the open/closed box counts
    separate per coordinate and a (count, extremal volume) dynamic program
    over per-coordinate candidate values finds the cell's best open and
    closed local discrepancies.  Grid corners are assigned to cells half-open
    on the lower side for open boxes and on the upper side for closed boxes,
    which makes the per-cell counts exact even with duplicate coordinates.

    ``validate`` additionally asserts the two decomposition invariants in
    every region (for tests; quadratic overhead).
    """
    n, d = X.n, X.d
    pts = X.points
    cap = math.isqrt(n)
    if cap * cap < n:
        cap += 1
    grids = [np.unique(pts[:, j]) for j in range(d)]

    best = {"value": -np.inf, "corner": None, "kind": "open"}

    def consider(value: float, corner: list[float], kind: str) -> None:
        if value > best["value"]:
            best["value"] = value
            best["corner"] = list(corner)
            best["kind"] = kind

    def recurse(region: DemRegion) -> None:
        if validate:
            _dem_check(region)
        if region.level == d:
            _dem_cell(region)
            return
        j = region.level
        coords = pts[region.inside, j] if region.inside else np.empty(0)
        forced = {float(pts[i, j]) for i in region.inside if i in region.internal_dim}
        segs = _dem_cuts(coords, forced, cap)
        for t in range(len(segs) - 1):
            lo, hi = segs[t], segs[t + 1]
            a2, b2 = region.a.copy(), region.b.copy()
            a2[j], b2[j] = lo, hi
            keep = [i for i in region.inside if pts[i, j] < hi]
            idim = {}
            for i in keep:
                prev = region.internal_dim.get(i)
                if prev is not None:
                    idim[i] = prev
                elif lo < pts[i, j] < hi:
                    idim[i] = j
            recurse(DemRegion(region.level + 1, a2, b2, keep, idim))

    def _dem_check(region: DemRegion) -> None:
        for i in region.inside:
            internal = [j for j in range(region.level)
                        if region.a[j] < pts[i, j] < region.b[j]]
            assert len(internal) <= 1, "point internal in two dimensions"
            assert region.internal_dim.get(i) == (internal[0] if internal else None)
        for j in range(region.level):
            cnt = sum(1 for i in region.inside if region.internal_dim.get(i) == j)
            assert cnt <= cap, "too many internal points in one dimension"

    def _dem_cell(region: DemRegion) -> None:
        a, b = region.a, region.b
        base = 0
        per_dim: list[list[float]] = [[] for _ in range(d)]
        for i in region.inside:
            jdim = region.internal_dim.get(i)
            if jdim is None:
                base += 1
            else:
                per_dim[jdim].append(float(pts[i, jdim]))
        for vals in per_dim:
            vals.sort()
        n_int = sum(len(v) for v in per_dim)

        # open side: per coordinate the candidates are the distinct internal
        # values (count = #internal strictly below) and b_j (count = all);
        # the maximizing value per count class.
        open_cands: list[list[tuple[float, int]]] = []
        for j in range(d):
            vals = per_dim[j]
            cand: list[tuple[float, int]] = []
            prev = None
            for t, v in enumerate(vals):
                if v != prev:
                    cand.append((v, t))
                    prev = v
            cand.append((float(b[j]), len(vals)))
            open_cands.append(cand)
        got, vol, corner = _dem_dp(open_cands, n_int, maximize=True)
        if got is not None:
            for c in got:
                consider(vol[c] - (base + c) / n, corner[c], "open")

        # closed side: candidates are the distinct internal values (count =
        # #internal at or below) and, below them, the smallest global grid
        # value in [a_j, b_j) with count 0; the minimizing value per class.
        closed_cands: list[list[tuple[float, int]]] = []
        feasible = True
        for j in range(d):
            vals = per_dim[j]
            cand = []
            prev = None
            for t in range(len(vals)):
                v = vals[t]
                if v != prev:
                    cnt = bisect.bisect_right(vals, v)
                    cand.append((v, cnt))
                    prev = v
            g = grids[j]
            pos = np.searchsorted(g, a[j], side="left")
            if pos < len(g) and g[pos] < b[j] and (not cand or g[pos] < cand[0][0]):
                cand.insert(0, (float(g[pos]), 0))
            if not cand:
                feasible = False
                break
            closed_cands.append(cand)
        if feasible:
            got, vol, corner = _dem_dp(closed_cands, n_int, maximize=False)
            if got is not None:
                for c in got:
                    consider((base + c) / n - vol[c], corner[c], "closed")

    def _dem_dp(cands: list[list[tuple[float, int]]], n_int: int, maximize: bool):
        """(count -> extremal volume) DP with witness reconstruction."""
        size = n_int + 1
        NO = None
        vol = [1.0] + [NO] * (size - 1)
        par: list[list] = []
        for j in range(len(cands)):
            nxt: list = [NO] * size
            choice: list = [None] * size
            for c in range(size):
                base_v = vol[c]
                if base_v is None:
                    continue
                for (v, cnt) in cands[j]:
                    cc = c + cnt
                    if cc >= size:
                        break
                    val = base_v * v
                    cur = nxt[cc]
                    if cur is None or (val > cur if maximize else val < cur):
                        nxt[cc] = val
                        choice[cc] = (c, v)
            vol = nxt
            par.append(choice)
        reach = [c for c in range(size) if vol[c] is not None]
        if not reach:
            return None, None, None
        corners: dict[int, list[float]] = {}
        for c in reach:
            path = []
            cc = c
            for j in range(len(cands) - 1, -1, -1):
                prev, v = par[j][cc]
                path.append(v)
                cc = prev
            corners[c] = path[::-1]
        return reach, vol, corners

    root = DemRegion(0, np.zeros(d), np.ones(d), list(range(n)), {})
    recurse(root)
    return _result_at(X, np.array(best["corner"]), best["kind"])


# ---------------------------------------------------------------------------
# dispatcher
# ---------------------------------------------------------------------------

def dem_cost_estimate(n: int, d: int) -> float:
    """Estimated elementary box evaluations of the decomposition, n^(d/2+1)."""
    return float(n) ** (d / 2.0 + 1.0)


_CALIBRATION: dict = {}


def _ops_per_second() -> float:
    """One-off micro-benchmark converting box evaluations to seconds."""
    if "ops" not in _CALIBRATION:
        rng = np.random.default_rng(12345)
        X = PointSet(rng.random((32, 3)))
        t0 = time.perf_counter()
        star_dem(X)
        elapsed = max(time.perf_counter() - t0, 1e-9)
        _CALIBRATION["ops"] = dem_cost_estimate(32, 3) / elapsed
    return _CALIBRATION["ops"]


def star_exact(X: PointSet, budget: int = 50_000_000) -> StarResult:
    """Exact star discrepancy with dimension dispatch and a work budget.

    Dimensions 1-3 use the specialized formulas; higher dimensions use the
    decomposition when its n^(d/2+1) work estimate fits the budget, else a
    budget error reports the estimated cost and suggests guaranteed or
    heuristic bounds instead.
    """
    if X.d == 1:
        return star_1d(X)
    if X.d == 2:
        return star_2d(X)
    if X.d == 3:
        return star_3d(X)
    cost = dem_cost_estimate(X.n, X.d)
    if cost > budget:
        secs = cost / _ops_per_second()
        raise BudgetExceededError(
            f"exact computation needs about {cost:.3g} box evaluations "
            f"(roughly {secs:.3g} s), exceeding the budget of {budget}; "
            f"use cover_bounds or ta_improved from discrepkit.linf_approx")
    return star_dem(X)
