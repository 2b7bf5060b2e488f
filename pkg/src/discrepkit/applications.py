"""Applications: measure reduction, permutation search, quality reporting.

Scenario reduction in the sense of Henrion, Kuechler and Roemisch (2009):
approximate a discrete probability measure P by a measure Q supported on a
small subset of P's atoms, minimizing the anchored-box (Kolmogorov-type)
distance.  The outer support search is greedy forward or backward selection;
the inner probability optimization is a small linear program whose
constraints are indexed by the supporting boxes, which are exactly the
critical corners of the grid induced by the union support.

Permutation search in the style of de Rainville, Gagne, Teytaud and
Laurendeau (2012): a component-by-component (mu+lambda) evolutionary search
for digit permutations of the generalized Halton sequence, scored by the
modified L2 discrepancy.

Quality reporting evaluates requested discrepancy measures per named point
set, exact where the budget allows, falling back to bound intervals.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import l2, lp
from ._simplex import LPError, solve_lp
from .generators import PermutationConfig, halton, primes, random_permutation
from .linf_approx import TAConfig, cover_bounds, ta_improved
from .linf_exact import _count_tensor, star_exact
from .pointset import BudgetExceededError

__all__ = [
    "DiscreteMeasure",
    "ReductionResult",
    "two_measure_star_disc",
    "optimal_inner_weights",
    "forward_selection",
    "backward_selection",
    "optimize_halton_permutations",
    "quality_report",
    "ReportCell",
    "LPError",
]


@dataclass(frozen=True)
class DiscreteMeasure:
    """Probability measure with finitely many distinct atoms in [0,1]^d."""

    atoms: np.ndarray
    probabilities: np.ndarray

    def __init__(self, atoms, probabilities, d: int | None = None):
        a = np.asarray(atoms, dtype=np.float64)
        if a.ndim == 1:
            a = a.reshape(-1, 1) if d in (None, 1) else a.reshape(1, -1)
        p = np.asarray(probabilities, dtype=np.float64).reshape(-1)
        if a.shape[0] != p.shape[0]:
            raise ValueError("one probability per atom required")
        if a.shape[0] < 1:
            raise ValueError("need at least one atom")
        if np.any(a < 0.0) or np.any(a > 1.0):
            raise ValueError("atoms must lie in [0, 1]^d")
        if np.any(p < 0.0):
            raise ValueError("probabilities must be nonnegative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1")
        if len({tuple(row) for row in a}) != a.shape[0]:
            raise ValueError("atoms must be pairwise distinct")
        a, p = a.copy(), p.copy()
        a.flags.writeable = False
        p.flags.writeable = False
        object.__setattr__(self, "atoms", a)
        object.__setattr__(self, "probabilities", p)

    @property
    def n(self) -> int:
        return self.atoms.shape[0]

    @property
    def d(self) -> int:
        return self.atoms.shape[1]

    @classmethod
    def uniform(cls, atoms, d: int | None = None) -> "DiscreteMeasure":
        a = np.asarray(atoms, dtype=np.float64)
        if a.ndim == 1:
            a = a.reshape(-1, 1) if d in (None, 1) else a.reshape(1, -1)
        return cls(a, np.full(a.shape[0], 1.0 / a.shape[0]))


def _union_axes(points: np.ndarray) -> tuple[list, list]:
    d = points.shape[1]
    plain = [np.unique(points[:, j]) for j in range(d)]
    aug = [np.unique(np.append(points[:, j], 1.0)) for j in range(d)]
    return plain, aug


def _grid_budget_check(axes: list, budget: int, what: str) -> None:
    size = 1
    for a in axes:
        size *= len(a)
    if size > budget:
        raise BudgetExceededError(
            f"{what} needs {size} grid corners, exceeding the budget of "
            f"{budget}; keep supports small or the dimension at 3 or less")


def two_measure_star_disc(P: DiscreteMeasure, Q: DiscreteMeasure,
                          budget: int = 20_000_000) -> float:
    """Anchored-box distance sup_B |P(B) - Q(B)| of two discrete measures.

    Both measures are piecewise constant on the grid induced by the union of
    the supports, so the supremum over open boxes is attained on the
    augmented union grid and over closed boxes on the plain union grid; both
    are enumerated.
    """
    if P.d != Q.d:
        raise ValueError("measures must share the dimension")
    pts = np.vstack([P.atoms, Q.atoms])
    w = np.concatenate([P.probabilities, -Q.probabilities])
    plain, aug = _union_axes(pts)
    _grid_budget_check(aug, budget, "two-measure distance")
    best = 0.0
    open_diff = _count_tensor(aug, pts, w, "open")
    best = max(best, float(np.max(np.abs(open_diff))))
    del open_diff
    closed_diff = _count_tensor(plain, pts, w, "closed")
    best = max(best, float(np.max(np.abs(closed_diff))))
    return best


def _critical_corner_masks(points: np.ndarray, plain: list, aug: list):
    """Boolean tensors marking critical corners of the induced grids.

    Open side (augmented grid): a corner is critical when in every coordinate
    either the value is 1 or some point sits exactly at the value while lying
    strictly inside the box in all other coordinates.  Closed side (plain
    grid): some point sits at the value while lying weakly inside elsewhere.
    """
    d = points.shape[1]
    shape_aug = tuple(len(a) for a in aug)
    open_mask = np.ones(shape_aug, dtype=bool)
    for j in range(d):
        hit = np.zeros(shape_aug, dtype=np.int64)
        idx = np.empty((points.shape[0], d), dtype=np.int64)
        for k in range(d):
            if k == j:
                idx[:, k] = np.searchsorted(aug[k], points[:, k], side="left")
            else:
                idx[:, k] = np.searchsorted(aug[k], points[:, k], side="right")
        ok = np.all(idx < np.array(shape_aug), axis=1)
        # exact hit required in coordinate j
        ok &= aug[j][np.minimum(idx[:, j], shape_aug[j] - 1)] == points[:, j]
        if np.any(ok):
            flat = np.ravel_multi_index(tuple(idx[ok].T), shape_aug)
            np.add.at(hit.reshape(-1), flat, 1)
        for ax in range(d):
            if ax != j:
                np.cumsum(hit, axis=ax, out=hit)
        crit_j = hit > 0
        # a coordinate at 1 needs no enlargement witness
        sel = [slice(None)] * d
        sel[j] = slice(shape_aug[j] - 1, shape_aug[j])
        crit_j[tuple(sel)] = True
        open_mask &= crit_j

    shape_plain = tuple(len(a) for a in plain)
    closed_mask = np.ones(shape_plain, dtype=bool)
    for j in range(d):
        hit = np.zeros(shape_plain, dtype=np.int64)
        idx = np.empty((points.shape[0], d), dtype=np.int64)
        for k in range(d):
            idx[:, k] = np.searchsorted(plain[k], points[:, k], side="left")
        ok = np.all(idx < np.array(shape_plain), axis=1)
        if np.any(ok):
            flat = np.ravel_multi_index(tuple(idx[ok].T), shape_plain)
            np.add.at(hit.reshape(-1), flat, 1)
        for ax in range(d):
            if ax != j:
                np.cumsum(hit, axis=ax, out=hit)
        closed_mask &= hit > 0
    return open_mask, closed_mask


def optimal_inner_weights(P: DiscreteMeasure, support_idx,
                          budget: int = 2_000_000) -> tuple[np.ndarray, float]:
    """Best probabilities on a fixed support subset, by linear programming.

    Minimizes t subject to |P(B) - sum_i q_i 1_B(y_i)| <= t over the
    supporting boxes (critical corners of the union-support grids), with the
    q_i a probability vector.  Returns (q, t).
    """
    support_idx = sorted(set(int(i) for i in support_idx))
    if not support_idx:
        raise ValueError("support subset must be nonempty")
    if any(i < 0 or i >= P.n for i in support_idx):
        raise ValueError("support indices out of range")
    Y = P.atoms[support_idx]
    m = len(support_idx)
    plain, aug = _union_axes(P.atoms)
    _grid_budget_check(aug, budget, "inner weight optimization")

    open_mask, closed_mask = _critical_corner_masks(P.atoms, plain, aug)

    # per-box data: membership row for each support atom and P's mass
    rows, rhs = [], []
    pm = _count_tensor(aug, P.atoms, P.probabilities, "open")
    open_idx = np.argwhere(open_mask)
    for t in open_idx:
        y = np.array([aug[j][t[j]] for j in range(P.d)])
        rows.append(np.all(Y < y, axis=1).astype(float))
        rhs.append(float(pm[tuple(t)]))
    del pm
    pmc = _count_tensor(plain, P.atoms, P.probabilities, "closed")
    closed_idx = np.argwhere(closed_mask)
    for t in closed_idx:
        y = np.array([plain[j][t[j]] for j in range(P.d)])
        rows.append(np.all(Y <= y, axis=1).astype(float))
        rhs.append(float(pmc[tuple(t)]))
    del pmc

    B = len(rows)
    # variables: q_1..q_m, t, then one slack per inequality (2B of them)
    nvar = m + 1 + 2 * B
    A = np.zeros((2 * B + 1, nvar))
    b = np.zeros(2 * B + 1)
    for r in range(B):
        # q.a - t <= P(B)   ->  q.a - t + s = P(B)
        A[r, :m] = rows[r]
        A[r, m] = -1.0
        A[r, m + 1 + r] = 1.0
        b[r] = rhs[r]
        # q.a + t >= P(B)   ->  q.a + t - s' = P(B)
        A[B + r, :m] = rows[r]
        A[B + r, m] = 1.0
        A[B + r, m + 1 + B + r] = -1.0
        b[B + r] = rhs[r]
    A[2 * B, :m] = 1.0
    b[2 * B] = 1.0
    c = np.zeros(nvar)
    c[m] = 1.0
    x, obj = solve_lp(c, A, b)
    q = np.maximum(x[:m], 0.0)
    q /= q.sum()
    return q, float(obj)


@dataclass(frozen=True)
class ReductionResult:
    """Reduced measure with its achieved distance and the selection trace."""

    measure: DiscreteMeasure
    support_idx: tuple
    distance: float
    trace: tuple  # ((support size, distance), ...)


def _nearest_mass_weights(P: DiscreteMeasure, support_idx: list) -> np.ndarray:
    """Fast heuristic weights: each atom's mass goes to its nearest kept atom."""
    Y = P.atoms[support_idx]
    d2 = np.sum((P.atoms[:, None, :] - Y[None, :, :]) ** 2, axis=2)
    assign = np.argmin(d2, axis=1)
    q = np.zeros(len(support_idx))
    np.add.at(q, assign, P.probabilities)
    return q


def _measure_on(P: DiscreteMeasure, support_idx: list, q: np.ndarray) -> DiscreteMeasure:
    return DiscreteMeasure(P.atoms[support_idx], q)


def _inner_distance(P: DiscreteMeasure, support_idx: list, exact_inner: bool,
                    budget: int) -> tuple[np.ndarray, float]:
    if exact_inner:
        q, t = optimal_inner_weights(P, support_idx, budget)
    else:
        q = _nearest_mass_weights(P, support_idx)
        t = two_measure_star_disc(P, _measure_on(P, support_idx, q), budget)
    return q, t


def forward_selection(P: DiscreteMeasure, n: int, exact_inner: bool = False,
                      budget: int = 2_000_000) -> ReductionResult:
    """Grow the support greedily, one atom at a time, smallest distance first."""
    if not (1 <= n <= P.n):
        raise ValueError("need 1 <= n <= number of atoms")
    chosen: list[int] = []
    trace = []
    q = np.array([1.0])
    dist = np.inf
    while len(chosen) < n:
        best = None
        for cand in range(P.n):
            if cand in chosen:
                continue
            trial = chosen + [cand]
            qc, t = _inner_distance(P, trial, exact_inner, budget)
            if best is None or t < best[1] - 1e-15:
                best = (cand, t, qc)
        chosen.append(best[0])
        dist, q = best[1], best[2]
        trace.append((len(chosen), dist))
    idx = sorted(chosen)
    q_final, dist_final = _inner_distance(P, idx, exact_inner, budget)
    return ReductionResult(_measure_on(P, idx, q_final), tuple(idx),
                           dist_final, tuple(trace))


def backward_selection(P: DiscreteMeasure, n: int, exact_inner: bool = False,
                       budget: int = 2_000_000) -> ReductionResult:
    """Shrink the support greedily from the full set, best removal first."""
    if not (1 <= n <= P.n):
        raise ValueError("need 1 <= n <= number of atoms")
    chosen = list(range(P.n))
    trace = [(P.n, 0.0)]
    while len(chosen) > n:
        best = None
        for cand in chosen:
            trial = [i for i in chosen if i != cand]
            qc, t = _inner_distance(P, trial, exact_inner, budget)
            if best is None or t < best[1] - 1e-15:
                best = (cand, t, qc)
        chosen.remove(best[0])
        trace.append((len(chosen), best[1]))
    idx = sorted(chosen)
    q_final, dist_final = _inner_distance(P, idx, exact_inner, budget)
    return ReductionResult(_measure_on(P, idx, q_final), tuple(idx),
                           dist_final, tuple(trace))


# ---------------------------------------------------------------------------
# evolutionary search for generalized Halton permutations
# ---------------------------------------------------------------------------

def _mutate_permutation(pi: np.ndarray, rng) -> np.ndarray:
    """Swap each non-fixed position with probability 2/p with a random partner."""
    p = len(pi)
    out = pi.copy()
    if p <= 2:
        return out
    for pos in range(1, p):
        if rng.random() < 2.0 / p:
            other = rng.integers(1, p)
            out[pos], out[other] = out[other], out[pos]
    return out


def _crossover_permutations(pa: np.ndarray, pb: np.ndarray, rng) -> np.ndarray:
    """Recombine by iteratively swapping value pairs of the first parent
    toward the second, at a fair coin per position."""
    p = len(pa)
    child = pa.copy()
    pos_of = np.empty(p, dtype=np.int64)
    pos_of[child] = np.arange(p)
    for pos in range(1, p):
        if child[pos] != pb[pos] and rng.random() < 0.5:
            other = pos_of[pb[pos]]
            child[pos], child[other] = child[other], child[pos]
            pos_of[child[pos]] = pos
            pos_of[child[other]] = other
    return child


def optimize_halton_permutations(d: int, n_points: int, mu: int, lam: int,
                                 generations: int, seed: int = 0) -> PermutationConfig:
    """Component-by-component evolutionary search for digit permutations.

    For each coordinate in turn, a (mu+lambda) elitist EA over zero-fixing
    permutations of the coordinate's prime base minimizes the squared
    modified L2 discrepancy of the first ``n_points`` generalized Halton
    points projected onto the coordinates fixed so far.  The identity is
    always seeded, and the final configuration is never worse than the plain
    Halton configuration under the same fitness.
    """
    if min(d, n_points, mu, lam, generations) < 1:
        raise ValueError("all parameters must be >= 1")
    rng = np.random.default_rng(seed)
    bases = primes(d)
    chosen: list[np.ndarray] = []

    def fitness(perm_lists: list) -> float:
        cfg = PermutationConfig(perm_lists)
        X = halton(n_points, len(perm_lists), cfg)
        return l2.modified_l2_sq(X)

    for j, p in enumerate(bases):
        identity = np.arange(p)
        if p == 2:
            chosen.append(identity)
            continue
        prefix = [q.tolist() for q in chosen]
        cache: dict[tuple, float] = {}

        def fit(pi: np.ndarray) -> float:
            key = tuple(pi.tolist())
            if key not in cache:
                cache[key] = fitness(prefix + [pi.tolist()])
            return cache[key]

        pop = [identity] + [np.array(random_permutation(p, rng)) for _ in range(mu - 1)]
        pop = pop[:mu]
        fits = [fit(q) for q in pop]
        for _ in range(generations):
            offspring = []
            for _ in range(lam):
                pa, pb = rng.integers(0, len(pop), size=2)
                child = _crossover_permutations(pop[pa], pop[pb], rng)
                child = _mutate_permutation(child, rng)
                offspring.append(child)
            allpop = pop + offspring
            allfits = fits + [fit(q) for q in offspring]
            order = sorted(range(len(allpop)), key=lambda i: allfits[i])[:mu]
            pop = [allpop[i] for i in order]
            fits = [allfits[i] for i in order]
        chosen.append(pop[0])

    result = PermutationConfig([q.tolist() for q in chosen])
    identity_cfg = PermutationConfig.identity(d)
    fit_res = l2.modified_l2_sq(halton(n_points, d, result))
    fit_id = l2.modified_l2_sq(halton(n_points, d, identity_cfg))
    return result if fit_res <= fit_id else identity_cfg


# ---------------------------------------------------------------------------
# quality report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReportCell:
    set_name: str
    measure: str
    value: float | None
    lower: float | None
    upper: float | None
    method: str
    seed: int | None
    wall_time: float
    error: str | None = None


def quality_report(sets: dict, measures: list, exact_budget: int = 50_000_000,
                   delta: float = 0.1, ta_iterations: int = 2000,
                   restarts: int = 3, seed: int = 0,
                   lp_p: int = 4) -> list[ReportCell]:
    """Evaluate each requested measure on each named point set.

    Exact methods run where the budget allows; the star discrepancy falls
    back to a [heuristic lower, cover upper] interval otherwise.  Per-cell
    failures are recorded in the cell, never raised.
    """
    out: list[ReportCell] = []
    for name in sorted(sets):
        X = sets[name]
        for measure in measures:
            t0 = time.perf_counter()
            value = lower = upper = None
            method = measure
            cell_seed = None
            err = None
            try:
                if measure == "star-linf":
                    try:
                        res = star_exact(X, exact_budget)
                        value = res.value
                        method = {1: "1d", 2: "2d", 3: "3d"}.get(X.d, "dem")
                    except BudgetExceededError:
                        cell_seed = seed
                        best = -np.inf
                        for r in range(restarts):
                            cfg = TAConfig(ta_iterations, seed=seed + r)
                            best = max(best, ta_improved(X, cfg).lower)
                        try:
                            upper = cover_bounds(X, delta).upper
                        except BudgetExceededError:
                            upper = 1.0
                        lower = best
                        method = "ta-lower/cover-upper"
                elif measure == "star-l2":
                    value = l2.warnock_star_l2_sq(X)
                    method = "warnock"
                elif measure == "extreme-l2":
                    value = l2.extreme_l2_sq(X)
                    method = "direct"
                elif measure == "modified-l2":
                    value = l2.modified_l2_sq(X)
                    method = "warnock-weighted"
                elif measure == "lp-even":
                    value = lp.weighted_star_lp_pow(X, np.ones(X.d), lp_p)
                    method = f"direct-p{lp_p}"
                elif measure == "cover-upper":
                    res = cover_bounds(X, delta)
                    lower, upper = res.lower, res.upper
                    method = "cover"
                elif measure == "ta-lower":
                    cell_seed = seed
                    best = -np.inf
                    for r in range(restarts):
                        cfg = TAConfig(ta_iterations, seed=seed + r)
                        best = max(best, ta_improved(X, cfg).lower)
                    lower, upper = best, 1.0
                    method = "ta-improved"
                else:
                    raise ValueError(f"unknown measure {measure!r}")
            except Exception as exc:  # recorded, never raised
                err = f"{type(exc).__name__}: {exc}"
            out.append(ReportCell(name, measure, value, lower, upper, method,
                                  cell_seed, time.perf_counter() - t0, err))
    return out
