import itertools

import numpy as np
import pytest

import oracles
from conftest import random_pointset
from discrepkit import (DiscreteMeasure, PermutationConfig, PointSet,
                        backward_selection, forward_selection, halton,
                        midpoint_set, modified_l2_sq, optimal_inner_weights,
                        optimize_halton_permutations, quality_report,
                        two_measure_star_disc)
from discrepkit._simplex import LPError, solve_lp


class TestSimplex:
    def test_tiny_lp(self):
        # min -x1 - x2  s.t.  x1 + x2 + s = 1
        x, obj = solve_lp([-1.0, -1.0, 0.0], [[1.0, 1.0, 1.0]], [1.0])
        assert obj == pytest.approx(-1.0, abs=1e-12)

    def test_infeasible(self):
        # x1 + x2 = -1 with x >= 0 after sign flip becomes infeasible pair
        with pytest.raises(LPError):
            solve_lp([1.0, 1.0], [[1.0, 1.0], [1.0, 1.0]], [1.0, 2.0])

    def test_matches_scipy_on_random_instances(self):
        from scipy.optimize import linprog
        rng = np.random.default_rng(7)
        for _ in range(25):
            m, n = int(rng.integers(1, 6)), int(rng.integers(2, 8))
            A = rng.normal(size=(m, n))
            x_feas = rng.random(n)
            b = A @ x_feas  # feasible by construction
            c = rng.normal(size=n)
            ref = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
            try:
                x, obj = solve_lp(c, A, b)
            except LPError:
                assert ref.status in (2, 3)  # infeasible or unbounded
                continue
            if ref.status == 3:
                continue  # unbounded reference; Bland would have raised
            assert ref.status == 0
            assert obj == pytest.approx(ref.fun, rel=1e-7, abs=1e-7)
            assert np.allclose(A @ x, b, atol=1e-7)
            assert np.all(x >= -1e-9)


class TestDiscreteMeasure:
    def test_validation(self):
        with pytest.raises(ValueError):
            DiscreteMeasure([[0.2], [0.2]], [0.5, 0.5])  # duplicate atoms
        with pytest.raises(ValueError):
            DiscreteMeasure([[0.2], [0.4]], [0.7, 0.7])  # sums to 1.4
        with pytest.raises(ValueError):
            DiscreteMeasure([[0.2], [0.4]], [1.5, -0.5])

    def test_uniform(self):
        P = DiscreteMeasure.uniform([[0.25], [0.75]])
        assert P.probabilities.tolist() == [0.5, 0.5]


class TestTwoMeasureDistance:
    def test_identical_measures(self):
        P = DiscreteMeasure.uniform([[0.2, 0.3], [0.6, 0.9]])
        assert two_measure_star_disc(P, P) == 0.0

    def test_point_mass_example(self):
        P = DiscreteMeasure.uniform([[0.25], [0.75]])
        Q = DiscreteMeasure([[0.25]], [1.0])
        assert two_measure_star_disc(P, Q) == pytest.approx(0.5, abs=1e-15)

    def test_permutation_invariance(self):
        atoms = [[0.1, 0.2], [0.5, 0.6], [0.9, 0.1]]
        P = DiscreteMeasure.uniform(atoms)
        Q = DiscreteMeasure.uniform(atoms[::-1])
        assert two_measure_star_disc(P, Q) == 0.0

    def test_matches_brute(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            d = int(rng.integers(1, 3))
            np_, nq = int(rng.integers(1, 7)), int(rng.integers(1, 7))
            ap = rng.random((np_, d))
            aq = rng.random((nq, d))
            pp = rng.random(np_)
            pp /= pp.sum()
            pq = rng.random(nq)
            pq /= pq.sum()
            P = DiscreteMeasure(ap, pp)
            Q = DiscreteMeasure(aq, pq)
            want = oracles.two_measure_disc_brute(ap, pp, aq, pq)
            assert two_measure_star_disc(P, Q) == pytest.approx(want, abs=1e-12)


class TestInnerWeights:
    def test_full_support_is_exact(self):
        rng = np.random.default_rng(5)
        atoms = rng.random((5, 2))
        p = rng.random(5)
        p /= p.sum()
        P = DiscreteMeasure(atoms, p)
        q, t = optimal_inner_weights(P, range(5))
        assert t == pytest.approx(0.0, abs=1e-9)
        assert np.allclose(q, p, atol=1e-8)

    def test_single_atom_support_1d(self):
        P = DiscreteMeasure.uniform([[0.2], [0.5], [0.8]])
        q, t = optimal_inner_weights(P, [1])
        assert q.tolist() == [1.0]
        # forced weights: distance of P to a unit mass at 0.5
        want = oracles.two_measure_disc_brute(P.atoms, P.probabilities, [[0.5]], [1.0])
        assert t == pytest.approx(want, abs=1e-9)
        assert t == pytest.approx(1 / 3, abs=1e-9)

    def test_self_consistency_with_distance(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            d = int(rng.integers(1, 3))
            N = int(rng.integers(2, 8))
            atoms = rng.random((N, d))
            p = rng.random(N)
            p /= p.sum()
            P = DiscreteMeasure(atoms, p)
            k = int(rng.integers(1, N + 1))
            sel = sorted(rng.choice(N, size=k, replace=False).tolist())
            q, t = optimal_inner_weights(P, sel)
            Q = DiscreteMeasure(atoms[sel], q)
            assert t == pytest.approx(two_measure_star_disc(P, Q), abs=1e-9)

    def test_never_worse_than_uniform_weights(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            N, d = 6, 2
            P = DiscreteMeasure.uniform(rng.random((N, d)))
            sel = sorted(rng.choice(N, size=3, replace=False).tolist())
            q, t = optimal_inner_weights(P, sel)
            uni = DiscreteMeasure(P.atoms[sel], np.full(3, 1 / 3))
            assert t <= two_measure_star_disc(P, uni) + 1e-9


def exhaustive_best_subset(P, n):
    """Best achievable distance over all supports of size n, exact inner LP."""
    best = None
    for sel in itertools.combinations(range(P.n), n):
        _, t = optimal_inner_weights(P, sel)
        if best is None or t < best[0]:
            best = (t, sel)
    return best


class TestSelection:
    def test_forward_full_support(self):
        P = DiscreteMeasure.uniform([[0.2], [0.5], [0.8]])
        res = forward_selection(P, 3, exact_inner=True)
        assert res.distance == pytest.approx(0.0, abs=1e-9)

    def test_backward_identity(self):
        P = DiscreteMeasure.uniform([[0.2], [0.5], [0.8]])
        res = backward_selection(P, 3, exact_inner=True)
        assert res.distance == pytest.approx(0.0, abs=1e-9)
        assert res.support_idx == (0, 1, 2)

    def test_forward_two_atoms_1d(self):
        P = DiscreteMeasure.uniform([[0.25], [0.75]])
        res = forward_selection(P, 1, exact_inner=True)
        assert res.distance == pytest.approx(0.5, abs=1e-9)
        assert res.measure.n == 1

    def test_forward_single_and_full_are_optimal(self):
        # n=1 scans every singleton and n=N keeps everything, so both are
        # exhaustive by construction
        rng = np.random.default_rng(17)
        for _ in range(6):
            N = int(rng.integers(2, 7))
            P = DiscreteMeasure.uniform(np.sort(rng.random(N)).reshape(-1, 1))
            for n in (1, N):
                res = forward_selection(P, n, exact_inner=True)
                best_t, _ = exhaustive_best_subset(P, n)
                assert res.distance == pytest.approx(best_t, abs=1e-9)

    def test_forward_gap_to_exhaustive_reported(self):
        # greedy selection is a heuristic: it can miss the best subset (the
        # best singleton need not be contained in the best pair), so the gap
        # is measured and bounded, not asserted to vanish
        rng = np.random.default_rng(17)
        gaps = []
        for _ in range(8):
            N = int(rng.integers(2, 7))
            P = DiscreteMeasure.uniform(np.sort(rng.random(N)).reshape(-1, 1))
            n = int(rng.integers(1, N + 1))
            res = forward_selection(P, n, exact_inner=True)
            best_t, _ = exhaustive_best_subset(P, n)
            assert res.distance >= best_t - 1e-9
            gaps.append(res.distance - best_t)
        assert max(gaps) <= 0.5  # sanity ceiling; observed worst is ~0.2

    def test_backward_single_removal_matches_exhaustive(self):
        rng = np.random.default_rng(19)
        for _ in range(5):
            N = int(rng.integers(3, 7))
            P = DiscreteMeasure.uniform(rng.random((N, 2)))
            res = backward_selection(P, N - 1, exact_inner=True)
            best_t, _ = exhaustive_best_subset(P, N - 1)
            assert res.distance == pytest.approx(best_t, abs=1e-9)

    def test_trace_recorded_and_feasible(self):
        rng = np.random.default_rng(23)
        P = DiscreteMeasure.uniform(rng.random((8, 2)))
        res = forward_selection(P, 4, exact_inner=False)
        assert [s for s, _ in res.trace] == [1, 2, 3, 4]
        assert set(res.support_idx) <= set(range(8))
        assert res.measure.probabilities.sum() == pytest.approx(1.0, abs=1e-12)
        # reported distance recomputes through the public metric
        assert res.distance == pytest.approx(
            two_measure_star_disc(P, res.measure), abs=1e-9)

    def test_fast_and_exact_agree_on_easy_instance(self):
        P = DiscreteMeasure.uniform([[0.1], [0.5], [0.9]])
        fast = forward_selection(P, 3, exact_inner=False)
        exact = forward_selection(P, 3, exact_inner=True)
        assert fast.distance == pytest.approx(exact.distance, abs=1e-9)

    def test_forward_backward_agree_n4_to_2(self):
        # observed on this seeded family: both greedy directions land on
        # tie-equivalent distances for N=4, n=2 in one dimension
        rng = np.random.default_rng(42)
        for _ in range(20):
            P = DiscreteMeasure.uniform(np.sort(rng.random(4)).reshape(-1, 1))
            f = forward_selection(P, 2, exact_inner=True)
            b = backward_selection(P, 2, exact_inner=True)
            assert f.distance == pytest.approx(b.distance, abs=1e-9)

    def test_trace_nonincreasing_observed(self):
        # empirical property of the greedy trace on this seeded family; the
        # general claim is not guaranteed, so the seeds stay pinned
        rng = np.random.default_rng(20240911)
        for _ in range(20):
            N = int(rng.integers(3, 10))
            d = int(rng.integers(1, 3))
            P = DiscreteMeasure.uniform(rng.random((N, d)))
            res = forward_selection(P, N, exact_inner=False)
            dists = [x for _, x in res.trace]
            assert all(b <= a + 1e-12 for a, b in zip(dists, dists[1:]))


class TestPermutationOptimizer:
    def test_d1_forced_identity(self):
        cfg = optimize_halton_permutations(1, 8, mu=2, lam=2, generations=2, seed=0)
        assert cfg.permutations[0] == (0, 1)

    def test_never_worse_than_identity(self):
        for seed in range(3):
            cfg = optimize_halton_permutations(3, 32, mu=4, lam=6,
                                               generations=4, seed=seed)
            fit = modified_l2_sq(halton(32, 3, cfg))
            fit_id = modified_l2_sq(halton(32, 3))
            assert fit <= fit_id + 1e-15

    def test_reproducible(self):
        a = optimize_halton_permutations(3, 16, mu=3, lam=4, generations=3, seed=9)
        b = optimize_halton_permutations(3, 16, mu=3, lam=4, generations=3, seed=9)
        assert a.permutations == b.permutations

    def test_improves_plain_halton_d4(self):
        cfg = optimize_halton_permutations(4, 64, mu=6, lam=10,
                                           generations=8, seed=4)
        fit = modified_l2_sq(halton(64, 4, cfg))
        fit_id = modified_l2_sq(halton(64, 4))
        assert fit < fit_id


class TestQualityReport:
    def test_midpoint_star(self):
        cells = quality_report({"mid8": midpoint_set(8)}, ["star-linf"])
        cell = cells[0]
        assert cell.value == pytest.approx(1 / 16, abs=1e-15)
        assert cell.method == "1d"
        assert cell.error is None

    def test_budget_fallback_interval(self):
        rng = np.random.default_rng(2)
        X = PointSet(rng.random((40, 6)))
        cells = quality_report({"big": X}, ["star-linf"], exact_budget=1000,
                               ta_iterations=300, restarts=2, seed=5)
        cell = cells[0]
        assert cell.value is None
        assert cell.lower is not None and cell.upper is not None
        assert cell.lower <= cell.upper

    def test_errors_recorded_not_raised(self):
        cells = quality_report({"m": midpoint_set(2)}, ["no-such-measure"])
        assert cells[0].error is not None

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(31)
        X = PointSet(rng.random((12, 5)))
        a = quality_report({"x": X}, ["star-linf", "star-l2"], exact_budget=10,
                           ta_iterations=200, restarts=2, seed=7)
        b = quality_report({"x": X}, ["star-linf", "star-l2"], exact_budget=10,
                           ta_iterations=200, restarts=2, seed=7)
        for ca, cb in zip(a, b):
            assert ca.value == cb.value and ca.lower == cb.lower and ca.upper == cb.upper
