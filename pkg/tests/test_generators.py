from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from discrepkit import (Graph, PermutationConfig, PointSet,
                        dominating_set_instance, halton, midpoint_set, primes,
                        radical_inverse, rank1_lattice, random_permutation,
                        reverse_permutation, scrambled_radical_inverse,
                        star_1d)


def digit_loop_inverse(i, p, pi=None):
    """Independent digit-expansion oracle using exact fractions."""
    out = Fraction(0)
    scale = Fraction(1, p)
    while i > 0:
        i, digit = divmod(i, p)
        if pi is not None:
            digit = pi[digit]
        out += digit * scale
        scale /= p
    return float(out)


class TestPrimes:
    def test_first_ten(self):
        assert primes(10) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]

    def test_empty(self):
        assert primes(0) == []


class TestRadicalInverse:
    def test_base2_singles(self):
        assert radical_inverse(1, 2) == 0.5
        assert radical_inverse(3, 2) == 0.75

    def test_base3(self):
        assert radical_inverse(5, 3) == pytest.approx(7 / 9, rel=4e-16)

    def test_rejects_nonprime(self):
        with pytest.raises(ValueError):
            radical_inverse(1, 4)

    def test_rejects_zero_index(self):
        with pytest.raises(ValueError):
            radical_inverse(0, 2)

    def test_injective_prefix(self):
        for p in (2, 3, 5):
            vals = [radical_inverse(i, p) for i in range(1, 10001)]
            assert len(set(vals)) == len(vals)

    @given(st.integers(1, 10 ** 6), st.sampled_from([2, 3, 5, 7, 11]))
    @settings(max_examples=80, deadline=None)
    def test_matches_fraction_oracle(self, i, p):
        # one rounding per digit is allowed; base 2 stays exact
        tol = 0.0 if p == 2 else 5e-16
        assert radical_inverse(i, p) == pytest.approx(digit_loop_inverse(i, p), rel=tol, abs=0)


class TestScrambledRadicalInverse:
    def test_identity_reproduces_plain(self):
        for p in (2, 3, 5):
            ident = list(range(p))
            for i in range(1, 50):
                assert scrambled_radical_inverse(i, p, ident) == radical_inverse(i, p)

    def test_reverse_base3(self):
        rev = reverse_permutation(3)
        assert scrambled_radical_inverse(1, 3, rev) == pytest.approx(2 / 3, rel=4e-16)
        assert scrambled_radical_inverse(4, 3, rev) == pytest.approx(8 / 9, rel=4e-16)

    def test_rejects_nonzero_fixpoint(self):
        with pytest.raises(ValueError):
            scrambled_radical_inverse(1, 3, [1, 0, 2])

    @given(st.integers(1, 10 ** 5), st.sampled_from([3, 5, 7]), st.integers(0, 999))
    @settings(max_examples=60, deadline=None)
    def test_matches_fraction_oracle(self, i, p, seed):
        pi = random_permutation(p, seed)
        assert scrambled_radical_inverse(i, p, pi) == pytest.approx(
            digit_loop_inverse(i, p, pi), rel=5e-16, abs=0)


class TestPermutations:
    def test_reverse_small(self):
        assert reverse_permutation(2) == [0, 1]
        assert reverse_permutation(3) == [0, 2, 1]
        assert reverse_permutation(5) == [0, 4, 3, 2, 1]

    def test_random_base2_forced(self):
        for seed in range(5):
            assert random_permutation(2, seed) == [0, 1]

    def test_random_base3_both_arise(self):
        seen = {tuple(random_permutation(3, seed)) for seed in range(40)}
        assert seen == {(0, 1, 2), (0, 2, 1)}

    def test_random_repeatable(self):
        assert random_permutation(13, 7) == random_permutation(13, 7)

    def test_config_accepts_matching_bases(self):
        cfg = PermutationConfig([[0, 1], [0, 2, 1]])
        assert cfg.d == 2

    def test_config_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            PermutationConfig([[0, 1], [0, 1]])  # second base is 3

    def test_config_rejects_moved_zero(self):
        with pytest.raises(ValueError):
            PermutationConfig([[1, 0]])


class TestHalton:
    def test_first_three_points_2d(self):
        X = halton(3, 2)
        want = np.array([[0.5, 1 / 3], [0.25, 2 / 3], [0.75, 1 / 9]])
        assert np.allclose(X.points, want, rtol=5e-16, atol=0)

    def test_reverse_base2_is_identity(self):
        X = halton(1, 1, PermutationConfig.reverse(1))
        assert X.points[0, 0] == 0.5

    def test_output_in_open_cube(self):
        X = halton(200, 5)
        assert np.all(X.points > 0.0) and np.all(X.points < 1.0)

    def test_identity_config_matches_plain(self):
        X1 = halton(64, 4)
        X2 = halton(64, 4, PermutationConfig.identity(4))
        assert np.array_equal(X1.points, X2.points)

    def test_short_config_rejected(self):
        with pytest.raises(ValueError):
            halton(4, 3, PermutationConfig.reverse(2))


class TestLattice:
    def test_fibonacci_like(self):
        X = rank1_lattice(4, [1, 3])
        want = [[0.0, 0.0], [0.25, 0.75], [0.5, 0.5], [0.75, 0.25]]
        assert X.points.tolist() == want

    def test_single_point(self):
        assert rank1_lattice(1, [1, 1]).points.tolist() == [[0.0, 0.0]]

    def test_1d_equispaced(self):
        X = rank1_lattice(5, [1])
        assert X.points[:, 0].tolist() == [0.0, 0.2, 0.4, 0.6, 0.8]


class TestMidpoints:
    def test_small(self):
        assert midpoint_set(1).points.tolist() == [[0.5]]
        assert midpoint_set(2).points.tolist() == [[0.25], [0.75]]

    def test_star_discrepancy_is_half_over_n(self):
        for n in (1, 2, 5, 17):
            assert star_1d(midpoint_set(n)).value == pytest.approx(1 / (2 * n), abs=1e-16)


class TestDominatingSetInstance:
    def test_path_graph_example(self):
        G = Graph(3, [(0, 1), (1, 2)])
        X = dominating_set_instance(G, 0.5, 0.0)
        want = [[0.5, 0.5, 0.0], [0.5, 0.5, 0.5], [0.0, 0.5, 0.5]]
        assert X.points.tolist() == want
        assert oracles.largest_empty_box_volume(X.points) == 0.5

    def test_complete_graph(self):
        G = Graph(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
        X = dominating_set_instance(G, 0.5, 0.0)
        assert np.all(X.points == 0.5)
        assert oracles.largest_empty_box_volume(X.points) == 0.5

    def test_edgeless_graph(self):
        G = Graph(3, [])
        X = dominating_set_instance(G, 0.5, 0.0)
        assert oracles.largest_empty_box_volume(X.points) == 0.5 ** 3

    def test_parameter_condition(self):
        G = Graph(3, [(0, 1)])
        with pytest.raises(ValueError):
            dominating_set_instance(G, 0.5, 0.2)  # beta >= alpha^3

    @given(st.integers(1, 7), st.integers(0, 10 ** 6))
    @settings(max_examples=40, deadline=None)
    def test_empty_box_encodes_domination_number(self, n, seed):
        rng = np.random.default_rng(seed)
        G = Graph.random(n, 0.45, rng)
        X = dominating_set_instance(G, 0.5, 0.0)
        gamma = oracles.domination_number(n, G.edges)
        assert oracles.largest_empty_box_volume(X.points) == 0.5 ** gamma
