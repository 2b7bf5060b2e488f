#!/usr/bin/env python3
"""Measure where the divide-and-conquer L2 path overtakes direct evaluation.

The direct Warnock evaluation costs O(d n^2) while the recursive path runs in
O(n log^(d-1) n) for fixed d; the guidance is that the recursion wins once n
exceeds roughly 2^(2d).  This script times both on random sets and reports
the observed crossover per dimension.
"""

import argparse
import time

import numpy as np

from discrepkit import PointSet, WeightedPointSet, star_l2_sq_fast, warnock_star_l2_sq


def time_once(fn, *args) -> float:
    t0 = time.perf_counter()
    fn(*args)
    return time.perf_counter() - t0


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--dims", default="1,2,3,4")
    ap.add_argument("--max-log-n", type=int, default=13)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"{'d':>3} {'n':>7} {'direct[s]':>10} {'fast[s]':>10} {'ratio':>7}")
    for d in [int(t) for t in args.dims.split(",")]:
        crossover = None
        for log_n in range(6, args.max_log_n + 1):
            n = 2 ** log_n
            X = PointSet(rng.random((n, d)))
            Q = WeightedPointSet.equal_weights(X)
            t_direct = time_once(warnock_star_l2_sq, X)
            t_fast = time_once(star_l2_sq_fast, Q)
            ratio = t_direct / max(t_fast, 1e-9)
            print(f"{d:>3} {n:>7} {t_direct:>10.4f} {t_fast:>10.4f} {ratio:>7.2f}")
            if crossover is None and t_fast < t_direct:
                crossover = n
        guide = 2 ** (2 * d)
        print(f"  d={d}: observed crossover n={crossover}, "
              f"2^(2d) guidance n={guide}\n")


if __name__ == "__main__":
    main()
