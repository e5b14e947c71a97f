#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy fallbacks.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]

Run with FEDFRAUD_NUMBA=0 to confirm the package itself falls back cleanly;
this script always times both implementations directly.
"""

import argparse
import time

import numpy as np

from fedfraud import kernels


def timeit(fn, *args, repeats=5):
    fn(*args)  # warm-up (numba compilation happens here)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_sigmoid(repeats):
    z = np.random.default_rng(0).normal(scale=5.0, size=2_000_000)
    rows = [("sigmoid/numpy", timeit(kernels._sigmoid_flat_np, z, repeats=repeats))]
    if kernels.HAVE_NUMBA:
        rows.append(("sigmoid/numba", timeit(kernels._sigmoid_flat_nb, z,
                                             repeats=repeats)))
    return rows


def bench_best_split(repeats):
    rng = np.random.default_rng(1)
    X = rng.normal(size=(20_000, 30))
    y = rng.integers(0, 2, size=20_000).astype(np.float64)
    rows = [("best_split/numpy", timeit(kernels._best_split_np, X, y, 5,
                                        repeats=repeats))]
    if kernels.HAVE_NUMBA:
        rows.append(("best_split/numba", timeit(kernels._best_split_nb, X, y, 5,
                                                repeats=repeats)))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if not kernels.HAVE_NUMBA:
        print("numba not importable; timing numpy fallbacks only\n")

    rows = bench_sigmoid(args.repeats) + bench_best_split(args.repeats)
    print(f"{'kernel':<20} {'best of ' + str(args.repeats):>12}")
    for name, t in rows:
        print(f"{name:<20} {t * 1e3:>10.2f}ms")

    for kernel in ("sigmoid", "best_split"):
        times = {n.split("/")[1]: t for n, t in rows if n.startswith(kernel)}
        if "numba" in times:
            print(f"{kernel}: numba speedup {times['numpy'] / times['numba']:.1f}x")


if __name__ == "__main__":
    main()
