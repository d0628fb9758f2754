#!/usr/bin/env python3
"""Time the compiled kernels against the NumPy fallback.

Runs the hot paths of training (batch forward + backward) and scoring
(histogram lookups) on representative sizes and prints a comparison.

Usage: python benchmarks/bench_kernels.py [--repeats 50]
"""

import argparse
import time

import numpy as np

from docnids import _kernels_py

try:
    from docnids import _kernels
except ImportError:
    _kernels = None


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(repeats):
    rng = np.random.default_rng(0)
    dims = [16, 32, 8]
    weights = [rng.normal(size=(o, i)) for i, o in zip(dims[:-1], dims[1:])]
    x = rng.uniform(size=(256, 16))
    delta = rng.normal(size=(256, 8))
    slope = 0.01

    d, k = 8, 10
    lo = np.zeros(d)
    width = np.full(d, 0.1)
    heights = rng.uniform(0.1, 1.0, size=(d, k))
    z = rng.uniform(-0.5, 1.5, size=(5000, d))

    cases = {
        "forward 256x[16,32,8]": lambda m: m.forward_pass(weights, x, slope),
        "forward+backward": lambda m: m.backward_pass(
            weights, m.forward_pass(weights, x, slope), delta, slope
        ),
        "hbos 5000x8 (k=10)": lambda m: m.hbos_scores(lo, width, heights, z, 1e-6),
    }

    backends = [("numpy", _kernels_py)]
    if _kernels is not None:
        backends.append(("cython", _kernels))
    else:
        print("compiled extension not available; timing the fallback only\n")

    print(f"{'kernel':<24}" + "".join(f"{name:>12}" for name, _ in backends) + f"{'speedup':>10}")
    for label, call in cases.items():
        times = [timeit(lambda m=mod: call(m), repeats) for _, mod in backends]
        row = f"{label:<24}" + "".join(f"{t * 1e6:>10.0f}us" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.2f}x"
        print(row)


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=50)
    bench(parser.parse_args().repeats)
