#!/usr/bin/env python3
"""Timing comparison of the compiled kernels against the numpy fallback.

Runs each kernel on representative workloads and prints the per-call medians
side by side.  Usage:

    python3 benchmarks/bench_kernels.py [--repeats N] [--samples N]
"""

import argparse
import statistics
import time

import numpy as np

from mixsynth import _backend
from mixsynth import _kernels_py as pure

try:
    from mixsynth import _kernels as compiled
except ImportError:
    compiled = None


def timed(fn, repeats):
    out = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return statistics.median(out)


def workloads(rng, n_samples):
    herm4 = []
    for _ in range(200):
        g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        herm4.append((g + g.conj().T) / 2.0)
    samples = rng.standard_normal((n_samples, 2)) \
        + 1j * rng.standard_normal((n_samples, 2))
    samples /= np.linalg.norm(samples, axis=1, keepdims=True)
    points = rng.standard_normal((500, 2)) \
        + 1j * rng.standard_normal((500, 2))
    points /= np.linalg.norm(points, axis=1, keepdims=True)
    center_pure = points[0]
    g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    center_mixed = g @ g.conj().T
    center_mixed /= np.trace(center_mixed).real
    return [
        ("jacobi_eigh (200 x 4x4)",
         lambda impl: [impl.jacobi_eigh(h) for h in herm4]),
        (f"max_sq_overlap ({n_samples} x 500)",
         lambda impl: impl.max_sq_overlap(samples, points)),
        (f"count_within_pure ({n_samples})",
         lambda impl: impl.count_within_pure(samples, center_pure, 0.3)),
        (f"count_within_mixed ({n_samples})",
         lambda impl: impl.count_within_mixed(samples, center_mixed, 0.3)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=7)
    parser.add_argument("--samples", type=int, default=50_000)
    args = parser.parse_args()

    print(f"active backend: {_backend.IMPL}")
    if compiled is None:
        print("compiled extension not available; timing the fallback only")
    rng = np.random.default_rng(0)

    header = f"{'kernel':36s} {'python':>10s}"
    if compiled is not None:
        header += f" {'compiled':>10s} {'speedup':>9s}"
    print(header)
    print("-" * len(header))
    for name, run in workloads(rng, args.samples):
        t_py = timed(lambda: run(pure), args.repeats)
        line = f"{name:36s} {t_py * 1e3:9.2f}ms"
        if compiled is not None:
            t_cy = timed(lambda: run(compiled), args.repeats)
            line += f" {t_cy * 1e3:9.2f}ms {t_py / t_cy:8.1f}x"
        print(line)


if __name__ == "__main__":
    main()
