#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the three hot paths of explanation scoring: single ranking-gain
evaluation, batch evaluation over a permutation null, and logistic training.
The active backend for library calls is selected with QGFORGE_KERNELS; this
script always times both implementations directly.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from qgforge.xai import kernels


def _time(fn, *args, repeats: int) -> float:
    fn(*args)  # warm up (and JIT-compile the numba path)
    start = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - start) / repeats


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()

    if "numba" not in kernels._BACKENDS:
        print("numba is not importable; nothing to compare")
        return 1

    rng = np.random.default_rng(0)
    d = 32
    reference = np.abs(rng.standard_normal(d)) + 0.01
    candidate = rng.standard_normal(d)
    perms = rng.permuted(np.tile(np.arange(d), (5000, 1)), axis=1)
    candidates = reference[perms]
    x = rng.standard_normal((2000, 16))
    y = (rng.standard_normal(2000) > 0).astype(np.float64)

    cases = [
        ("ndcg (single, d=32)",
         (kernels.ndcg_numpy, kernels.ndcg_numba),
         (reference, candidate)),
        ("ndcg (batch 5000, d=32)",
         (kernels.ndcg_many_numpy, kernels.ndcg_many_numba),
         (reference, candidates)),
        ("logistic fit (2000x16, 300 iters)",
         (kernels.logistic_fit_numpy, kernels.logistic_fit_numba),
         (x, y, 0.5, 300)),
    ]

    print(f"active backend for library calls: {kernels.active_backend()}")
    print(f"{'kernel':<36} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for label, (np_fn, nb_fn), fn_args in cases:
        t_np = _time(np_fn, *fn_args, repeats=args.repeats)
        t_nb = _time(nb_fn, *fn_args, repeats=args.repeats)
        print(f"{label:<36} {t_np * 1e6:>10.1f}us {t_nb * 1e6:>10.1f}us {t_np / t_nb:>8.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
