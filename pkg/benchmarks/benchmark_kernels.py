#!/usr/bin/env python3
"""Compare the numba-compiled dense kernel against the pure-numpy fallback.

Times rank computations over GF(2^63 - 25) (the Montgomery path) and GF(p)
for a 31-bit prime (the direct path) on random dense matrices, plus one
end-to-end operad computation through each kernel.
"""

from __future__ import annotations

import os
import time

import numpy as np

PROBE = 2**63 - 25
SMALL_PRIME = 2**31 - 1


def _time(fn, *args, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return result, best


def _time_consuming(fn, A, p, repeats=3):
    # dense_rank consumes its input, so every repeat needs a fresh copy
    best = float("inf")
    result = None
    for _ in range(repeats):
        work = A.copy()
        t0 = time.perf_counter()
        result = fn(work, p)
        best = min(best, time.perf_counter() - t0)
    return result, best


def bench_dense(kernels, sizes=(100, 300, 600)):
    rng = np.random.default_rng(12345)
    print(f"{'size':>6} {'prime':>22} " +
          " ".join(f"{name:>12}" for name, _ in kernels))
    for n in sizes:
        for p in (SMALL_PRIME, PROBE):
            A = rng.integers(0, p, size=(n, n), dtype=np.uint64)
            times, ranks = [], []
            for _, fn in kernels:
                fn(A[:2, :2].copy(), p)  # warm any JIT before timing
                rank, secs = _time_consuming(fn, A, p)
                times.append(secs)
                ranks.append(rank)
            assert len(set(ranks)) == 1, f"kernels disagree: {ranks}"
            print(f"{n:>6} {p:>22} " +
                  " ".join(f"{t * 1000:>10.1f}ms" for t in times))


def bench_end_to_end():
    from operadim.consequences import expand_consequences
    from operadim.identities import preset
    from operadim.modlinalg import PrimeField, rank_mod_p
    from operadim import kernels

    matrix = expand_consequences(preset("alternative").identities, 5)
    field = PrimeField(PROBE)
    print("\nend-to-end: rank of the alternative degree-5 consequence matrix")
    for choice in ("numba", "numpy"):
        os.environ["OPERADIM_KERNEL"] = choice
        rank_mod_p(matrix, field)  # warm-up (JIT compile on first use)
        rank, secs = _time(rank_mod_p, matrix, field, repeats=2)
        print(f"  {choice:>6}: rank {rank} in {secs:.2f}s")
    os.environ.pop("OPERADIM_KERNEL", None)


def main():
    from operadim import _kernels_numpy

    kernels = [("numpy", _kernels_numpy.dense_rank)]
    try:
        from operadim import _kernels_numba

        kernels.insert(0, ("numba", _kernels_numba.dense_rank))
    except ImportError:
        print("numba unavailable; benchmarking the numpy fallback only")

    bench_dense(kernels)
    bench_end_to_end()


if __name__ == "__main__":
    main()
