"""numba-compiled dense elimination kernels over GF(p), p < 2^63.

Large moduli use Montgomery multiplication (R = 2^64); the 128-bit products
are assembled from 32-bit halves since there is no native int128.  Small
moduli (p < 2^31) take the direct path where a*b fits in 64 bits.  All
arithmetic is uint64 with explicit casts: mixing uint64 with signed literals
would silently promote to float64 under NumPy casting rules.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U1 = np.uint64(1)
U2 = np.uint64(2)
MASK32 = np.uint64(0xFFFFFFFF)
S32 = np.uint64(32)


@njit(cache=True, nogil=True, inline="always")
def _mulhi(a, b):
    a0 = a & MASK32
    a1 = a >> S32
    b0 = b & MASK32
    b1 = b >> S32
    p00 = a0 * b0
    p01 = a0 * b1
    p10 = a1 * b0
    mid = (p00 >> S32) + (p01 & MASK32) + (p10 & MASK32)
    return a1 * b1 + (mid >> S32) + (p01 >> S32) + (p10 >> S32)


@njit(cache=True, nogil=True, inline="always")
def _mont_mul(a, b, p, pinv):
    lo = a * b
    hi = _mulhi(a, b)
    m = lo * pinv
    t = hi + _mulhi(m, p)
    if lo != np.uint64(0):
        t += U1  # lo + (m*p mod 2^64) == 2^64 exactly whenever lo != 0
    if t >= p:
        t -= p
    return t


@njit(cache=True, nogil=True)
def _mont_pow(a, e, p, pinv, one):
    result = one
    base = a
    while e > np.uint64(0):
        if e & U1:
            result = _mont_mul(result, base, p, pinv)
        base = _mont_mul(base, base, p, pinv)
        e >>= U1
    return result


@njit(cache=True, nogil=True)
def _dense_rank_mont(A, p, pinv, r1, r2):
    n_rows, n_cols = A.shape
    for i in range(n_rows):
        for j in range(n_cols):
            A[i, j] = _mont_mul(A[i, j], r2, p, pinv)  # to Montgomery form
    rank = 0
    for c in range(n_cols):
        pivot = -1
        for i in range(rank, n_rows):
            if A[i, c] != np.uint64(0):
                pivot = i
                break
        if pivot < 0:
            continue
        if pivot != rank:
            for j in range(c, n_cols):
                tmp = A[rank, j]
                A[rank, j] = A[pivot, j]
                A[pivot, j] = tmp
        inv = _mont_pow(A[rank, c], p - U2, p, pinv, r1)
        for j in range(c, n_cols):
            A[rank, j] = _mont_mul(A[rank, j], inv, p, pinv)
        for i in range(rank + 1, n_rows):
            f = A[i, c]
            if f != np.uint64(0):
                A[i, c] = np.uint64(0)
                for j in range(c + 1, n_cols):
                    v = _mont_mul(f, A[rank, j], p, pinv)
                    if A[i, j] >= v:
                        A[i, j] -= v
                    else:
                        A[i, j] += p - v
        rank += 1
        if rank == n_rows:
            break
    return rank


@njit(cache=True, nogil=True)
def _pow_small(a, e, p):
    result = np.uint64(1)
    base = a % p
    while e > np.uint64(0):
        if e & U1:
            result = (result * base) % p
        base = (base * base) % p
        e >>= U1
    return result


@njit(cache=True, nogil=True)
def _dense_rank_small(A, p):
    n_rows, n_cols = A.shape
    rank = 0
    for c in range(n_cols):
        pivot = -1
        for i in range(rank, n_rows):
            if A[i, c] != np.uint64(0):
                pivot = i
                break
        if pivot < 0:
            continue
        if pivot != rank:
            for j in range(c, n_cols):
                tmp = A[rank, j]
                A[rank, j] = A[pivot, j]
                A[pivot, j] = tmp
        inv = _pow_small(A[rank, c], p - U2, p)
        for j in range(c, n_cols):
            A[rank, j] = (A[rank, j] * inv) % p
        for i in range(rank + 1, n_rows):
            f = A[i, c]
            if f != np.uint64(0):
                A[i, c] = np.uint64(0)
                for j in range(c + 1, n_cols):
                    v = (f * A[rank, j]) % p
                    if A[i, j] >= v:
                        A[i, j] -= v
                    else:
                        A[i, j] += p - v
        rank += 1
        if rank == n_rows:
            break
    return rank


def dense_rank(A: np.ndarray, p: int) -> int:
    """Rank of A (uint64 residues mod p) over GF(p).  A is consumed."""
    if A.size == 0:
        return 0
    if p < 1 << 31:
        return int(_dense_rank_small(A, np.uint64(p)))
    pinv = (-pow(p, -1, 1 << 64)) % (1 << 64)  # p odd: every 63-bit prime > 2
    r1 = (1 << 64) % p
    r2 = (1 << 128) % p
    return int(
        _dense_rank_mont(
            A, np.uint64(p), np.uint64(pinv), np.uint64(r1), np.uint64(r2)
        )
    )
