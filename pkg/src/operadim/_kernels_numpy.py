"""Pure-numpy fallback for the dense GF(p) elimination kernels.

Same algorithms as the numba kernels, with the inner row loop replaced by
vectorized operations.  Montgomery products are assembled from 32-bit halves
in uint64 arrays; wraparound multiplication is the intended behavior.
"""

from __future__ import annotations

import numpy as np

_MASK32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)


def _mulhi_vec(a, b):
    a0 = a & _MASK32
    a1 = a >> _S32
    b0 = b & _MASK32
    b1 = b >> _S32
    p00 = a0 * b0
    p01 = a0 * b1
    p10 = a1 * b0
    mid = (p00 >> _S32) + (p01 & _MASK32) + (p10 & _MASK32)
    return a1 * b1 + (mid >> _S32) + (p01 >> _S32) + (p10 >> _S32)


def _mont_mul_vec(a, b, p, pinv):
    lo = a * b
    hi = _mulhi_vec(a, b)
    m = lo * pinv
    t = hi + _mulhi_vec(m, p) + (lo != 0).astype(np.uint64)
    return np.where(t >= p, t - p, t)


def _dense_rank_mont(A, p, pinv, r2):
    n_rows, n_cols = A.shape
    A[:] = _mont_mul_vec(A, np.uint64(r2), p, pinv)
    big_p = int(p)
    r_inv = pow(1 << 64, -1, big_p)
    rank = 0
    for c in range(n_cols):
        col = A[rank:, c]
        nz = np.nonzero(col)[0]
        if len(nz) == 0:
            continue
        pivot = rank + int(nz[0])
        if pivot != rank:
            A[[rank, pivot], c:] = A[[pivot, rank], c:]
        # scalar inverse in plain Python, then back into Montgomery form
        value = int(A[rank, c]) * r_inv % big_p
        inv_mont = pow(value, -1, big_p) * ((1 << 64) % big_p) % big_p
        A[rank, c:] = _mont_mul_vec(A[rank, c:], np.uint64(inv_mont), p, pinv)
        f = A[rank + 1:, c]
        hit = f != 0
        if hit.any():
            rows = np.nonzero(hit)[0] + rank + 1
            v = _mont_mul_vec(f[hit][:, None], A[rank, c:][None, :], p, pinv)
            block = A[rows, c:]
            A[rows, c:] = np.where(block >= v, block - v, block + (p - v))
        rank += 1
        if rank == n_rows:
            break
    return rank


def _dense_rank_small(A, p):
    n_rows, n_cols = A.shape
    big_p = int(p)
    rank = 0
    for c in range(n_cols):
        col = A[rank:, c]
        nz = np.nonzero(col)[0]
        if len(nz) == 0:
            continue
        pivot = rank + int(nz[0])
        if pivot != rank:
            A[[rank, pivot], c:] = A[[pivot, rank], c:]
        inv = np.uint64(pow(int(A[rank, c]), -1, big_p))
        A[rank, c:] = (A[rank, c:] * inv) % p
        f = A[rank + 1:, c]
        hit = f != 0
        if hit.any():
            rows = np.nonzero(hit)[0] + rank + 1
            v = (f[hit][:, None] * A[rank, c:][None, :]) % p
            block = A[rows, c:]
            A[rows, c:] = np.where(block >= v, block - v, block + (p - v))
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
    pinv = (-pow(p, -1, 1 << 64)) % (1 << 64)
    r2 = (1 << 128) % p
    return int(_dense_rank_mont(A, np.uint64(p), np.uint64(pinv), np.uint64(r2)))
