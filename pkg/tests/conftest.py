"""Shared test helpers: exact-rational oracles and the octonion algebra.

Everything here is deliberately independent of the package's own linear
algebra so it can serve as an oracle for it: ranks are computed over
Fraction, and identity rows are checked numerically in the octonions.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import pytest

from operadim.consequences import SparseRowMatrix
from operadim.monomials import Monomial


def rational_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    """Gaussian elimination over Fraction; the ground-truth rank."""
    work = [list(map(Fraction, row)) for row in rows if any(row)]
    rank = 0
    col = 0
    n_cols = max((len(r) for r in work), default=0)
    while work and col < n_cols:
        pivot = next((i for i, r in enumerate(work) if r[col] != 0), None)
        if pivot is None:
            col += 1
            continue
        work[0], work[pivot] = work[pivot], work[0]
        head = work[0]
        inv = Fraction(1) / head[col]
        reduced = []
        for r in work[1:]:
            if r[col] != 0:
                f = r[col] * inv
                r = [a - f * b for a, b in zip(r, head)]
            if any(r):
                reduced.append(r)
        work = reduced
        rank += 1
        col += 1
    return rank


def matrix_as_fractions(matrix: SparseRowMatrix) -> list[list[Fraction]]:
    dense = [[Fraction(0)] * matrix.n_cols for _ in range(matrix.n_rows)]
    for i in range(matrix.n_rows):
        for c, e in matrix.row(i):
            dense[i][c] = Fraction(e)
    return dense


def sparse_rational_rank(matrix: SparseRowMatrix) -> int:
    return rational_rank(matrix_as_fractions(matrix))


# --- octonions ---------------------------------------------------------------
# Basis e0..e7, e0 = 1.  The Fano-plane triples below define e_a * e_b = e_c
# cyclically (and anticommutatively); imaginary units square to -1.

_FANO_TRIPLES = ((1, 2, 3), (1, 4, 5), (1, 7, 6),
                 (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 6, 5))


def _build_octonion_table() -> list[list[tuple[int, int]]]:
    # table[a][b] = (sign, c) meaning e_a * e_b = sign * e_c
    table = [[(0, 0)] * 8 for _ in range(8)]
    for a in range(8):
        table[0][a] = (1, a)
        table[a][0] = (1, a)
    for a in range(1, 8):
        table[a][a] = (-1, 0)
    for t in _FANO_TRIPLES:
        for a, b, c in (t, t[1:] + t[:1], t[2:] + t[:2]):
            table[a][b] = (1, c)
            table[b][a] = (-1, c)
    return table


_OCT_TABLE = _build_octonion_table()


def oct_mul(x: Sequence[int], y: Sequence[int]) -> tuple[int, ...]:
    out = [0] * 8
    for a, xa in enumerate(x):
        if xa == 0:
            continue
        for b, yb in enumerate(y):
            if yb == 0:
                continue
            sign, c = _OCT_TABLE[a][b]
            out[c] += sign * xa * yb
    return tuple(out)


def eval_monomial_oct(m: Monomial, values: dict[int, tuple[int, ...]]):
    if m.shape.is_leaf:
        return values[m.labels[0]]
    k = m.shape.left.leaf_count
    left = Monomial(m.shape.left, m.labels[:k])
    right = Monomial(m.shape.right, m.labels[k:])
    return oct_mul(eval_monomial_oct(left, values), eval_monomial_oct(right, values))


@pytest.fixture
def clean_cache(tmp_path):
    return str(tmp_path / "cache.jsonl")
