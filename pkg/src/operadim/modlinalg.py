"""Exact linear algebra over GF(p) for p < 2^63: the rank engine.

rank_mod_p runs sparse Gaussian elimination with Markowitz pivoting while the
working matrix stays sparse, then hands the remaining block to a dense kernel
(numba-compiled, with a numpy fallback; see kernels).  The sparse phase uses
plain Python integers, so products of two residues are exact by construction;
the dense kernels do their own 128-bit intermediate handling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .consequences import SparseRowMatrix
from .kernels import dense_rank


@dataclass(frozen=True)
class PrimeField:
    """GF(p), 2 <= p < 2^63; primality is verified at construction."""

    p: int

    def __post_init__(self) -> None:
        from .certify import is_prime_u63

        if not 2 <= self.p < 1 << 63:
            raise ValueError(f"modulus {self.p} out of range [2, 2^63)")
        if not is_prime_u63(self.p):
            raise ValueError(f"modulus {self.p} is not prime")

    def reduce(self, a: int) -> int:
        return a % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of 0 in GF(p)")
        return pow(a, -1, self.p)


@dataclass(frozen=True)
class RankConfig:
    # switch to the dense kernel once the live submatrix passes this density
    dense_switch_density: float = 0.20
    # ... or once it is small enough that dense elimination is cheap outright
    # (cells = rows * live columns; 4M uint64 cells is 32 MB)
    dense_cell_budget: int = 4_000_000


class _SparseEliminator:
    """Markowitz-pivoted elimination over row dictionaries.

    Pivot rule: minimize len(row) * len(column) over all nonzeros, ties broken
    by lowest column then lowest row index.  Columns are bucketed by count so
    the scan can stop early: any candidate in a column of count c scores >= c.
    """

    def __init__(self, row_dicts: list[dict[int, int]], p: int):
        self.p = p
        self.rows: dict[int, dict[int, int]] = {}
        self.col_rows: dict[int, set[int]] = {}
        self.nnz = 0
        for i, row in enumerate(row_dicts):
            if row:
                self.rows[i] = row
                for c in row:
                    self.col_rows.setdefault(c, set()).add(i)
                self.nnz += len(row)
        self.buckets: dict[int, set[int]] = {}
        for c, members in self.col_rows.items():
            self.buckets.setdefault(len(members), set()).add(c)

    def density(self) -> float:
        if not self.rows or not self.col_rows:
            return 0.0
        return self.nnz / (len(self.rows) * len(self.col_rows))

    def _rebucket(self, col: int, old: int, new: int) -> None:
        if old == new:
            return
        if old > 0:
            bucket = self.buckets[old]
            bucket.discard(col)
            if not bucket:
                del self.buckets[old]
        if new > 0:
            self.buckets.setdefault(new, set()).add(col)

    def _drop_cell(self, row_id: int, col: int) -> None:
        members = self.col_rows[col]
        old = len(members)
        members.discard(row_id)
        self.nnz -= 1
        if not members:
            del self.col_rows[col]
        self._rebucket(col, old, len(members))

    def _add_cell(self, row_id: int, col: int) -> None:
        members = self.col_rows.setdefault(col, set())
        old = len(members)
        members.add(row_id)
        self.nnz += 1
        self._rebucket(col, old, len(members))

    def choose_pivot(self) -> Optional[tuple[int, int]]:
        best_score = None
        best = None
        for count in sorted(self.buckets):
            if best_score is not None and count >= best_score:
                break
            for col in self.buckets[count]:
                for row_id in self.col_rows[col]:
                    score = len(self.rows[row_id]) * count
                    key = (score, col, row_id)
                    if best is None or key < best:
                        best = key
                        best_score = score
        if best is None:
            return None
        return best[2], best[1]

    def eliminate(self, row_id: int, col: int) -> None:
        p = self.p
        pivot_row = self.rows[row_id]
        inv = pow(pivot_row[col], -1, p)
        targets = [r for r in self.col_rows[col] if r != row_id]
        for r in targets:
            row = self.rows[r]
            f = row[col] * inv % p
            for c, pv in pivot_row.items():
                nv = (row.get(c, 0) - f * pv) % p
                if nv:
                    if c not in row:
                        self._add_cell(r, c)
                    row[c] = nv
                else:
                    if c in row:
                        del row[c]
                        self._drop_cell(r, c)
            if not row:
                del self.rows[r]
        # retire the pivot row
        for c in pivot_row:
            self._drop_cell(row_id, c)
        del self.rows[row_id]

    def to_dense(self) -> tuple[np.ndarray, int]:
        cols = sorted(self.col_rows)
        col_pos = {c: j for j, c in enumerate(cols)}
        A = np.zeros((len(self.rows), len(cols)), dtype=np.uint64)
        for i, r in enumerate(sorted(self.rows)):
            for c, v in self.rows[r].items():
                A[i, col_pos[c]] = v
        return A, len(cols)


class _WeightedUnionFind:
    """Tracks relations x_i = w * x_root (mod p), with a zero flag per class."""

    def __init__(self, p: int):
        self.p = p
        self.parent: dict[int, int] = {}
        self.weight: dict[int, int] = {}
        self.zero: set[int] = set()

    def find(self, c: int) -> tuple[int, int]:
        if c not in self.parent:
            self.parent[c] = c
            self.weight[c] = 1
            return c, 1
        path = []
        while self.parent[c] != c:
            path.append(c)
            c = self.parent[c]
        w = 1
        for node in reversed(path):
            w = w * self.weight[node] % self.p
            self.parent[node] = c
            self.weight[node] = w
        return c, self.weight[path[0]] if path else 1

    def mark_zero(self, root: int) -> bool:
        if root in self.zero:
            return False
        self.zero.add(root)
        return True

    def add_pair(self, c1: int, v1: int, c2: int, v2: int) -> int:
        """Absorb the row v1*x_c1 + v2*x_c2 = 0; returns the rank gained (0/1)."""
        p = self.p
        r1, w1 = self.find(c1)
        r2, w2 = self.find(c2)
        z1, z2 = r1 in self.zero, r2 in self.zero
        if z1 and z2:
            return 0
        if z1 or z2:
            return 1 if self.mark_zero(r2 if z1 else r1) else 0
        if r1 == r2:
            # v1*w1*x_r + v2*w2*x_r = 0
            s = (v1 * w1 + v2 * w2) % p
            if s == 0:
                return 0
            return 1 if self.mark_zero(r1) else 0
        # x_r2 = -(v1*w1) / (v2*w2) * x_r1
        ratio = -v1 * w1 * pow(v2 * w2, -1, p) % p
        self.parent[r2] = r1
        self.weight[r2] = ratio
        return 1


def _contract_two_term_rows(
    row_dicts: list[dict[int, int]], p: int
) -> tuple[int, list[dict[int, int]]]:
    """Eliminate all 2-nonzero rows by weighted union-find over columns.

    Consequence matrices of dual presets are dominated by two-term rows (the
    associativity consequences); contracting them first keeps the Markowitz
    phase small.  Returns the rank gained and the remaining projected rows.
    """
    uf = _WeightedUnionFind(p)
    rank = 0
    others: list[dict[int, int]] = []
    for row in row_dicts:
        if len(row) == 2:
            (c1, v1), (c2, v2) = sorted(row.items())
            rank += uf.add_pair(c1, v1, c2, v2)
        else:
            others.append(row)
    if not uf.parent:
        return 0, others
    projected: list[dict[int, int]] = []
    for row in others:
        image: dict[int, int] = {}
        for c, v in row.items():
            root, w = uf.find(c)
            if root in uf.zero:
                continue
            nv = (image.get(root, 0) + v * w) % p
            if nv:
                image[root] = nv
            elif root in image:
                del image[root]
        if image:
            projected.append(image)
    return rank, projected


def _reduced_deduped_rows(matrix: SparseRowMatrix, p: int) -> list[dict[int, int]]:
    rows = []
    for i in range(matrix.n_rows):
        row = {}
        for c, e in matrix.row(i):
            v = e % p
            if v:
                row[c] = v
        if row:
            rows.append(row)
    return _dedup_scaled(rows, p)


def _dedup_scaled(rows: list[dict[int, int]], p: int) -> list[dict[int, int]]:
    """Drop rows that are scalar multiples of an earlier row (row space unchanged)."""
    seen: set[tuple] = set()
    out = []
    for row in rows:
        lead = min(row)
        inv = pow(row[lead], -1, p)
        key = tuple(sorted((c, v * inv % p) for c, v in row.items()))
        if key not in seen:
            seen.add(key)
            out.append(row)
    return out


def rank_mod_p(
    matrix: SparseRowMatrix,
    field: PrimeField,
    config: RankConfig | None = None,
) -> int:
    """Rank of the matrix reduced mod p; deterministic for the fixed pivot rule."""
    config = config or RankConfig()
    if matrix.n_rows == 0 or matrix.n_cols == 0:
        return 0
    p = field.p
    row_dicts = _reduced_deduped_rows(matrix, p)
    rank0, row_dicts = _contract_two_term_rows(row_dicts, p)
    row_dicts = _dedup_scaled(row_dicts, p)
    elim = _SparseEliminator(row_dicts, field.p)
    rank = rank0
    while elim.rows:
        if rank == matrix.n_cols:
            return rank
        cells = len(elim.rows) * len(elim.col_rows)
        if cells <= config.dense_cell_budget or (
            elim.density() > config.dense_switch_density
        ):
            A, _ = elim.to_dense()
            return rank + dense_rank(A, field.p)
        pivot = elim.choose_pivot()
        if pivot is None:
            break
        row_id, col = pivot
        elim.eliminate(row_id, col)
        rank += 1
    return rank
