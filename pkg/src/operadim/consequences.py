"""Degree-n consequence matrices of multilinear identities.

The row space of the matrix built here is the degree-n multilinear component
of the T-ideal generated by the input identities; its corank is the operad
dimension at arity n.  Rows are generated by the recursive closure

    C_k = all relabelings of each degree-k identity
    C_{d+1} = { v*c, c*v, c[v_i <- v_i*v], c[v_i <- v*v_i] : c in C_d }
              closed under all relabelings (v is the fresh variable d+1)

with deduplication up to a global sign throughout.  Moves and relabelings act
on monomials injectively, so they are applied as precomputed permutations /
injections of column indices rather than on tree objects.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .identities import Identity
from .monomials import (
    all_monomials,
    dim_free,
    graft,
    monomial_from_index,
    monomial_index,
    relabel,
    substitute,
    variable,
)

Row = tuple[tuple[int, int], ...]  # sorted ((column, entry), ...), sign-normalized


def canonical_row(items: Iterable[tuple[int, int]]) -> Row:
    row = tuple(sorted(items))
    if row and row[0][1] < 0:
        row = tuple((c, -e) for c, e in row)
    return row


@dataclass(frozen=True)
class SparseRowMatrix:
    """Sparse integer matrix in CSR form; rows sorted and deduplicated."""

    degree: int
    n_cols: int
    indptr: np.ndarray  # int64, len n_rows+1
    cols: np.ndarray    # int64
    entries: np.ndarray  # int64

    @property
    def n_rows(self) -> int:
        return len(self.indptr) - 1

    @property
    def nnz(self) -> int:
        return len(self.cols)

    def row(self, i: int) -> Row:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return tuple(zip(self.cols[lo:hi].tolist(), self.entries[lo:hi].tolist()))

    def iter_rows(self) -> Iterator[Row]:
        for i in range(self.n_rows):
            yield self.row(i)

    def entries_in_pm1(self) -> bool:
        return bool(np.all(np.abs(self.entries) == 1)) if self.nnz else True

    @staticmethod
    def from_rows(rows: Sequence[Row], n_cols: int, degree: int) -> "SparseRowMatrix":
        indptr = np.zeros(len(rows) + 1, dtype=np.int64)
        for i, r in enumerate(rows):
            indptr[i + 1] = indptr[i] + len(r)
        cols = np.empty(indptr[-1], dtype=np.int64)
        entries = np.empty(indptr[-1], dtype=np.int64)
        pos = 0
        for r in rows:
            for c, e in r:
                cols[pos] = c
                entries[pos] = e
                pos += 1
        return SparseRowMatrix(degree, n_cols, indptr, cols, entries)


# --- precomputed index actions ----------------------------------------------

@lru_cache(maxsize=None)
def _move_maps(d: int) -> tuple[tuple[int, ...], ...]:
    """Column index maps for the 2 + 2d expansion moves from degree d to d+1."""
    fresh = d + 1
    monos = list(all_monomials(d))
    maps = []
    maps.append(tuple(monomial_index(graft(variable(fresh), m)) for m in monos))
    maps.append(tuple(monomial_index(graft(m, variable(fresh))) for m in monos))
    for i in range(1, d + 1):
        right = graft(variable(i), variable(fresh))
        maps.append(tuple(monomial_index(substitute(m, i, right)) for m in monos))
        left = graft(variable(fresh), variable(i))
        maps.append(tuple(monomial_index(substitute(m, i, left)) for m in monos))
    return tuple(maps)


@lru_cache(maxsize=None)
def _relabel_generator_maps(n: int) -> tuple[tuple[int, ...], ...]:
    """Index permutations for generators of S_n: the transposition (1 2) and
    the n-cycle (1 2 ... n).  Closing under these closes under all of S_n."""
    if n < 2:
        return ()
    swap = {i: i for i in range(1, n + 1)}
    swap[1], swap[2] = 2, 1
    cycle = {i: i % n + 1 for i in range(1, n + 1)}
    gens = [swap] if n == 2 else [swap, cycle]
    maps = []
    for g in gens:
        maps.append(
            tuple(
                monomial_index(relabel(m, g))
                for m in all_monomials(n)
            )
        )
    return tuple(maps)


def _apply_map(row: Row, index_map: Sequence[int]) -> Row:
    return canonical_row((index_map[c], e) for c, e in row)


def _close_under_relabeling(rows: set[Row], n: int) -> set[Row]:
    gens = _relabel_generator_maps(n)
    if not gens:
        return rows
    frontier = list(rows)
    while frontier:
        fresh = []
        for row in frontier:
            for g in gens:
                image = _apply_map(row, g)
                if image not in rows:
                    rows.add(image)
                    fresh.append(image)
        frontier = fresh
    return rows


def identity_row(ident: Identity) -> Row:
    if not ident.is_multilinear():
        raise ValueError(f"identity {ident} is not multilinear")
    return canonical_row((monomial_index(m), c) for c, m in ident.terms)


def expand_consequences(ids: Sequence[Identity], n: int) -> SparseRowMatrix:
    """The consequence matrix M(n); columns indexed by monomial_index."""
    if n < 1:
        raise ValueError(f"need degree >= 1, got {n}")
    for ident in ids:
        if not ident.is_multilinear():
            raise ValueError(f"identity {ident} is not multilinear")
        if ident.degree > n:
            raise ValueError(
                f"identity of degree {ident.degree} cannot constrain degree {n}"
            )

    by_degree: dict[int, set[Row]] = {}
    for ident in ids:
        by_degree.setdefault(ident.degree, set()).add(identity_row(ident))

    if not by_degree:
        return SparseRowMatrix.from_rows([], dim_free(n), n)

    current: set[Row] = set()
    for d in range(min(by_degree), n + 1):
        current |= by_degree.get(d, set())
        current = _close_under_relabeling(current, d)
        if d == n:
            break
        moves = _move_maps(d)
        nxt: set[Row] = set()
        for row in current:
            for mv in moves:
                nxt.add(_apply_map(row, mv))
        current = nxt

    rows = sorted(current)
    return SparseRowMatrix.from_rows(rows, dim_free(n), n)


def operad_dim_mod_p(ids: Sequence[Identity], n: int, p: int) -> int:
    """dim_free(n) minus the rank of the consequence matrix mod p.

    An upper bound for the characteristic-zero dimension (rk M >= rk M_p);
    equality needs certification.
    """
    from .modlinalg import PrimeField, rank_mod_p

    # identities of degree > n impose no constraint at arity n
    matrix = expand_consequences([i for i in ids if i.degree <= n], n)
    return dim_free(n) - rank_mod_p(matrix, PrimeField(p))


# --- textual dump ------------------------------------------------------------

def dump_matrix(matrix: SparseRowMatrix, path: str) -> None:
    """Sparse-triple text format: header, then `row_index col:entry ...` lines."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            f"cols={matrix.n_cols} rows={matrix.n_rows} degree={matrix.degree}\n"
        )
        for i in range(matrix.n_rows):
            cells = " ".join(f"{c}:{e}" for c, e in matrix.row(i))
            fh.write(f"{i} {cells}\n")


def load_matrix(path: str) -> SparseRowMatrix:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        meta = dict(kv.split("=") for kv in header)
        rows = []
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            rows.append(
                tuple(
                    (int(c), int(e))
                    for c, e in (cell.split(":") for cell in parts[1:])
                )
            )
    return SparseRowMatrix.from_rows(
        rows, int(meta["cols"]), int(meta["degree"])
    )
