"""Multilinear nonassociative monomials: binary tree shapes with labeled leaves.

The degree-n component of the free operad on one binary operation has a basis
of fully parenthesized products of the variables 1..n, each used once.  There
are C(n-1) * n! of them (Catalan number times permutations).  Everything here
is immutable; the index functions fix a canonical column order that the rest
of the package relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Iterator, Mapping, Optional


@dataclass(frozen=True, eq=False)
class TreeShape:
    """A binary association type: either a leaf or a node with two children.

    Shapes are interned: always build them through `leaf`/`LEAF` and `node`,
    which return the unique instance for each structure.  Equality and hashing
    are therefore by identity, which keeps index lookups cheap even for deep
    trees.
    """

    left: Optional["TreeShape"]
    right: Optional["TreeShape"]
    leaf_count: int

    @property
    def is_leaf(self) -> bool:
        return self.left is None


LEAF = TreeShape(None, None, 1)

_NODE_POOL: dict[tuple[int, int], TreeShape] = {}


def node(left: TreeShape, right: TreeShape) -> TreeShape:
    key = (id(left), id(right))
    cached = _NODE_POOL.get(key)
    if cached is None:
        cached = TreeShape(left, right, left.leaf_count + right.leaf_count)
        _NODE_POOL[key] = cached
    return cached


def catalan(k: int) -> int:
    return factorial(2 * k) // (factorial(k) * factorial(k + 1))


@lru_cache(maxsize=None)
def enumerate_shapes(n: int) -> tuple[TreeShape, ...]:
    """All shapes with n leaves, in canonical order.

    Canonical order: node(l, r) for left leaf count k = 1..n-1 ascending,
    recursing in the same order on both children.  This fixes the column
    order of every consequence matrix.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if n == 1:
        return (LEAF,)
    shapes = []
    for k in range(1, n):
        for left in enumerate_shapes(k):
            for right in enumerate_shapes(n - k):
                shapes.append(node(left, right))
    return tuple(shapes)


@lru_cache(maxsize=None)
def _shape_positions(n: int) -> dict[TreeShape, int]:
    return {s: i for i, s in enumerate(enumerate_shapes(n))}


def shape_index(shape: TreeShape) -> int:
    return _shape_positions(shape.leaf_count)[shape]


def dim_free(n: int) -> int:
    """Number of multilinear degree-n monomials: C(n-1) * n!."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    return catalan(n - 1) * factorial(n)


@dataclass(frozen=True)
class Monomial:
    """A shape plus the left-to-right sequence of variable labels on its leaves."""

    shape: TreeShape
    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.labels) != self.shape.leaf_count:
            raise ValueError(
                f"{len(self.labels)} labels for a shape with "
                f"{self.shape.leaf_count} leaves"
            )

    @property
    def degree(self) -> int:
        return len(self.labels)

    def is_multilinear(self) -> bool:
        n = self.degree
        return sorted(self.labels) == list(range(1, n + 1))


def variable(v: int) -> Monomial:
    if v < 1:
        raise ValueError(f"variable indices are positive, got {v}")
    return Monomial(LEAF, (v,))


def graft(m1: Monomial, m2: Monomial) -> Monomial:
    """The product m1 * m2 in the free magma; label sets must be disjoint."""
    common = set(m1.labels) & set(m2.labels)
    if common:
        raise ValueError(f"overlapping labels {sorted(common)} in graft")
    return Monomial(node(m1.shape, m2.shape), m1.labels + m2.labels)


def _split(m: Monomial) -> tuple[Monomial, Monomial]:
    k = m.shape.left.leaf_count
    return (
        Monomial(m.shape.left, m.labels[:k]),
        Monomial(m.shape.right, m.labels[k:]),
    )


def substitute(m: Monomial, v: int, s: Monomial) -> Monomial:
    """Replace the unique leaf of m labeled v by the monomial s."""
    occurrences = m.labels.count(v)
    if occurrences != 1:
        raise ValueError(f"variable {v} occurs {occurrences} times, need exactly 1")
    collision = (set(m.labels) - {v}) & set(s.labels)
    if collision:
        raise ValueError(f"substitution would duplicate labels {sorted(collision)}")

    def go(t: Monomial) -> Monomial:
        if t.shape.is_leaf:
            return s if t.labels[0] == v else t
        left, right = _split(t)
        if v in left.labels:
            return graft(go(left), right)
        return graft(left, go(right))

    return go(m)


def relabel(m: Monomial, perm: Mapping[int, int]) -> Monomial:
    """Apply a permutation of the variable set to the labels; shape unchanged."""
    varset = set(m.labels)
    if set(perm.keys()) < varset:
        missing = varset - set(perm.keys())
        raise ValueError(f"permutation does not cover variables {sorted(missing)}")
    image = [perm[v] for v in m.labels]
    if sorted(image) != sorted(m.labels):
        raise ValueError("mapping is not a bijection on the variable set")
    return Monomial(m.shape, tuple(image))


def _perm_rank(labels: tuple[int, ...]) -> int:
    """Lexicographic rank of a permutation of 1..n (Lehmer code)."""
    n = len(labels)
    rank = 0
    remaining = sorted(labels)
    for i, v in enumerate(labels):
        pos = remaining.index(v)
        rank += pos * factorial(n - 1 - i)
        remaining.pop(pos)
    return rank


def _perm_unrank(rank: int, n: int) -> tuple[int, ...]:
    remaining = list(range(1, n + 1))
    out = []
    for i in range(n):
        f = factorial(n - 1 - i)
        pos, rank = divmod(rank, f)
        out.append(remaining.pop(pos))
    return tuple(out)


def monomial_index(m: Monomial) -> int:
    """Canonical index of a multilinear monomial: shape first, labels lex second."""
    if not m.is_multilinear():
        raise ValueError(f"monomial with labels {m.labels} is not multilinear")
    n = m.degree
    return shape_index(m.shape) * factorial(n) + _perm_rank(m.labels)


def monomial_from_index(index: int, n: int) -> Monomial:
    if not 0 <= index < dim_free(n):
        raise ValueError(f"index {index} out of range for degree {n}")
    shape_i, label_rank = divmod(index, factorial(n))
    return Monomial(enumerate_shapes(n)[shape_i], _perm_unrank(label_rank, n))


def all_monomials(n: int) -> Iterator[Monomial]:
    """All multilinear degree-n monomials in canonical index order."""
    for i in range(dim_free(n)):
        yield monomial_from_index(i, n)
