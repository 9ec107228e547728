"""Quadratic (Koszul) duals of binary operads presented in degree 3.

The arity-3 component of the free operad is 12-dimensional.  The dual operad's
relation space is the annihilator of the relation space under a diagonal
pairing on the monomial basis: +sgn(labels) on the (a*b)*c shape, -sgn(labels)
on the a*(b*c) shape.  This sign convention is pinned by two checks that sit
in the test suite: the associative operad comes out self-dual, and the
alternative family's duals come out as associativity plus the known short
identities.  Everything here is exact rational arithmetic; the spaces are
tiny, so clarity beats speed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .identities import (
    Identity,
    all_relabelings,
    associativity_identity,
    make_identity,
)
from .monomials import Monomial, graft, monomial_from_index, monomial_index, variable

_DIM = 12  # dim of the degree-3 multilinear space: 2 shapes * 3! labelings
_WORDS = tuple(itertools.permutations((1, 2, 3)))  # lex order = perm-rank order


def _sign(labels: Sequence[int]) -> int:
    labels = list(labels)
    sign = 1
    for i in range(len(labels)):
        for j in range(i + 1, len(labels)):
            if labels[i] > labels[j]:
                sign = -sign
    return sign


def _diag_sign(index: int) -> int:
    # shape 0 under the canonical order is a*(b*c), shape 1 is (a*b)*c
    shape, rank = divmod(index, 6)
    word_sign = _sign(_WORDS[rank])
    return word_sign if shape == 1 else -word_sign


def pairing(m1: Monomial, m2: Monomial) -> int:
    """The canonical pairing on degree-3 monomials: diagonal, values in {-1,0,1}."""
    for m in (m1, m2):
        if m.degree != 3 or not m.is_multilinear():
            raise ValueError("pairing is defined on multilinear degree-3 monomials")
    i1, i2 = monomial_index(m1), monomial_index(m2)
    if i1 != i2:
        return 0
    return _diag_sign(i1)


# --- small exact linear algebra ----------------------------------------------

Vec = tuple[Fraction, ...]


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    rows = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(_DIM):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


@dataclass(frozen=True)
class RelationSpace:
    """A subspace of the 12-dimensional degree-3 space, in canonical RREF basis."""

    basis: tuple[Vec, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v: Sequence[Fraction]) -> bool:
        v = list(v)
        for row in self.basis:
            lead = next(i for i, x in enumerate(row) if x != 0)
            if v[lead] != 0:
                f = v[lead]
                v = [x - f * y for x, y in zip(v, row)]
        return all(x == 0 for x in v)

    def __le__(self, other: "RelationSpace") -> bool:
        return all(other.contains(b) for b in self.basis)


def _space_from_rows(rows: list[list[Fraction]]) -> RelationSpace:
    rref, _ = _rref(rows)
    return RelationSpace(tuple(tuple(r) for r in rref))


def relation_space(ids: Sequence[Identity]) -> RelationSpace:
    """Span of all S_3-relabelings of the given degree-3 identities."""
    rows = []
    for ident in ids:
        if ident.degree != 3 or not ident.is_multilinear():
            raise ValueError("relation spaces live in multilinear degree 3")
        for relabeled in all_relabelings(ident):
            vec = [Fraction(0)] * _DIM
            for coef, mono in relabeled.terms:
                vec[monomial_index(mono)] += coef
            rows.append(vec)
    return _space_from_rows(rows)


def annihilator(space: RelationSpace) -> RelationSpace:
    """{v : <v, r> = 0 for all r in the space}; the pairing is nondegenerate."""
    constraints = [
        [r[i] * _diag_sign(i) for i in range(_DIM)] for r in space.basis
    ]
    rref, pivots = _rref(constraints)
    free = [c for c in range(_DIM) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * _DIM
        v[f] = Fraction(1)
        for row, pc in zip(rref, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return _space_from_rows(basis)


# --- presentation of the dual ------------------------------------------------

def _associativity_space() -> RelationSpace:
    return relation_space([associativity_identity()])


def _left_normed(word: Sequence[int]) -> Monomial:
    a, b, c = (variable(v) for v in word)
    return graft(graft(a, b), c)


def _word_action(perm: Sequence[int]) -> list[int]:
    """Index map on the 6 words induced by relabeling variables with perm."""
    mapping = {i + 1: perm[i] for i in range(3)}
    out = []
    for w in _WORDS:
        image = tuple(mapping[v] for v in w)
        out.append(_WORDS.index(image))
    return out


def _quotient_by_associativity(space: RelationSpace) -> list[list[Fraction]]:
    """Images of basis vectors under a*(b*c) ~ (a*b)*c, in the 6 word coordinates."""
    images = []
    for v in space.basis:
        img = [Fraction(0)] * 6
        for i, x in enumerate(v):
            img[i % 6] += x
        images.append(img)
    return images


def _integerize(vec: Sequence[Fraction]) -> list[int]:
    denom = 1
    for x in vec:
        denom = denom * x.denominator // gcd(denom, x.denominator)
    ints = [int(x * denom) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x != 0)
    if lead < 0:
        ints = [-x for x in ints]
    return ints


def _rref6(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    rows = [list(r) for r in rows]
    out = []
    r = 0
    for c in range(6):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
    return rows[:r]


def _in_span(v: list[Fraction], basis: list[list[Fraction]]) -> bool:
    v = list(v)
    for row in basis:
        lead = next((i for i, x in enumerate(row) if x != 0), None)
        if lead is not None and v[lead] != 0:
            f = v[lead] / row[lead]
            v = [x - f * y for x, y in zip(v, row)]
    return all(x == 0 for x in v)


def _word_identity(vec: Sequence[Fraction]) -> Identity:
    ints = _integerize(vec)
    terms = [
        (c, _left_normed(w)) for c, w in zip(ints, _WORDS) if c != 0
    ]
    return make_identity(terms, ("x", "y", "z"))


def dual_relations(ids: Sequence[Identity]) -> list[Identity]:
    """A generating set of identities for the dual operad.

    When the annihilator contains the associativity relations (it does for all
    the presets here), the output is the associativity identity followed by a
    minimal list of generators written in left-normed form; callers can print
    the first entry as just "associative".
    """
    ann = annihilator(relation_space(ids))
    assoc = _associativity_space()
    if not (assoc <= ann):
        # no associative presentation: report the raw annihilator basis
        out = []
        for v in ann.basis:
            ints = _integerize(v)
            terms = [
                (c, monomial_from_index(i, 3)) for i, c in enumerate(ints) if c != 0
            ]
            out.append(make_identity(terms, ("x", "y", "z")))
        return out

    quotient = _rref6(_quotient_by_associativity(ann))
    actions = [_word_action(p) for p in itertools.permutations((1, 2, 3))]

    generators: list[list[Fraction]] = []
    spanned: list[list[Fraction]] = []
    candidates = sorted(
        quotient,
        key=lambda v: (sum(1 for x in v if x != 0), max(abs(x) for x in _fracs(v))),
    )
    for cand in candidates:
        if _in_span(cand, spanned):
            continue
        generators.append(cand)
        orbit = []
        for action in actions:
            image = [Fraction(0)] * 6
            for i, x in enumerate(cand):
                image[action[i]] = x
            orbit.append(image)
        spanned = _rref6(spanned + orbit)
        if len(spanned) == len(quotient):
            break

    return [associativity_identity()] + [_word_identity(g) for g in generators]


def _fracs(v: Sequence[Fraction]) -> list[Fraction]:
    return [x for x in v if x != 0] or [Fraction(0)]
