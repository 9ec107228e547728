"""Polynomial identities: the surface DSL, linearization, and operad presets.

An identity is a formal integer combination of monomials equated to zero.
Variables are small positive integers internally; the textual form uses names,
and indices are assigned by sorted name order so that parse and pretty-print
round-trip exactly.

Grammar (one identity per line, `#` starts a comment):

    identity := expr "=" expr
    expr     := ["-"] term { ("+" | "-") term } | "0"
    term     := [unsigned-integer "*"] monomial
    monomial := primary { "*" primary }          (left-associative)
    primary  := variable | "(" monomial ")"
    variable := letter { letter | digit }
"""

from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .monomials import Monomial, graft, node, relabel, shape_index, variable


class IdentityError(ValueError):
    """Ill-formed identity (mixed multisets, bad linearization input, ...)."""


class ParseError(IdentityError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class EmptyIdentityError(IdentityError):
    """All terms canceled: the identity is trivially 0 = 0."""


def _term_key(m: Monomial) -> tuple:
    return (shape_index(m.shape), m.labels)


@dataclass(frozen=True)
class Identity:
    """A formal combination sum(coefficient * monomial) = 0.

    Terms are merged, sorted canonically, and never have zero coefficients.
    `names[i]` is the display name of variable i+1; names do not take part in
    equality, so identities that differ only by variable names compare equal.
    """

    terms: tuple[tuple[int, Monomial], ...]
    names: tuple[str, ...] = field(compare=False)

    @property
    def degree(self) -> int:
        return self.terms[0][1].degree

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.terms[0][1].labels)))

    def multiplicities(self) -> Counter:
        return Counter(self.terms[0][1].labels)

    def is_multilinear(self) -> bool:
        return all(mult == 1 for mult in self.multiplicities().values())

    def name_of(self, v: int) -> str:
        return self.names[v - 1]

    def __str__(self) -> str:
        return format_identity(self)


def make_identity(
    terms: Iterable[tuple[int, Monomial]], names: Sequence[str]
) -> Identity:
    """Merge like terms, drop zeros, sort, and validate shared variable multiset.

    Indices are kept aligned with sorted name order (the parser's convention),
    relabeling if the caller supplied names out of order.
    """
    terms = list(terms)
    names = list(names)
    if len(set(names)) != len(names):
        raise IdentityError(f"duplicate variable names in {names}")
    if names != sorted(names):
        order = sorted(range(len(names)), key=lambda i: names[i])
        mapping = {old + 1: new + 1 for new, old in enumerate(order)}
        terms = [
            (c, Monomial(m.shape, tuple(mapping[v] for v in m.labels)))
            for c, m in terms
        ]
        names = sorted(names)
    merged: dict[tuple, tuple[Monomial, int]] = {}
    for coef, mono in terms:
        key = _term_key(mono)
        old = merged.get(key)
        merged[key] = (mono, coef + (old[1] if old else 0))
    cleaned = [
        (coef, mono) for mono, coef in (merged[k] for k in sorted(merged)) if coef != 0
    ]
    if not cleaned:
        raise EmptyIdentityError("all terms cancel; the identity is 0 = 0")
    reference = Counter(cleaned[0][1].labels)
    for _, mono in cleaned[1:]:
        if Counter(mono.labels) != reference:
            raise IdentityError(
                f"terms mix variable multisets: {dict(reference)} vs "
                f"{dict(Counter(mono.labels))}"
            )
    used = sorted(reference)
    if used != list(range(1, len(used) + 1)):
        raise IdentityError(f"variable indices must be 1..k, got {used}")
    names = tuple(names)
    if len(names) < len(used):
        raise IdentityError("fewer names than variables")
    return Identity(tuple(cleaned), names[: len(used)])


# --- parsing -----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<name>[A-Za-z][A-Za-z0-9]*)|(?P<int>\d+)|(?P<op>[*+\-()=]))"
)


def _tokenize(text: str, line: int) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            col = pos + (len(text[pos:]) - len(stripped)) + 1
            raise ParseError(f"unexpected character {stripped[0]!r}", line, col)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    tokens.append(("end", "", len(text) + 1))
    return tokens


class _Parser:
    """Recursive descent over the token list; variables become name strings."""

    def __init__(self, tokens: list[tuple[str, str, int]], line: int):
        self.tokens = tokens
        self.pos = 0
        self.line = line

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def take(self, kind: str | None = None, value: str | None = None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind}, got {tok[1] or 'end of line'}",
                             self.line, tok[2])
        if value is not None and tok[1] != value:
            raise ParseError(f"expected {value!r}, got {tok[1] or 'end of line'}",
                             self.line, tok[2])
        self.pos += 1
        return tok

    # Monomials are built over name strings first; indices are assigned after
    # the whole identity is read, from the sorted set of names.

    def primary(self):
        kind, value, col = self.peek()
        if kind == "name":
            self.take()
            return value
        if kind == "op" and value == "(":
            self.take()
            inner = self.monomial()
            self.take("op", ")")
            return inner
        raise ParseError(f"expected a variable or '(', got {value or 'end of line'}",
                         self.line, col)

    def monomial(self):
        result = self.primary()
        while self.peek()[:2] == ("op", "*"):
            self.take()
            result = (result, self.primary())
        return result

    def term(self) -> tuple[int, object]:
        coef = 1
        if self.peek()[0] == "int":
            coef = int(self.take()[1])
            self.take("op", "*")
        return coef, self.monomial()

    def expr(self) -> list[tuple[int, object]]:
        if self.peek()[0] == "int" and self.peek()[1] == "0":
            nxt = self.tokens[self.pos + 1]
            if nxt[:2] != ("op", "*"):
                self.take()
                return []
        sign = 1
        if self.peek()[:2] == ("op", "-"):
            self.take()
            sign = -1
        coef, mono = self.term()
        terms = [(sign * coef, mono)]
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            sign = 1 if self.take()[1] == "+" else -1
            coef, mono = self.term()
            terms.append((sign * coef, mono))
        return terms


def _collect_names(tree, into: set[str]) -> None:
    if isinstance(tree, str):
        into.add(tree)
    else:
        _collect_names(tree[0], into)
        _collect_names(tree[1], into)


def _build(tree, index_of: dict[str, int]) -> Monomial:
    # not graft(): parsed monomials may legitimately repeat a variable,
    # e.g. (x*y)*y before linearization
    if isinstance(tree, str):
        return variable(index_of[tree])
    left = _build(tree[0], index_of)
    right = _build(tree[1], index_of)
    return Monomial(node(left.shape, right.shape), left.labels + right.labels)


def parse_identity(text: str, line: int = 1) -> Identity:
    """Parse one identity; the right-hand side is subtracted onto the left."""
    tokens = _tokenize(text, line)
    parser = _Parser(tokens, line)
    lhs = parser.expr()
    parser.take("op", "=")
    rhs = parser.expr()
    parser.take("end")

    names: set[str] = set()
    for _, tree in itertools.chain(lhs, rhs):
        _collect_names(tree, names)
    ordered = sorted(names)
    index_of = {name: i + 1 for i, name in enumerate(ordered)}
    terms = [(c, _build(t, index_of)) for c, t in lhs]
    terms += [(-c, _build(t, index_of)) for c, t in rhs]
    return make_identity(terms, ordered)


def parse_identity_file(text: str) -> list[Identity]:
    """One identity per line; blank lines and `#` comments ignored."""
    identities = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        identities.append(parse_identity(line, line=lineno))
    return identities


# --- pretty-printing ---------------------------------------------------------

def _format_monomial(m: Monomial, names: Sequence[str]) -> str:
    def go(t: Monomial, parenthesize: bool) -> str:
        if t.shape.is_leaf:
            return names[t.labels[0] - 1]
        k = t.shape.left.leaf_count
        left = Monomial(t.shape.left, t.labels[:k])
        right = Monomial(t.shape.right, t.labels[k:])
        body = f"{go(left, False)}*{go(right, True)}"
        return f"({body})" if parenthesize else body

    return go(m, False)


def format_identity(ident: Identity) -> str:
    parts = []
    for i, (coef, mono) in enumerate(ident.terms):
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = _format_monomial(mono, ident.names)
        if mag != 1:
            body = f"{mag}*{body}"
        if i == 0:
            parts.append(body if coef > 0 else f"-{body}")
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts) + " = 0"


# --- validation and linearization --------------------------------------------

@dataclass(frozen=True)
class MultilinearReport:
    ok: bool
    offenders: tuple[tuple[str, int], ...]  # (variable name, multiplicity)

    def __str__(self) -> str:
        if self.ok:
            return "multilinear"
        issues = ", ".join(f"{name} occurs {m} times" for name, m in self.offenders)
        return f"not multilinear: {issues}"


def validate_multilinear(ident: Identity) -> MultilinearReport:
    offenders = tuple(
        (ident.name_of(v), mult)
        for v, mult in sorted(ident.multiplicities().items())
        if mult != 1
    )
    return MultilinearReport(not offenders, offenders)


def linearize(ident: Identity) -> Identity:
    """Full polarization: each variable of multiplicity d becomes d fresh ones.

    Only the component containing every fresh variable exactly once is kept;
    for monomials this means summing over all assignments of the fresh
    variables to the d occurrence slots.  Multilinear input is rejected so a
    silent no-op cannot hide a caller bug.
    """
    mults = ident.multiplicities()
    if all(m == 1 for m in mults.values()):
        raise IdentityError("identity is already multilinear; nothing to linearize")

    # fresh naming: v with multiplicity d >= 2 becomes v1..vd
    taken = set(ident.names)
    new_names: list[str] = []
    slots: dict[int, list[int]] = {}  # old var -> new indices (1-based, assigned below)
    for v in sorted(mults):
        d = mults[v]
        base = ident.name_of(v)
        if d == 1:
            slots[v] = [len(new_names) + 1]
            new_names.append(base)
        else:
            slots[v] = []
            for i in range(d):
                candidate = f"{base}{i + 1}"
                while candidate in taken:
                    candidate += "0"
                taken.add(candidate)
                slots[v].append(len(new_names) + 1)
                new_names.append(candidate)

    terms = []
    for coef, mono in ident.terms:
        positions = {v: [i for i, lab in enumerate(mono.labels) if lab == v]
                     for v in mults}
        choices = [
            itertools.permutations(slots[v]) if mults[v] > 1 else [tuple(slots[v])]
            for v in sorted(mults)
        ]
        for assignment in itertools.product(*choices):
            labels = list(mono.labels)
            for v, fresh in zip(sorted(mults), assignment):
                for pos, f in zip(positions[v], fresh):
                    labels[pos] = f
            terms.append((coef, Monomial(mono.shape, tuple(labels))))
    return make_identity(terms, new_names)


# --- presets -----------------------------------------------------------------

_RA = "(x*y)*z + (x*z)*y - x*(y*z) - x*(z*y) = 0"
_LA = "(x*y)*z + (y*x)*z - x*(y*z) - y*(x*z) = 0"
_ASSOC = "(x*y)*z = x*(y*z)"
# dual presets are written associatively in left-normed form and paired with
# associativity, since the engine works in the free magma
_DUAL_RA = "x*y*z + x*z*y = 0"
_DUAL_LA = "x*y*z + y*x*z = 0"
_DUAL_ALT = "x*y*z + y*x*z + z*x*y + x*z*y + y*z*x + z*y*x = 0"

_PRESET_TABLE: dict[str, tuple[str, ...]] = {
    "right-alternative": (_RA,),
    "left-alternative": (_LA,),
    "alternative": (_RA, _LA),
    "associative": (_ASSOC,),
    "dual-right-alternative": (_ASSOC, _DUAL_RA),
    "dual-left-alternative": (_ASSOC, _DUAL_LA),
    "dual-alternative": (_ASSOC, _DUAL_ALT),
}


@dataclass(frozen=True)
class OperadPreset:
    name: str
    identities: tuple[Identity, ...]


def preset_names() -> tuple[str, ...]:
    return tuple(_PRESET_TABLE)


def preset(name: str) -> OperadPreset:
    try:
        sources = _PRESET_TABLE[name]
    except KeyError:
        available = ", ".join(_PRESET_TABLE)
        raise KeyError(f"unknown preset {name!r}; available: {available}") from None
    return OperadPreset(name, tuple(parse_identity(s) for s in sources))


def associativity_identity() -> Identity:
    return parse_identity(_ASSOC)


def all_relabelings(ident: Identity) -> list[Identity]:
    """The S_n-orbit of a multilinear identity (may contain duplicates merged out)."""
    if not ident.is_multilinear():
        raise IdentityError("relabeling orbit needs a multilinear identity")
    n = ident.degree
    out = []
    seen = set()
    for perm in itertools.permutations(range(1, n + 1)):
        mapping = {i + 1: perm[i] for i in range(n)}
        relabeled = make_identity(
            [(c, relabel(m, mapping)) for c, m in ident.terms], ident.names
        )
        if relabeled.terms not in seen:
            seen.add(relabeled.terms)
            out.append(relabeled)
    return out
