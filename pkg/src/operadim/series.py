"""Exact-rational truncated power series and the Koszulity series test.

The Poincare series of an operad is sum_{n>=1} (-1)^n dim(n)/n! x^n.  For a
Koszul operad, composing the series of the operad with that of its dual gives
back x; a nonzero coefficient in the difference is a non-Koszulity witness,
and being an exact rational it is checkable with no tolerance at all.  No
floating point anywhere in this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence


@dataclass(frozen=True)
class TruncatedRationalSeries:
    """Coefficients c_1..c_N of a series with zero constant term."""

    coefficients: tuple[Fraction, ...]

    @property
    def truncation_degree(self) -> int:
        return len(self.coefficients)

    def coefficient(self, n: int) -> Fraction:
        if not 1 <= n <= self.truncation_degree:
            raise IndexError(f"degree {n} outside 1..{self.truncation_degree}")
        return self.coefficients[n - 1]

    def truncate(self, n: int) -> "TruncatedRationalSeries":
        if n > self.truncation_degree:
            raise ValueError(
                f"cannot extend truncation {self.truncation_degree} to {n}"
            )
        return TruncatedRationalSeries(self.coefficients[:n])

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coefficients)

    def first_nonzero(self) -> tuple[int, Fraction] | None:
        for i, c in enumerate(self.coefficients, start=1):
            if c != 0:
                return i, c
        return None

    def __sub__(self, other: "TruncatedRationalSeries") -> "TruncatedRationalSeries":
        n = min(self.truncation_degree, other.truncation_degree)
        return TruncatedRationalSeries(
            tuple(a - b for a, b in zip(self.coefficients[:n], other.coefficients[:n]))
        )

    def __str__(self) -> str:
        parts = []
        for n, c in enumerate(self.coefficients, start=1):
            if c == 0:
                continue
            mag = abs(c)
            x = "x" if n == 1 else f"x^{n}"
            body = x if mag == 1 else f"{mag}*{x}"
            if not parts:
                parts.append(body if c > 0 else f"- {body}")
            else:
                parts.append(f"{'+' if c > 0 else '-'} {body}")
        return " ".join(parts) if parts else "0"


def series(coefficients: Sequence[Fraction | int]) -> TruncatedRationalSeries:
    return TruncatedRationalSeries(tuple(Fraction(c) for c in coefficients))


def x_series(n: int) -> TruncatedRationalSeries:
    return series([1] + [0] * (n - 1))


def poincare(dims: Sequence[int], n: int) -> TruncatedRationalSeries:
    """Alternating exponential generating function of a dimension sequence."""
    if n < 1:
        raise ValueError("truncation degree must be >= 1")
    if len(dims) < n:
        raise ValueError(f"need {n} dimensions, got {len(dims)}")
    return TruncatedRationalSeries(
        tuple(
            Fraction((-1) ** k * dims[k - 1], factorial(k)) for k in range(1, n + 1)
        )
    )


def _mul_truncated(a: list[Fraction], b: list[Fraction], n: int) -> list[Fraction]:
    # index 0 is the constant term here; both inputs truncated at degree n
    out = [Fraction(0)] * (n + 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            if i + j > n:
                break
            if bj != 0:
                out[i + j] += ai * bj
    return out


def compose(
    f: TruncatedRationalSeries, g: TruncatedRationalSeries, n: int
) -> TruncatedRationalSeries:
    """Coefficients of f(g(x)) through degree n, by Horner over truncated products."""
    if f.truncation_degree < n or g.truncation_degree < n:
        raise ValueError(
            f"need both series truncated at >= {n}, got "
            f"{f.truncation_degree} and {g.truncation_degree}"
        )
    gc = [Fraction(0)] + [Fraction(c) for c in g.coefficients[:n]]
    acc = [Fraction(0)] * (n + 1)
    for k in range(n, 0, -1):
        acc[0] += f.coefficient(k)
        acc = _mul_truncated(acc, gc, n)
    assert acc[0] == 0  # g has no constant term, so neither does f(g)
    return TruncatedRationalSeries(tuple(acc[1:]))


def gk_defect(
    g_p: TruncatedRationalSeries, g_p_dual: TruncatedRationalSeries, n: int
) -> TruncatedRationalSeries:
    """compose(g_p, g_p_dual) - x; any nonzero coefficient refutes Koszulity."""
    return compose(g_p, g_p_dual, n) - x_series(n)
