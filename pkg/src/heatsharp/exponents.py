"""Lebesgue exponents on [1, inf] and Young triples.

Every exponent is stored by its reciprocal ``1/p`` as an exact
:class:`fractions.Fraction`, so the endpoints 1 and infinity, and
conjugate pairs such as 4/3 and 4, are represented without rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import DomainError, InvalidTriple

TRIPLE_TOL = 1e-14

ExponentLike = Union["Exponent", int, float, str, Fraction]


@dataclass(frozen=True, order=False)
class Exponent:
    """An extended exponent p in [1, inf], held as ``recip = 1/p``."""

    recip: Fraction

    def __post_init__(self):
        if not isinstance(self.recip, Fraction):
            object.__setattr__(self, "recip", Fraction(self.recip))
        if not 0 <= self.recip <= 1:
            raise DomainError(f"exponent must lie in [1, inf], got 1/p = {self.recip}")

    @classmethod
    def of(cls, value: ExponentLike) -> "Exponent":
        """Coerce ints, floats, fraction strings and ``"inf"`` to an Exponent."""
        if isinstance(value, Exponent):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        if isinstance(value, float):
            if math.isinf(value) and value > 0:
                return INF
            if math.isnan(value):
                raise DomainError("exponent is NaN")
            # repr keeps decimal literals like 1.5 exact as 3/2
            value = Fraction(repr(value))
        value = Fraction(value)
        if value < 1:
            raise DomainError(f"exponent must be >= 1, got {value}")
        return cls(1 / value)

    @classmethod
    def parse(cls, text: str) -> "Exponent":
        """Parse ``"2"``, ``"1.5"``, ``"4/3"`` or ``"inf"``."""
        s = text.strip().lower()
        if s in ("inf", "infinity", "+inf", "oo"):
            return INF
        try:
            value = Fraction(s)
        except (ValueError, ZeroDivisionError):
            raise DomainError(f"cannot parse exponent {text!r}") from None
        if value < 1:
            raise DomainError(f"exponent must be >= 1, got {text!r}")
        return cls(1 / value)

    @property
    def is_infinite(self) -> bool:
        return self.recip == 0

    @property
    def value(self) -> float:
        return math.inf if self.recip == 0 else float(1 / self.recip)

    def conjugate(self) -> "Exponent":
        return Exponent(1 - self.recip)

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        if self.recip == 0:
            return "inf"
        v = 1 / self.recip
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"

    def __repr__(self) -> str:
        return f"Exponent({self})"

    def __lt__(self, other: ExponentLike) -> bool:
        return self.recip > Exponent.of(other).recip

    def __le__(self, other: ExponentLike) -> bool:
        return self.recip >= Exponent.of(other).recip

    def __gt__(self, other: ExponentLike) -> bool:
        return self.recip < Exponent.of(other).recip

    def __ge__(self, other: ExponentLike) -> bool:
        return self.recip <= Exponent.of(other).recip


ONE = Exponent(Fraction(1))
TWO = Exponent(Fraction(1, 2))
INF = Exponent(Fraction(0))


def reciprocal(p: ExponentLike) -> Fraction:
    return Exponent.of(p).recip


def conjugate(p: ExponentLike) -> Exponent:
    """Return p' with 1/p + 1/p' = 1."""
    return Exponent.of(p).conjugate()


@dataclass(frozen=True)
class YoungTriple:
    """Exponents with 1/p + 1/q = 1 + 1/r."""

    p: Exponent
    q: Exponent
    r: Exponent

    def __post_init__(self):
        for name in ("p", "q", "r"):
            object.__setattr__(self, name, Exponent.of(getattr(self, name)))
        gap = self.p.recip + self.q.recip - 1 - self.r.recip
        if abs(float(gap)) > TRIPLE_TOL:
            raise InvalidTriple(
                f"1/p + 1/q - 1 - 1/r = {float(gap):.3g} for (p, q, r) = ({self.p}, {self.q}, {self.r})"
            )

    def as_strings(self) -> dict:
        return {"p": str(self.p), "q": str(self.q), "r": str(self.r)}


def young_r(p: ExponentLike, q: ExponentLike) -> YoungTriple:
    """Complete (p, q) to the Young triple, solving for r."""
    p, q = Exponent.of(p), Exponent.of(q)
    rr = p.recip + q.recip - 1
    if rr < 0:
        raise InvalidTriple(f"1/p + 1/q < 1 for (p, q) = ({p}, {q}); no admissible r")
    return YoungTriple(p, q, Exponent(rr))


def admissible_pairs(grid) -> list[tuple[Exponent, Exponent]]:
    """All (p, q) from ``grid`` x ``grid`` that admit a Young exponent r."""
    exps = [Exponent.of(g) for g in grid]
    return [(p, q) for p in exps for q in exps if p.recip + q.recip >= 1]


SAMPLE_GRID = ("1", "5/4", "4/3", "3/2", "2", "3", "4", "inf")
