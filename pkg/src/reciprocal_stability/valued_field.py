"""Exact rationals with p-adic and trivial valuations.

Field elements are :class:`fractions.Fraction` instances. Norm values are
either a non-negative ``Fraction`` or ``math.inf``; the two compare exactly
against each other, so maxima and bound checks never round.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from sympy import isprime

from .errors import InvalidParameter, ZeroToNegativePower

Rational = Fraction
NormValue = Union[Fraction, float]  # float only ever as math.inf

INF = math.inf

_RATIONAL_RE = re.compile(r"-?\d+(/\d+)?")


def parse_rational(text: str) -> Fraction:
    """Parse ``"-3/4"`` or ``"17"``; nothing else is accepted."""
    text = text.strip()
    if not _RATIONAL_RE.fullmatch(text):
        raise InvalidParameter(f"not a rational: {text!r}")
    if "/" in text and int(text.split("/")[1]) == 0:
        raise InvalidParameter(f"zero denominator: {text!r}")
    return Fraction(text)


def format_rational(q: Fraction | int) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_norm(v: NormValue) -> str:
    return "inf" if v == INF else format_rational(v)


def parse_norm(text: str) -> NormValue:
    if text.strip() == "inf":
        return INF
    v = parse_rational(text)
    if v < 0:
        raise InvalidParameter(f"negative norm value: {text!r}")
    return v


@dataclass(frozen=True)
class ValuationSpec:
    """Which valuation is in force: p-adic for a prime, or trivial."""

    kind: str
    prime: int | None = None

    def __post_init__(self):
        if self.kind == "padic":
            if self.prime is None or not isprime(self.prime):
                raise InvalidParameter(f"not a prime: {self.prime!r}")
        elif self.kind == "trivial":
            if self.prime is not None:
                raise InvalidParameter("trivial valuation takes no prime")
        else:
            raise InvalidParameter(f"unknown valuation kind {self.kind!r}")

    @classmethod
    def padic(cls, p: int) -> ValuationSpec:
        return cls("padic", p)

    @classmethod
    def trivial(cls) -> ValuationSpec:
        return cls("trivial")

    @classmethod
    def parse(cls, text: str | int) -> ValuationSpec:
        """``"trivial"`` or a prime such as ``"2"``."""
        if isinstance(text, int):
            return cls.padic(text)
        text = str(text).strip()
        if text == "trivial":
            return cls.trivial()
        if not text.isdigit():
            raise InvalidParameter(f"bad valuation {text!r}")
        return cls.padic(int(text))

    @property
    def is_padic(self) -> bool:
        return self.kind == "padic"

    def threshold(self, M: int) -> Fraction:
        """Detection threshold p^(-M); 2^(-M) under the trivial valuation."""
        base = self.prime if self.is_padic else 2
        return Fraction(1, base**M)

    def __str__(self):
        return str(self.prime) if self.is_padic else "trivial"


def valuation(q, p: int) -> int | float:
    """Exponent r with q = p^r * m/n and p dividing neither m nor n.

    Returns ``math.inf`` for q = 0.
    """
    q = Fraction(q)
    if q == 0:
        return INF
    r = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        r += 1
    while den % p == 0:
        den //= p
        r -= 1
    return r


def norm(spec: ValuationSpec, q) -> Fraction:
    q = Fraction(q)
    if q == 0:
        return Fraction(0)
    if not spec.is_padic:
        return Fraction(1)
    r = valuation(q, spec.prime)
    return Fraction(1, spec.prime**r) if r >= 0 else Fraction(spec.prime ** (-r))


def norm_pow(spec: ValuationSpec, q, e: int) -> Fraction:
    """|q|^e, exactly. |0|^0 is taken as 1."""
    n = norm(spec, q)
    if n == 0 and e < 0:
        raise ZeroToNegativePower(f"|0|^{e} is undefined")
    return n**e


@dataclass(frozen=True)
class UltrametricCheck:
    lhs: Fraction
    bound: Fraction
    holds: bool
    equality_forced: bool


def ultrametric_check(spec: ValuationSpec, x, y) -> UltrametricCheck:
    nx, ny = norm(spec, x), norm(spec, y)
    lhs = norm(spec, Fraction(x) + Fraction(y))
    bound = max(nx, ny)
    return UltrametricCheck(lhs, bound, lhs <= bound, nx != ny)
