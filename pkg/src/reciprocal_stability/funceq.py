"""Defect operators for the reciprocal equations and the a/(x+c) family.

The main equation is

    f(2x+y) + f((x+y)/2) = 2f(x)f(y)/(f(x)+f(y)) + 2f(x+y)f(y-x)/(3f(y-x)-f(x+y))

and the basic one is f(x+y) = f(x)f(y)/(f(x)+f(y)). A defect is the left
side minus the right side, computed exactly.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from types import MappingProxyType
from typing import TYPE_CHECKING, Mapping

from .errors import DegenerateDenominator, DomainError, InvalidParameter
from .valued_field import ValuationSpec, format_rational, norm, parse_rational

if TYPE_CHECKING:
    from .perturbation import Perturbation


@dataclass(frozen=True)
class Reciprocal:
    a: Fraction
    c: Fraction

    def __str__(self):
        return f"reciprocal:a={format_rational(self.a)},c={format_rational(self.c)}"


@dataclass(frozen=True)
class Tabulated:
    table: Mapping[Fraction, Fraction] = field(hash=False)

    def __post_init__(self):
        object.__setattr__(
            self, "table",
            MappingProxyType({Fraction(k): Fraction(v) for k, v in self.table.items()}),
        )

    def __str__(self):
        return f"tabulated:{len(self.table)} points"


@dataclass(frozen=True)
class PointFunction:
    """An evaluable f with an explicit domain.

    ``value_at_zero`` is the designated base value at 0 for a Reciprocal
    base with c = 0, where a/x is singular. A perturbation, when present,
    is added on top of the base value everywhere, including at 0.
    """

    base: Reciprocal | Tabulated
    value_at_zero: Fraction | None = None
    perturbation: Perturbation | None = None

    def __call__(self, x) -> Fraction:
        return evaluate(self, x)

    def describe(self) -> str:
        text = str(self.base)
        if isinstance(self.base, Reciprocal) and self.base.c == 0 and self.value_at_zero is not None:
            text += f",f0={format_rational(self.value_at_zero)}"
        if self.perturbation is not None:
            text += f" + {self.perturbation.describe()}"
        return text


def _base_value(f: PointFunction, x: Fraction) -> Fraction:
    base = f.base
    if isinstance(base, Reciprocal):
        if x == 0 and base.c == 0:
            if f.value_at_zero is None:
                raise DomainError("f(0) is singular for c = 0 and no value_at_zero is set")
            return f.value_at_zero
        if x == -base.c:
            raise DomainError(f"x = {format_rational(x)} is the pole of {base}")
        return base.a / (x + base.c)
    try:
        return base.table[x]
    except KeyError:
        if x == 0 and f.value_at_zero is not None:
            return f.value_at_zero
        raise DomainError(f"x = {format_rational(x)} is not tabulated") from None


def evaluate(f: PointFunction, x) -> Fraction:
    x = Fraction(x)
    value = _base_value(f, x)
    if f.perturbation is not None:
        value += f.perturbation(x)
    return value


def exact_reciprocal(a, c, value_at_zero=None) -> PointFunction:
    """The solution a/(x+c), unperturbed.

    For c != 0 the value at zero is a/c; for c = 0 it is left unset unless
    given explicitly.
    """
    a, c = Fraction(a), Fraction(c)
    if a == 0:
        raise InvalidParameter("a must be nonzero")
    if c != 0:
        if value_at_zero is not None and Fraction(value_at_zero) != a / c:
            raise InvalidParameter("value_at_zero is fixed to a/c when c != 0")
        value_at_zero = a / c
    elif value_at_zero is not None:
        value_at_zero = Fraction(value_at_zero)
    return PointFunction(Reciprocal(a, c), value_at_zero)


def tabulated(table: Mapping, value_at_zero=None) -> PointFunction:
    v0 = None if value_at_zero is None else Fraction(value_at_zero)
    return PointFunction(Tabulated(dict(table)), v0)


_FN_RE = re.compile(r"reciprocal:(.*)")


def parse_function(text: str) -> PointFunction:
    """Parse ``reciprocal:a=<r>,c=<r>[,f0=<r>]``."""
    m = _FN_RE.fullmatch(text.strip())
    if not m:
        raise InvalidParameter(f"bad function description {text!r}")
    params = {}
    for item in m.group(1).split(","):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in ("a", "c", "f0") or key in params:
            raise InvalidParameter(f"bad function parameter {item!r}")
        params[key] = parse_rational(value)
    if "a" not in params or "c" not in params:
        raise InvalidParameter("function needs both a and c")
    return exact_reciprocal(params["a"], params["c"], params.get("f0"))


@dataclass(frozen=True)
class DefectSample:
    x: Fraction
    y: Fraction
    defect: Fraction
    defect_norm: Fraction


def _harmonic(u: Fraction, v: Fraction) -> Fraction:
    if u + v == 0:
        raise DegenerateDenominator("f(x) + f(y) = 0")
    return u * v / (u + v)


def defect_eq1(f: PointFunction, x, y, spec: ValuationSpec) -> DefectSample:
    x, y = Fraction(x), Fraction(y)
    # f(x) + f(y) = 0 is reported ahead of domain errors at the other points
    first = 2 * _harmonic(f(x), f(y))
    f_2xy = f(2 * x + y)
    f_mid = f((x + y) / 2)
    f_sum, f_diff = f(x + y), f(y - x)
    second_den = 3 * f_diff - f_sum
    if second_den == 0:
        raise DegenerateDenominator("3f(y-x) - f(x+y) = 0")
    defect = f_2xy + f_mid - first - 2 * f_sum * f_diff / second_den
    return DefectSample(x, y, defect, norm(spec, defect))


def defect_basic(f: PointFunction, x, y, spec: ValuationSpec) -> DefectSample:
    x, y = Fraction(x), Fraction(y)
    harmonic = _harmonic(f(x), f(y))
    defect = f(x + y) - harmonic
    return DefectSample(x, y, defect, norm(spec, defect))
