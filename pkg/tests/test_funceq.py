from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given, strategies as st

from reciprocal_stability import (DegenerateDenominator, DomainError, InvalidParameter,
                                  ValuationSpec, defect_basic, defect_eq1, exact_reciprocal,
                                  parse_function, tabulated)

from conftest import rationals

P2 = ValuationSpec.padic(2)


def test_eval_examples():
    assert exact_reciprocal(1, 0)(2) == Fraction(1, 2)
    assert exact_reciprocal(1, 1)(1) == Fraction(1, 2)
    assert exact_reciprocal(2, 3)(1) == Fraction(1, 2)
    with pytest.raises(DomainError):
        exact_reciprocal(1, 1)(-1)
    with pytest.raises(InvalidParameter):
        exact_reciprocal(0, 1)


def test_value_at_zero():
    with pytest.raises(DomainError):
        exact_reciprocal(1, 0)(0)
    assert exact_reciprocal(1, 0, value_at_zero=5)(0) == 5
    assert exact_reciprocal(2, 3)(0) == Fraction(2, 3)
    assert exact_reciprocal(2, 3).value_at_zero == Fraction(2, 3)
    with pytest.raises(InvalidParameter):
        exact_reciprocal(2, 3, value_at_zero=1)


def test_tabulated():
    f = tabulated({1: 2, Fraction(1, 2): 3})
    assert f(1) == 2 and f(Fraction(1, 2)) == 3
    with pytest.raises(DomainError):
        f(7)


def test_parse_function():
    f = parse_function("reciprocal:a=1,c=0,f0=-3/4")
    assert f(0) == Fraction(-3, 4) and f(4) == Fraction(1, 4)
    assert f.describe() == "reciprocal:a=1,c=0,f0=-3/4"
    for bad in ["reciprocal:a=1", "reciprocal:a=1,c=0,z=1", "recip:a=1,c=0", "reciprocal:a=0,c=1"]:
        with pytest.raises(InvalidParameter):
            parse_function(bad)


def hand_defect(f, x, y):
    # written out term by term, kept apart from the library's grouping
    lhs = f(2 * x + y) + f((x + y) / 2)
    rhs = 2 * f(x) * f(y) / (f(x) + f(y)) + 2 * f(x + y) * f(y - x) / (3 * f(y - x) - f(x + y))
    return lhs - rhs


def test_defect_eq1_examples():
    f = exact_reciprocal(1, 0)
    x, y = Fraction(1), Fraction(2)
    assert f(2 * x + y) + f((x + y) / 2) == Fraction(1, 4) + Fraction(2, 3)
    assert hand_defect(f, x, y) == 0
    assert defect_eq1(f, 1, 2, P2).defect == 0
    assert defect_eq1(exact_reciprocal(1, 1), 1, 2, P2).defect == 0
    with pytest.raises(DegenerateDenominator):
        defect_eq1(f, 1, -1, P2)


def test_defect_basic_examples():
    assert defect_basic(exact_reciprocal(1, 0), 1, 1, P2).defect == 0
    assert defect_basic(exact_reciprocal(3, 0), 2, 4, P2).defect == 0
    d = defect_basic(exact_reciprocal(1, 1), 1, 1, P2)
    assert d.defect == Fraction(1, 12)
    assert d.defect_norm == 4
    with pytest.raises(DegenerateDenominator):
        defect_basic(exact_reciprocal(1, 0), 1, -1, P2)


def test_symbolic_zero_defect_oracle():
    a, c, x, y = sympy.symbols("a c x y")
    f = lambda t: a / (t + c)  # noqa: E731
    expr = f(2 * x + y) + f((x + y) / 2) - 2 * f(x) * f(y) / (f(x) + f(y)) \
        - 2 * f(x + y) * f(y - x) / (3 * f(y - x) - f(x + y))
    assert sympy.simplify(sympy.together(expr)) == 0


def test_perturbed_defect_matches_hand_oracle():
    f = parse_function("reciprocal:a=1,c=0,f0=0")
    g = lambda t: f(t) + 16  # noqa: E731
    from reciprocal_stability import ConstantShift, perturb
    h = perturb(f, ConstantShift(Fraction(16)))
    for x, y in [(1, 2), (Fraction(1, 3), 5), (0, 4)]:
        assert defect_eq1(h, x, y, P2).defect == hand_defect(g, Fraction(x), Fraction(y))


@given(a=rationals(100, 100, nonzero=True), c=rationals(100, 100),
       x=rationals(1000, 64), y=rationals(1000, 64))
def test_family_has_zero_defect(a, c, x, y):
    f = exact_reciprocal(a, c)
    try:
        sample = defect_eq1(f, x, y, P2)
    except (DomainError, DegenerateDenominator):
        assume(False)
    assert sample.defect == 0 and sample.defect_norm == 0


@given(a=rationals(100, 100, nonzero=True), x=rationals(1000, 64), y=rationals(1000, 64))
def test_basic_equation_zero_defect_for_c0(a, x, y):
    f = exact_reciprocal(a, 0)
    try:
        sample = defect_basic(f, x, y, P2)
    except (DomainError, DegenerateDenominator):
        assume(False)
    assert sample.defect == 0


@given(a=rationals(100, 100, nonzero=True), x=rationals(nonzero=True))
def test_degree_minus_one_homogeneity(a, x):
    f = exact_reciprocal(a, 0)
    assert f(2 * x) == f(x) / 2


@given(x=rationals(1000, 64), y=rationals(1000, 64))
def test_defect_is_deterministic(x, y):
    f = exact_reciprocal(Fraction(3, 7), Fraction(1, 5))
    try:
        first = defect_eq1(f, x, y, P2)
    except (DomainError, DegenerateDenominator):
        assume(False)
    assert defect_eq1(f, x, y, P2) == first
