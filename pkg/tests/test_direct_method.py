from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from reciprocal_stability import (ConstantShift, InvalidParameter, LimitMissing, MuUndefined,
                                  SeededDyadic,
                                  ValuationSpec, check_eqt0, check_premise_on_orbit,
                                  check_uniqueness_condition, constant, defect_eq1, detect_limit,
                                  exact_reciprocal, iterate_sequence, measure_mu, norm,
                                  orbit_pairs, perturb, power_sum, psi, tabulated, verify_bound)
from reciprocal_stability.direct_method import uniqueness_sequence

from conftest import rationals

P2 = ValuationSpec.padic(2)
TRIV = ValuationSpec.trivial()


def norm2_oracle(q: Fraction) -> Fraction:
    if q == 0:
        return Fraction(0)
    r = sympy.multiplicity(2, abs(q.numerator)) - sympy.multiplicity(2, q.denominator)
    return Fraction(2) ** (-r)


def shifted(eta, f0=0):
    return perturb(exact_reciprocal(1, 0, value_at_zero=f0), ConstantShift(Fraction(eta)))


def test_iterates_constant_for_c0():
    prof = iterate_sequence(exact_reciprocal(1, 0), 3, 5, P2)
    assert prof.iterates == (Fraction(1, 3),) * 6
    assert prof.tail_norms == (0,) * 5


def test_iterates_shifted_family():
    prof = iterate_sequence(exact_reciprocal(1, 1), 1, 3, P2)
    expected = [Fraction(2**n, 2**n + 1) for n in range(4)]
    assert list(prof.iterates) == expected == [Fraction(1, 2), Fraction(2, 3), Fraction(4, 5),
                                               Fraction(8, 9)]
    oracle = [norm2_oracle(b - a) for a, b in zip(expected, expected[1:])]
    # 8/9 - 4/5 = 4/45, whose 2-adic norm is 1/4
    assert oracle == [2, Fraction(1, 2), Fraction(1, 4)]
    assert list(prof.tail_norms) == oracle


def test_iterates_constant_perturbation():
    prof = iterate_sequence(shifted(16), 1, 3, P2)
    assert list(prof.iterates) == [1 + 2 ** (n + 4) for n in range(4)]
    assert list(prof.tail_norms) == [Fraction(1, 2 ** (n + 4)) for n in range(3)]


def test_iterates_truncate_at_pole():
    prof = iterate_sequence(exact_reciprocal(1, -4), 1, 5, P2)
    assert len(prof.iterates) == 2 and "n=2" in prof.truncated


def test_detect_limit_constant():
    prof = detect_limit(iterate_sequence(exact_reciprocal(5, 0), 3, 20, P2), P2, 30, 8)
    assert prof.stabilized_at == 0 and prof.limit == Fraction(5, 3)
    assert prof.status == "stabilized"


def test_detect_limit_shift():
    # oracle: tail n has norm 2^(-n-4); the first n with 2^(-n-4) <= 2^-30 is 26
    first = min(n for n in range(100) if Fraction(1, 2 ** (n + 4)) <= Fraction(1, 2**30))
    prof = detect_limit(iterate_sequence(shifted(16), 1, 64, P2), P2, 30, 8)
    assert prof.stabilized_at == first == 26
    assert norm(P2, prof.limit - 1) <= Fraction(1, 2**30)


def test_detect_limit_trivial_alternating():
    table = {Fraction(2**n): Fraction(1, 2**n) + (-1) ** n for n in range(40)}
    f = tabulated(table)
    prof = detect_limit(iterate_sequence(f, 1, 39, TRIV), TRIV, 30, 8)
    assert set(prof.tail_norms) == {1}
    assert prof.status == "not_cauchy" and prof.limit is None


def test_detect_limit_needs_window():
    with pytest.raises(InvalidParameter):
        detect_limit(iterate_sequence(exact_reciprocal(1, 0), 1, 3, P2), P2, 30, 8)


def test_psi_examples():
    pv = psi(constant(1), 1, P2, 40)
    assert list(pv.terms) == [Fraction(1, 2**k) for k in range(40)]
    assert pv.value == 1 and pv.settled
    pv = psi(power_sum(1, 1), 1, P2, 40)
    assert list(pv.terms) == [Fraction(1, 2 ** (2 * k + 1)) for k in range(40)]
    assert pv.value == Fraction(1, 2) and pv.settled
    pv = psi(constant(1), 1, TRIV, 20)
    assert set(pv.terms) == {1} and pv.value == 1


def test_psi_unsettled_when_growing():
    with pytest.raises(MuUndefined):
        psi(power_sum(1, -2), 1, P2, 20)
    growing = lambda x, y, spec: norm(spec, y) ** -2  # noqa: E731
    pv = psi(growing, 1, P2, 20)
    assert not pv.settled and pv.bound == float("inf")


def test_eqt0_examples():
    v = check_eqt0(constant(Fraction(3, 7)), 1, 5, P2, 64)
    assert v.holds
    v = check_eqt0(constant(1), 1, 1, TRIV, 40)
    assert not v.holds and {val for _, val in v.evidence} == {1} and v.witness is not None
    v = check_eqt0(power_sum(1, -2), 1, 1, P2, 40)
    # eps(|2^(n+1)|^-2 + |2^(n+1)|^-2) |2|^n = 2 * 2^(n+2)
    assert [val for _, val in v.evidence] == [Fraction(2 ** (n + 3)) for n in range(41)]
    assert not v.holds and v.witness[1] > 1


def test_uniqueness_examples():
    v = check_uniqueness_condition(constant(1), 1, P2, 40, 20)
    assert [T for _, T in v.evidence] == [Fraction(1, 2**j) for j in range(41)]
    assert v.holds
    v = check_uniqueness_condition(constant(1), 1, TRIV, 10, 10)
    assert [T for _, T in v.evidence] == [1] * 11 and not v.holds
    v = check_uniqueness_condition(power_sum(1, 1), 1, P2, 20, 20)
    assert [T for _, T in v.evidence] == [Fraction(1, 2 ** (2 * j + 1)) for j in range(21)]
    assert v.holds


def test_premise_exact_solution():
    v = check_premise_on_orbit(exact_reciprocal(1, 1), constant(1), 1, P2, 20)
    assert v.holds and all(val == 0 for _, val in v.evidence)


def test_premise_measured_holds_by_construction():
    f = shifted(16, f0=0)
    assert f(0) == 16
    mu = measure_mu(f, orbit_pairs(1, 20), P2)
    v = check_premise_on_orbit(f, mu, 1, P2, 20)
    assert v.holds and v.skipped == 0
    for p in v.details:
        assert p.defect_norm == p.mu


def test_premise_violation_witness():
    f = shifted(1, f0=0)
    assert f(0) == 1
    # hand oracle at k=0: f(1) - 2 f(0) f(2) / (f(0) + f(2)) = 2 - 6/5 = 4/5
    aux = f(1) - 2 * f(0) * f(2) / (f(0) + f(2))
    assert aux == Fraction(4, 5) and norm2_oracle(aux) == Fraction(1, 4)
    v = check_premise_on_orbit(f, constant(Fraction(1, 2**10)), 1, P2, 10)
    assert not v.holds and v.witness == (0, Fraction(1, 4))


@given(x=rationals(1000, 64, nonzero=True), eta=rationals(1000, 64, nonzero=True))
@settings(max_examples=50)
def test_orbit_diagnostics_consistent(x, eta):
    f = shifted(eta, f0=0)
    v = check_premise_on_orbit(f, constant(1), x, P2, 12)
    for p in v.details:
        if p.status != "ok":
            continue
        # substituting (0, 2z) reduces the defect to the one-variable form
        assert p.aux_defect_norm == p.defect_norm
        if p.harmonic_gap_norm is not None:
            assert p.harmonic_gap_norm == Fraction(1, 2**p.k) * p.aux_defect_norm
        assert p.scaled_mu == Fraction(1, 2**p.k)


def test_premise_skips_pole_at_zero():
    v = check_premise_on_orbit(exact_reciprocal(1, 0), constant(1), 1, P2, 5)
    assert v.skipped == 5 and all(p.status == "domain" for p in v.details)


def test_verify_bound_examples():
    f = exact_reciprocal(1, 0)
    prof = detect_limit(iterate_sequence(f, 3, 20, P2), P2)
    bc = verify_bound(f, prof, psi(constant(0), 3, P2, 20), P2)
    assert (bc.f_minus_g_norm, bc.psi, bc.bound_holds) == (0, 0, True)

    f = shifted(16, f0=0)
    prof = detect_limit(iterate_sequence(f, 1, 64, P2), P2)
    mu = measure_mu(f, orbit_pairs(1, 64), P2)
    pv = psi(mu, 1, P2, 64)
    bc = verify_bound(f, prof, pv, P2)
    assert bc.f_minus_g_norm == Fraction(1, 16)
    assert bc.bound_holds == (Fraction(1, 16) <= pv.bound)

    f = exact_reciprocal(1, 1)
    prof = detect_limit(iterate_sequence(f, 1, 64, P2), P2)
    bc = verify_bound(f, prof, psi(constant(0), 1, P2, 64), P2)
    assert (bc.f_minus_g_norm, bc.psi, bc.bound_holds) == (2, 0, False)


def test_verify_bound_requires_limit():
    table = {Fraction(2**n): Fraction(1, 2**n) + (-1) ** n for n in range(20)}
    f = tabulated(table)
    prof = detect_limit(iterate_sequence(f, 1, 19, TRIV), TRIV)
    with pytest.raises(LimitMissing):
        verify_bound(f, prof, psi(constant(0), 1, TRIV, 19), TRIV)


@given(x=rationals(10**4, 10**4, nonzero=True), seed=st.integers(0, 2**32),
       e=st.integers(1, 6))
@settings(max_examples=60, deadline=None)
def test_telescoping_and_perturbation_tail_bound(x, seed, e):
    f = perturb(exact_reciprocal(1, 0), SeededDyadic(e, seed))
    prof = iterate_sequence(f, x, 24, P2)
    S, tails = prof.iterates, prof.tail_norms
    for n in range(len(tails)):
        assert tails[n] <= Fraction(1, 2**n) * Fraction(1, 2 ** (e - 1))
    for n in range(0, len(S), 3):
        for m in range(n + 1, len(S), 4):
            assert norm(P2, S[m] - S[n]) <= max(tails[n:m])


@given(x=rationals(100, 100, nonzero=True), eps=rationals(100, 100, nonzero=True))
@settings(max_examples=40)
def test_psi_monotone_in_budget(x, eps):
    mu = power_sum(abs(eps), 1)
    values = [psi(mu, x, P2, n, W=4).value for n in range(5, 30, 3)]
    assert values == sorted(values)
    settled = psi(mu, x, P2, 12, W=4)
    assert settled.settled and psi(mu, x, P2, 40, W=4).value == settled.value


@given(terms=st.lists(rationals(100, 100).map(abs), min_size=12, max_size=30))
def test_window_maxima_non_increasing_for_decaying_terms(terms):
    decaying = [t / 2**k for k, t in enumerate(sorted(terms, reverse=True))]
    T = uniqueness_sequence(decaying, 5, len(decaying) - 5)
    assert all(b <= a for a, b in zip(T, T[1:]))


def test_verdicts_are_deterministic():
    f = perturb(exact_reciprocal(1, 0, 0), SeededDyadic(4, 11))
    mu = measure_mu(f, orbit_pairs(3, 40), P2)
    first = (check_premise_on_orbit(f, mu, 3, P2, 20), check_eqt0(mu, 0, 3, P2, 20),
             detect_limit(iterate_sequence(f, 3, 20, P2), P2, 10, 4))
    second = (check_premise_on_orbit(f, mu, 3, P2, 20), check_eqt0(mu, 0, 3, P2, 20),
              detect_limit(iterate_sequence(f, 3, 20, P2), P2, 10, 4))
    assert first == second
