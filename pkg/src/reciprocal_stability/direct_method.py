"""The direct method: rescaled iterates 2^n f(2^n x), limit detection, Psi,
and checkers for the hypotheses and the conclusion of the stability theorem.

Limits cannot be taken on a machine. A limit is *detected* when a window of
``W`` consecutive differences all have norm at most ``p^-M``; in an
ultrametric space this bounds every later partial difference as well.
Hypotheses that are limits (decay to zero) are adjudicated from finitely many
exact terms and the full evidence is kept on the verdict.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

from .errors import DegenerateDenominator, DomainError, InvalidParameter, LimitMissing
from .funceq import PointFunction, defect_eq1
from .valued_field import INF, NormValue, ValuationSpec, norm

DEFAULT_M = 30
DEFAULT_W = 8


class Condition(str, enum.Enum):
    EQT0 = "eqt0"
    EQT5 = "eqt5"
    PREMISE = "premise"
    TAU = "tau"


@dataclass(frozen=True)
class ConditionVerdict:
    """Outcome of one hypothesis check.

    ``evidence`` holds the exact ``(index, value)`` sequence the verdict was
    read from; ``witness`` is the first offending pair when ``holds`` is
    false.
    """

    condition: Condition
    holds: bool
    evidence: tuple[tuple[int, NormValue], ...] = ()
    witness: tuple[int, NormValue] | None = None
    note: str = ""
    skipped: int = 0
    details: tuple[Any, ...] = ()

    def __post_init__(self):
        if not self.holds and self.witness is None:
            raise ValueError("a failing verdict needs a witness")


@dataclass(frozen=True)
class IterateProfile:
    x: Fraction
    iterates: tuple[Fraction, ...]
    tail_norms: tuple[NormValue, ...]
    stabilized_at: int | None = None
    limit: Fraction | None = None
    truncated: str | None = None
    status: str = "computed"  # computed | stabilized | not_cauchy


@dataclass(frozen=True)
class PsiValue:
    x: Fraction
    terms: tuple[NormValue, ...]
    value: NormValue
    settled: bool

    @property
    def bound(self) -> NormValue:
        """The value to compare against; +inf when the maximum has not settled."""
        return self.value if self.settled else INF


@dataclass(frozen=True)
class BoundCheck:
    f_minus_g_norm: NormValue
    psi: NormValue
    bound_holds: bool


@dataclass(frozen=True)
class OrbitPoint:
    """Premise data at the orbit pair (0, 2^(k+1) x)."""

    k: int
    y: Fraction
    status: str  # ok | domain | degenerate
    defect_norm: NormValue | None = None
    mu: NormValue | None = None
    aux_defect_norm: NormValue | None = None
    harmonic_gap_norm: NormValue | None = None
    scaled_mu: NormValue | None = None
    reason: str = ""


def iterate_sequence(f: PointFunction, x, n_max: int, spec: ValuationSpec) -> IterateProfile:
    """S_n = 2^n f(2^n x) for n = 0..n_max, with |S_(n+1) - S_n|.

    A domain error at some 2^n x truncates the profile and is recorded.
    """
    x = Fraction(x)
    iterates: list[Fraction] = []
    truncated = None
    for n in range(n_max + 1):
        scale = 2**n
        try:
            iterates.append(scale * f(scale * x))
        except DomainError as exc:
            truncated = f"n={n}: {exc}"
            break
    tails = tuple(norm(spec, b - a) for a, b in zip(iterates, iterates[1:]))
    return IterateProfile(x, tuple(iterates), tails, truncated=truncated)


def detect_limit(profile: IterateProfile, spec: ValuationSpec,
                 M: int = DEFAULT_M, W: int = DEFAULT_W) -> IterateProfile:
    """Find the first n* with W consecutive tail norms <= p^-M from n*.

    The detected limit is the iterate at index n* + W - 1.
    """
    if W < 1 or len(profile.iterates) < W + 1:
        raise InvalidParameter(f"need at least W+1={W + 1} iterates, have {len(profile.iterates)}")
    threshold = spec.threshold(M)
    tails = profile.tail_norms
    run = 0
    for n, t in enumerate(tails):
        run = run + 1 if t <= threshold else 0
        if run == W:
            start = n - W + 1
            return IterateProfile(profile.x, profile.iterates, tails, start,
                                  profile.iterates[start + W - 1], profile.truncated, "stabilized")
    return IterateProfile(profile.x, profile.iterates, tails, None, None,
                          profile.truncated, "not_cauchy")


def psi_terms(mu, x, spec: ValuationSpec, count: int) -> list[NormValue]:
    """|2|^k mu(0, 2^(k+1) x) for k < count."""
    x = Fraction(x)
    two = norm(spec, 2)
    return [two**k * mu(0, 2 ** (k + 1) * x, spec) for k in range(count)]


def psi(mu, x, spec: ValuationSpec, n_max: int, W: int = DEFAULT_W) -> PsiValue:
    """Running maximum of the Psi terms up to n_max.

    It is settled when no term inside the last W reaches above the maximum
    of the earlier ones.
    """
    terms = psi_terms(mu, x, spec, n_max)
    value = max(terms) if terms else Fraction(0)
    settled = n_max > W and max(terms[: n_max - W]) >= value
    return PsiValue(Fraction(x), tuple(terms), value, settled)


def _decay_verdict(condition: Condition, seq: Sequence[NormValue], threshold, window: int,
                   note: str) -> ConditionVerdict:
    evidence = tuple(enumerate(seq))
    last = len(seq) - 1
    if seq[last] > threshold:
        return ConditionVerdict(condition, False, evidence, (last, seq[last]),
                                note + f"; final term exceeds threshold {threshold}")
    start = max(0, last - window)
    for n in range(start, last):
        if seq[n + 1] > seq[n]:
            return ConditionVerdict(condition, False, evidence, (n + 1, seq[n + 1]),
                                    note + "; increase inside the final window")
    return ConditionVerdict(condition, True, evidence, note=note)


def check_eqt0(mu, x, y, spec: ValuationSpec, n_max: int,
               M: int = DEFAULT_M, W: int = DEFAULT_W) -> ConditionVerdict:
    """|2|^n mu(2^(n+1) x, 2^(n+1) y) for n = 0..n_max must decay below p^-M."""
    x, y = Fraction(x), Fraction(y)
    two = norm(spec, 2)
    seq = [two**n * mu(2 ** (n + 1) * x, 2 ** (n + 1) * y, spec) for n in range(n_max + 1)]
    return _decay_verdict(Condition.EQT0, seq, spec.threshold(M), W,
                          f"pair ({x}, {y}), n <= {n_max}")


def uniqueness_sequence(terms: Sequence[NormValue], j_max: int, n_max: int) -> list[NormValue]:
    """T_j = max(terms[j : j + n_max]) for j = 0..j_max."""
    if len(terms) < j_max + n_max:
        raise InvalidParameter("not enough terms for the requested windows")
    return [max(terms[j: j + n_max]) for j in range(j_max + 1)]


def check_uniqueness_condition(mu, x, spec: ValuationSpec, j_max: int, n_max: int,
                               M: int = DEFAULT_M) -> ConditionVerdict:
    terms = psi_terms(mu, x, spec, j_max + n_max)
    T = uniqueness_sequence(terms, j_max, n_max)
    evidence = tuple(enumerate(T))
    for j in range(j_max):
        if T[j + 1] > T[j]:
            return ConditionVerdict(Condition.EQT5, False, evidence, (j + 1, T[j + 1]),
                                    "window maximum increased")
    threshold = spec.threshold(M)
    if T[j_max] > threshold:
        return ConditionVerdict(Condition.EQT5, False, evidence, (j_max, T[j_max]),
                                f"T_{j_max} exceeds threshold {threshold}")
    return ConditionVerdict(Condition.EQT5, True, evidence)


def _orbit_point(f: PointFunction, mu, x: Fraction, k: int, spec: ValuationSpec) -> OrbitPoint:
    y = 2 ** (k + 1) * x
    try:
        sample = defect_eq1(f, 0, y, spec)
    except DomainError as exc:
        return OrbitPoint(k, y, "domain", reason=str(exc))
    except DegenerateDenominator as exc:
        return OrbitPoint(k, y, "degenerate", reason=str(exc))
    bound = mu(0, y, spec)
    f0, fy, fx = f(0), f(y), f(y / 2)
    # f(0) + f(y) != 0 here, else defect_eq1 would have raised
    aux = fx - 2 * f0 * fy / (f0 + fy)
    scale = 2**k
    harmonic_gap = None
    if f0 != 0 and fy != 0:
        harmonic_gap = norm(spec, scale * fx - 1 / (1 / (2 * scale * fy) + 1 / (2 * scale * f0)))
    two = norm(spec, 2)
    return OrbitPoint(k, y, "ok", sample.defect_norm, bound, norm(spec, aux),
                      harmonic_gap, two**k * bound)


def check_premise_on_orbit(f: PointFunction, mu, x, spec: ValuationSpec,
                           n_max: int) -> ConditionVerdict:
    """Check |defect(0, 2^(k+1) x)| <= mu(0, 2^(k+1) x) for k < n_max.

    Each orbit point also carries the reduced one-variable defect
    |f(z) - 2f(0)f(2z)/(f(0)+f(2z))| at z = 2^k x, and the rescaled harmonic
    gap |2^k f(2^k x) - 1/(1/(2^(k+1) f(2^(k+1) x)) + 1/(2^(k+1) f(0)))|
    to be read against |2|^k mu(0, 2^(k+1) x). Points outside the domain or
    with a vanishing denominator are skipped and counted.
    """
    x = Fraction(x)
    points = tuple(_orbit_point(f, mu, x, k, spec) for k in range(n_max))
    evidence = tuple((p.k, p.defect_norm) for p in points if p.status == "ok")
    skipped = sum(p.status != "ok" for p in points)
    for p in points:
        if p.status == "ok" and p.defect_norm > p.mu:
            return ConditionVerdict(Condition.PREMISE, False, evidence, (p.k, p.defect_norm),
                                    f"defect norm exceeds mu={p.mu} at y={p.y}", skipped, points)
    return ConditionVerdict(Condition.PREMISE, True, evidence, skipped=skipped, details=points)


def verify_bound(f: PointFunction, profile: IterateProfile, psi_val: PsiValue,
                 spec: ValuationSpec) -> BoundCheck:
    """Compare |f(x) - g(x)| with Psi(x), g(x) being the detected limit."""
    if profile.limit is None:
        raise LimitMissing(f"no limit detected at x={profile.x}")
    gap = norm(spec, f(profile.x) - profile.limit)
    bound = psi_val.bound
    return BoundCheck(gap, bound, gap <= bound)
