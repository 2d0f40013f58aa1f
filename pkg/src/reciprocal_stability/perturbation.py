"""Control functions, controlled perturbations, and the corollary bounds.

Four control families are supported:

* ``constant``  : mu(x, y) = eps
* ``powersum``  : mu(x, y) = eps (|x|^a + |y|^a), integer a != -1
* ``tausum``    : mu(x, y) = delta (tau(|x|) + tau(|y|)), tau(t) = t^beta
* ``measured``  : a finite table of observed defect norms
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .direct_method import DEFAULT_W, Condition, ConditionVerdict, psi
from .errors import (AlreadyPerturbed, DegenerateDenominator, DomainError, InvalidParameter,
                     MuUndefined, ZeroToNegativePower)
from .funceq import PointFunction, defect_eq1
from .valued_field import (INF, NormValue, ValuationSpec, format_norm, format_rational, norm,
                           norm_pow, parse_norm, parse_rational)

KINDS = ("constant", "powersum", "tausum", "measured")


@dataclass(frozen=True)
class ControlFunction:
    kind: str
    epsilon: Fraction | None = None
    a: int | None = None
    delta: Fraction | None = None
    beta: int | None = None
    table: Mapping[tuple[Fraction, Fraction], NormValue] | None = field(default=None, hash=False)
    skipped: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameter(f"unknown control kind {self.kind!r}")
        if self.kind in ("constant", "powersum"):
            if self.epsilon is None or self.epsilon < 0:
                raise InvalidParameter("epsilon must be a non-negative rational")
        if self.kind == "powersum" and (not isinstance(self.a, int) or self.a == -1):
            raise InvalidParameter("powersum exponent must be an integer other than -1")
        if self.kind == "tausum":
            if self.delta is None or self.delta <= 0:
                raise InvalidParameter("delta must be positive")
            if not isinstance(self.beta, int) or self.beta < 2:
                raise InvalidParameter("tau(t) = t^beta needs an integer beta >= 2")
        if self.kind == "measured":
            table = {(Fraction(x), Fraction(y)): v for (x, y), v in (self.table or {}).items()}
            object.__setattr__(self, "table", MappingProxyType(table))

    def __call__(self, x, y, spec: ValuationSpec) -> NormValue:
        return mu_eval(self, x, y, spec)

    def describe(self) -> str:
        if self.kind == "constant":
            return f"constant:eps={format_rational(self.epsilon)}"
        if self.kind == "powersum":
            return f"powersum:eps={format_rational(self.epsilon)},a={self.a}"
        if self.kind == "tausum":
            return f"tausum:delta={format_rational(self.delta)},beta={self.beta}"
        return f"measured:{len(self.table)} entries"


def constant(eps) -> ControlFunction:
    return ControlFunction("constant", epsilon=Fraction(eps))


def power_sum(eps, a: int) -> ControlFunction:
    return ControlFunction("powersum", epsilon=Fraction(eps), a=a)


def tau_sum(delta, beta: int) -> ControlFunction:
    return ControlFunction("tausum", delta=Fraction(delta), beta=beta)


def measured(table: Mapping, skipped: int = 0) -> ControlFunction:
    return ControlFunction("measured", table=table, skipped=skipped)


def mu_eval(mu: ControlFunction, x, y, spec: ValuationSpec) -> NormValue:
    x, y = Fraction(x), Fraction(y)
    if mu.kind == "constant":
        return mu.epsilon
    if mu.kind == "measured":
        try:
            return mu.table[(x, y)]
        except KeyError:
            raise MuUndefined(f"no measured value at ({x}, {y})") from None
    eps, e = (mu.epsilon, mu.a) if mu.kind == "powersum" else (mu.delta, mu.beta)
    try:
        return eps * (norm_pow(spec, x, e) + norm_pow(spec, y, e))
    except ZeroToNegativePower as exc:
        raise MuUndefined(str(exc)) from None


def _kv(body: str, allowed: set[str]) -> dict[str, str]:
    out = {}
    for item in body.split(","):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in allowed or key in out:
            raise InvalidParameter(f"bad parameter {item!r}")
        out[key] = value.strip()
    if set(out) != allowed:
        raise InvalidParameter(f"expected parameters {sorted(allowed)}")
    return out


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise InvalidParameter(f"not an integer: {text!r}") from None


def read_table(path) -> dict[tuple[Fraction, Fraction], NormValue]:
    """Read a measured table: one ``x y norm`` line per entry."""
    table = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise InvalidParameter(f"{path}:{lineno}: expected 'x y norm'")
        x, y = parse_rational(parts[0]), parse_rational(parts[1])
        table[(x, y)] = parse_norm(parts[2])
    return table


def write_table(mu: ControlFunction, path) -> None:
    lines = [f"{format_rational(x)} {format_rational(y)} {format_norm(v)}"
             for (x, y), v in mu.table.items()]
    Path(path).write_text("\n".join(lines) + "\n")


def parse_control(text: str) -> ControlFunction:
    """Parse the text forms ``constant:eps=..``, ``powersum:eps=..,a=..``,
    ``tausum:delta=..,beta=..`` and ``measured:@path``."""
    kind, _, body = text.strip().partition(":")
    if kind == "constant":
        return constant(parse_rational(_kv(body, {"eps"})["eps"]))
    if kind == "powersum":
        p = _kv(body, {"eps", "a"})
        return power_sum(parse_rational(p["eps"]), _int(p["a"]))
    if kind == "tausum":
        p = _kv(body, {"delta", "beta"})
        return tau_sum(parse_rational(p["delta"]), _int(p["beta"]))
    if kind == "measured" and body.startswith("@"):
        return measured(read_table(body[1:]))
    raise InvalidParameter(f"bad control function description {text!r}")


# -- perturbations ---------------------------------------------------------

@lru_cache(maxsize=1 << 16)
def dyadic_exponent(seed: int, x: Fraction) -> int:
    """Deterministic even exponent u(x) in {0, 2, ..., 14}.

    Philox is keyed by the seed; the counter is a hash of the canonical text
    of x, so every x gets its own independent stream. Even values keep the
    2-adic norms of neighbouring iterate terms distinct.
    """
    digest = hashlib.blake2b(format_rational(x).encode(), digest_size=32).digest()
    counter = int.from_bytes(digest, "little")
    gen = np.random.Generator(np.random.Philox(key=seed, counter=counter))
    return 2 * int(gen.integers(0, 8))


@dataclass(frozen=True)
class ConstantShift:
    eta: Fraction

    def __call__(self, x) -> Fraction:
        return self.eta

    def describe(self) -> str:
        return f"shift:eta={format_rational(self.eta)}"


@dataclass(frozen=True)
class SeededDyadic:
    """delta(x) = 2^(e + u(x)); at p = 2 its norm never exceeds 2^-e."""

    e: int
    seed: int

    def __post_init__(self):
        if self.e < 1:
            raise InvalidParameter("e must be >= 1")
        if self.seed < 0:
            raise InvalidParameter("seed must be non-negative")

    def __call__(self, x) -> Fraction:
        return Fraction(2 ** (self.e + dyadic_exponent(self.seed, Fraction(x))))

    def describe(self) -> str:
        return f"dyadic:e={self.e},seed={self.seed}"


Perturbation = ConstantShift | SeededDyadic


def parse_perturbation(text: str, default_seed: int | None = None):
    """``shift:eta=<r>`` or ``dyadic:e=<int>[,seed=<int>]``."""
    kind, _, body = text.strip().partition(":")
    if kind == "shift":
        return ConstantShift(parse_rational(_kv(body, {"eta"})["eta"]))
    if kind == "dyadic":
        keys = {"e", "seed"} if "seed=" in body else {"e"}
        p = _kv(body, keys)
        seed = _int(p["seed"]) if "seed" in p else default_seed
        if seed is None:
            raise InvalidParameter("dyadic perturbation needs a seed")
        return SeededDyadic(_int(p["e"]), seed)
    raise InvalidParameter(f"bad perturbation description {text!r}")


def perturb(f0: PointFunction, pert) -> PointFunction:
    if f0.perturbation is not None:
        raise AlreadyPerturbed(f"{f0.describe()} is already perturbed")
    return replace(f0, perturbation=pert)


def measure_mu(f: PointFunction, pairs: Iterable, spec: ValuationSpec) -> ControlFunction:
    """Tightest control function on the given pairs: the observed defect norms.

    Inadmissible pairs are left out of the table and counted in ``skipped``.
    """
    table = {}
    skipped = 0
    for x, y in pairs:
        try:
            table[(Fraction(x), Fraction(y))] = defect_eq1(f, x, y, spec).defect_norm
        except (DomainError, DegenerateDenominator):
            skipped += 1
    return measured(table, skipped)


def orbit_pairs(x, count: int) -> list[tuple[Fraction, Fraction]]:
    """The pairs (0, 2^(k+1) x), k < count, at which Psi reads mu."""
    x = Fraction(x)
    return [(Fraction(0), 2 ** (k + 1) * x) for k in range(count)]


# -- tau admissibility and printed corollary bounds -------------------------

def check_tau(beta: int, spec: ValuationSpec) -> ConditionVerdict:
    """Admissibility of tau(t) = t^beta: tau(|2|t) <= tau(|2|)tau(t) and tau(|2|) < |2|.

    The first condition is an identity for a power, (|2|t)^beta = |2|^beta t^beta.
    """
    two = norm(spec, 2)
    tau_two = two**beta
    samples = [Fraction(0), Fraction(1), two, Fraction(1, 3), Fraction(5, 2)]
    submult = all((two * t) ** beta <= tau_two * t**beta for t in samples)
    details = (("abs2", two), ("tau_abs2", tau_two), ("submultiplicative", submult))
    evidence = ((0, tau_two),)
    if not submult:
        return ConditionVerdict(Condition.TAU, False, evidence, (0, tau_two),
                                "submultiplicativity fails", details=details)
    if not tau_two < two:
        return ConditionVerdict(Condition.TAU, False, evidence, (0, tau_two),
                                f"tau(|2|) = {tau_two} is not below |2| = {two}", details=details)
    return ConditionVerdict(Condition.TAU, True, evidence,
                            f"tau(|2|) = {tau_two} < |2| = {two}", details=details)


@dataclass(frozen=True)
class CorollaryBound:
    corollary: int
    printed: Fraction
    alternative: Fraction | None = None  # tau(|2x|) reading of the third corollary


def corollary_bound(mu: ControlFunction, x, spec: ValuationSpec) -> CorollaryBound:
    """The closed-form bound printed with the corollary matching ``mu.kind``.

    The third corollary's ``tau(2|x|)`` is read as tau applied to the real
    number 2*|x|; the reading tau(|2x|) is returned alongside.
    """
    x = Fraction(x)
    two = norm(spec, 2)
    if mu.kind == "constant":
        return CorollaryBound(1, mu.epsilon)
    if mu.kind == "powersum":
        a = mu.a
        if a < 0 and x == 0:
            raise InvalidParameter("|0|^a is undefined for a < 0")
        nx = norm_pow(spec, x, a)
        if a > -1:
            return CorollaryBound(2, two**2 * mu.epsilon * nx)
        return CorollaryBound(2, mu.epsilon * nx / two ** (a - 1))
    if mu.kind == "tausum":
        verdict = check_tau(mu.beta, spec)
        if not verdict.holds:
            raise InvalidParameter(f"tau is not admissible: {verdict.note}")
        printed = mu.delta * (2 * norm(spec, x)) ** mu.beta
        alternative = mu.delta * norm(spec, 2 * x) ** mu.beta
        return CorollaryBound(3, printed, alternative)
    raise InvalidParameter("no corollary is stated for a measured control function")


@dataclass(frozen=True)
class BoundComparison:
    corollary: int
    psi: NormValue
    printed: Fraction
    consistent: bool
    alternative: Fraction | None = None
    consistent_alternative: bool | None = None
    note: str = ""


def compare_bounds(mu: ControlFunction, x, spec: ValuationSpec, n_max: int = 64,
                   W: int = DEFAULT_W) -> BoundComparison:
    """Psi(x) from the direct method against the printed corollary bound.

    Psi is reported as +inf when its running maximum has not settled within
    n_max terms, or when mu has a pole on the orbit (0, 2^(k+1) x).
    """
    cb = corollary_bound(mu, x, spec)
    note = ""
    try:
        pv = psi(mu, x, spec, n_max, W)
        value = pv.bound
        if not pv.settled:
            note = f"Psi still growing at n_max={n_max} (last term {format_norm(pv.terms[-1])})"
    except MuUndefined as exc:
        value = INF
        note = f"mu is infinite on the orbit: {exc}"
    alt_ok = None if cb.alternative is None else value <= cb.alternative
    return BoundComparison(cb.corollary, value, cb.printed, value <= cb.printed,
                           cb.alternative, alt_ok, note)
