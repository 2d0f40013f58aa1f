"""Batch experiments: sample points, run the direct-method pipeline on each,
and write deterministic JSON/CSV reports.

A config is a JSON object::

    {
      "valuation": "2",                         # a prime, or "trivial"
      "function": "reciprocal:a=1,c=0,f0=0",    # or {"base": ..., "perturbation": ...}
      "mu": "measured",                         # or constant:/powersum:/tausum:/measured:@file
      "samples": 100,
      "sample_strategy": {"kind": "grid_dyadic", "height": 7},
      "n_max": 64, "M": 30, "W": 8, "seed": 7,
      "outputs": [{"format": "json", "path": "report.json"}]
    }

``"mu": "measured"`` measures the defect norms of the function itself on
each sample's orbit, which makes the premise hold with equality there.
"""
from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import io
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .direct_method import (ConditionVerdict, OrbitPoint, check_eqt0, check_premise_on_orbit,
                            check_uniqueness_condition, detect_limit, iterate_sequence, psi,
                            verify_bound)
from .errors import ConfigError, DomainError, InvalidParameter, StabilityError
from .funceq import PointFunction, Reciprocal, parse_function
from .perturbation import (ControlFunction, compare_bounds, constant, measure_mu, orbit_pairs,
                           parse_control, parse_perturbation, perturb, power_sum, tau_sum)
from .valued_field import (INF, ValuationSpec, format_norm, format_rational, norm,
                           parse_rational)

log = logging.getLogger(__name__)

MAX_RATIONAL_CHARS = 4096
CONFIG_KEYS = {"valuation", "function", "mu", "samples", "sample_strategy", "n_max", "M", "W",
               "seed", "outputs"}
CSV_COLUMNS = ["x", "status", "premise_holds", "eqt0_holds", "stabilized_at", "limit", "psi",
               "psi_settled", "f_minus_g_norm", "bound_holds", "uniqueness_holds",
               "skipped_degenerate", "skipped_domain", "error"]
STATUSES = ("pass", "violation", "not_cauchy", "inapplicable", "error")


@dataclass(frozen=True)
class ExperimentConfig:
    valuation: ValuationSpec
    function: PointFunction
    mu: ControlFunction | None  # None: measure on each sample's orbit
    samples: int
    sample_strategy: dict
    n_max: int = 64
    M: int = 30
    W: int = 8
    seed: int = 0
    outputs: tuple = ()
    raw: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if self.M < 1:
            raise ConfigError("M must be >= 1")
        if self.W < 1 or self.n_max < self.W + 1:
            raise ConfigError("need W >= 1 and n_max >= W + 1")

    @property
    def mu_description(self) -> str:
        return "measured" if self.mu is None else self.mu.describe()


def _require_int(raw: dict, key: str, default=None) -> int:
    value = raw.get(key, default)
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(f"{key} must be an integer")
    return value


def load_config(source: dict | str | Path, base_dir: Path | None = None) -> ExperimentConfig:
    """Build a config from a dict or a JSON file. Unknown keys are rejected."""
    if not isinstance(source, dict):
        path = Path(source)
        try:
            raw = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        base_dir = path.parent if base_dir is None else base_dir
    else:
        raw = source
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = {"valuation", "function", "mu", "samples", "sample_strategy"} - set(raw)
    if missing:
        raise ConfigError(f"missing config keys: {sorted(missing)}")
    seed = _require_int(raw, "seed", 0)
    try:
        spec = ValuationSpec.parse(raw["valuation"])
        fn = raw["function"]
        if isinstance(fn, str):
            fn = {"base": fn}
        if not isinstance(fn, dict) or set(fn) - {"base", "perturbation"} or "base" not in fn:
            raise ConfigError("function must be a string or {base, perturbation}")
        f = parse_function(fn["base"])
        if fn.get("perturbation"):
            f = perturb(f, parse_perturbation(fn["perturbation"], default_seed=seed))
        mu = None if raw["mu"] == "measured" else parse_control(raw["mu"])
    except InvalidParameter as exc:
        raise ConfigError(str(exc)) from exc
    strategy = raw["sample_strategy"]
    if not isinstance(strategy, dict) or strategy.get("kind") not in ("grid_dyadic", "explicit"):
        raise ConfigError("sample_strategy.kind must be grid_dyadic or explicit")
    if strategy["kind"] == "grid_dyadic":
        if set(strategy) != {"kind", "height"}:
            raise ConfigError("grid_dyadic takes exactly a height")
        _require_int(strategy, "height")
    elif set(strategy) != {"kind", "values"} or not isinstance(strategy["values"], list):
        raise ConfigError("explicit takes exactly a list of values")
    outputs = []
    for out in raw.get("outputs", []):
        if not isinstance(out, dict) or set(out) != {"format", "path"} \
                or out["format"] not in ("json", "csv"):
            raise ConfigError(f"bad output entry {out!r}")
        p = Path(out["path"])
        if base_dir is not None and not p.is_absolute():
            p = base_dir / p
        outputs.append((out["format"], p))
    return ExperimentConfig(spec, f, mu, _require_int(raw, "samples"), dict(strategy),
                            _require_int(raw, "n_max", 64), _require_int(raw, "M", 30),
                            _require_int(raw, "W", 8), seed, tuple(outputs), dict(raw))


def dyadic_grid(height: int) -> list[Fraction]:
    """All +-m 2^t with odd 1 <= m <= height and |t| <= height, in a fixed order."""
    points = []
    for t in range(-height, height + 1):
        for m in range(1, height + 1, 2):
            q = Fraction(m) * Fraction(2) ** t
            points.extend((q, -q))
    return points


def _is_pole(f: PointFunction, x: Fraction) -> bool:
    return isinstance(f.base, Reciprocal) and x == -f.base.c


def draw_samples(config: ExperimentConfig) -> list[Fraction]:
    strategy = config.sample_strategy
    if strategy["kind"] == "explicit":
        try:
            values = [parse_rational(str(v)) for v in strategy["values"]]
        except InvalidParameter as exc:
            raise ConfigError(str(exc)) from exc
        if config.samples > len(values):
            raise ConfigError("more samples requested than explicit values given")
        return values[: config.samples]
    grid = [x for x in dyadic_grid(strategy["height"]) if not _is_pole(config.function, x)]
    if config.samples > len(grid):
        raise ConfigError(f"grid of height {strategy['height']} has only {len(grid)} points")
    if config.samples == len(grid):
        return grid
    rng = np.random.Generator(np.random.Philox(key=config.seed))
    picks = sorted(rng.choice(len(grid), size=config.samples, replace=False).tolist())
    return [grid[i] for i in picks]


# -- serialization -----------------------------------------------------------

def encode_rational(q: Fraction, spec: ValuationSpec):
    """Text form, or the norm plus a SHA-256 of ``"<num hex>/<den hex>"``
    when the text would exceed MAX_RATIONAL_CHARS."""
    # decimal digits are bounded by bits * log10(2) + 1; skip str() on huge ints
    approx = (abs(q.numerator).bit_length() + q.denominator.bit_length()) * 0.30103 + 3
    if approx <= MAX_RATIONAL_CHARS + 8:
        text = format_rational(q)
        if len(text) <= MAX_RATIONAL_CHARS:
            return text
    digest = hashlib.sha256(f"{q.numerator:x}/{q.denominator:x}".encode()).hexdigest()
    return {"norm": format_norm(norm(spec, q)), "sha256": digest}


def _flat(value) -> str:
    if isinstance(value, dict):
        return f"sha256:{value['sha256']}"
    return "" if value is None else str(value)


def _orbit_json(p: OrbitPoint, spec: ValuationSpec) -> dict:
    opt = lambda v: None if v is None else format_norm(v)  # noqa: E731
    return {"k": p.k, "y": encode_rational(p.y, spec), "status": p.status,
            "defect_norm": opt(p.defect_norm), "mu": opt(p.mu),
            "aux_defect_norm": opt(p.aux_defect_norm),
            "harmonic_gap_norm": opt(p.harmonic_gap_norm), "scaled_mu": opt(p.scaled_mu),
            "reason": p.reason}


def verdict_json(v: ConditionVerdict, spec: ValuationSpec) -> dict:
    out = {"condition": v.condition.value, "holds": v.holds, "note": v.note,
           "skipped": v.skipped,
           "evidence": [[n, None if val is None else format_norm(val)] for n, val in v.evidence],
           "witness": None if v.witness is None else [v.witness[0], format_norm(v.witness[1])]}
    orbit = [_orbit_json(p, spec) for p in v.details if isinstance(p, OrbitPoint)]
    if orbit:
        out["orbit"] = orbit
    return out


# -- pipeline ----------------------------------------------------------------

def run_sample(config: ExperimentConfig, x: Fraction) -> dict:
    """Full pipeline at one sample; errors are captured in the record."""
    spec, f, n = config.valuation, config.function, config.n_max
    rec: dict[str, Any] = {"x": format_rational(x), "status": "error", "error": None,
                           "premise": None, "eqt0": None, "profile": None, "psi": None,
                           "f_minus_g_norm": None, "bound_holds": None, "uniqueness": None,
                           "skipped_degenerate": 0, "skipped_domain": 0}
    try:
        mu = config.mu
        if mu is None:
            mu = measure_mu(f, orbit_pairs(x, 2 * n), spec)
        premise = check_premise_on_orbit(f, mu, x, spec, n)
        rec["premise"] = verdict_json(premise, spec)
        rec["skipped_degenerate"] = sum(p.status == "degenerate" for p in premise.details)
        rec["skipped_domain"] = sum(p.status == "domain" for p in premise.details)
        eqt0 = check_eqt0(mu, 0, x, spec, n, config.M, config.W)
        rec["eqt0"] = verdict_json(eqt0, spec)
        profile = iterate_sequence(f, x, n, spec)
        if profile.truncated and len(profile.iterates) < config.W + 1:
            raise DomainError(f"iterates stop early at {profile.truncated}")
        profile = detect_limit(profile, spec, config.M, config.W)
        rec["profile"] = {
            "status": profile.status, "stabilized_at": profile.stabilized_at,
            "limit": None if profile.limit is None else encode_rational(profile.limit, spec),
            "truncated": profile.truncated,
            "iterates": [encode_rational(s, spec) for s in profile.iterates],
            "tail_norms": [format_norm(t) for t in profile.tail_norms]}
        pv = psi(mu, x, spec, n, config.W)
        rec["psi"] = {"value": format_norm(pv.bound), "max_term": format_norm(pv.value),
                      "settled": pv.settled, "terms": [format_norm(t) for t in pv.terms]}
        rec["uniqueness"] = verdict_json(
            check_uniqueness_condition(mu, x, spec, n, n, config.M), spec)
        if profile.limit is None:
            rec["status"] = "not_cauchy"
            return rec
        bc = verify_bound(f, profile, pv, spec)
        rec["f_minus_g_norm"] = format_norm(bc.f_minus_g_norm)
        rec["bound_holds"] = bc.bound_holds
        hypotheses = (premise.holds and premise.skipped < n) and eqt0.holds
        if bc.bound_holds:
            rec["status"] = "pass"
        else:
            rec["status"] = "violation" if hypotheses else "inapplicable"
    except (StabilityError, ArithmeticError) as exc:
        rec["error"] = f"{type(exc).__name__}: {exc}"
        rec["status"] = "error"
    return rec


@dataclass
class StabilityReport:
    config: dict
    records: list[dict]
    aggregate: dict
    metadata: dict = field(default_factory=dict)

    @property
    def body(self) -> dict:
        return {"config": self.config, "samples": self.records, "aggregate": self.aggregate}

    def body_json(self) -> str:
        return json.dumps(self.body, sort_keys=True, separators=(",", ":"))

    def to_json(self) -> str:
        return json.dumps({"body": self.body, "metadata": self.metadata}, sort_keys=True,
                          separators=(",", ":")) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in csv_rows(self.records):
            writer.writerow(row)
        return buf.getvalue()

    @property
    def exit_status(self) -> int:
        return 0 if self.aggregate["pass"] == len(self.records) else 2

    def write(self, outputs=None) -> None:
        for fmt, path in (outputs if outputs is not None else ()):
            path = Path(path)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(self.to_json() if fmt == "json" else self.to_csv())


def csv_rows(records: list[dict]) -> list[dict]:
    rows = []
    for r in records:
        prof, pv = r["profile"] or {}, r["psi"] or {}
        rows.append({
            "x": r["x"], "status": r["status"],
            "premise_holds": _flat(r["premise"] and r["premise"]["holds"]),
            "eqt0_holds": _flat(r["eqt0"] and r["eqt0"]["holds"]),
            "stabilized_at": _flat(prof.get("stabilized_at")),
            "limit": _flat(prof.get("limit")),
            "psi": _flat(pv.get("value")), "psi_settled": _flat(pv.get("settled")),
            "f_minus_g_norm": _flat(r["f_minus_g_norm"]),
            "bound_holds": _flat(r["bound_holds"]),
            "uniqueness_holds": _flat(r["uniqueness"] and r["uniqueness"]["holds"]),
            "skipped_degenerate": str(r["skipped_degenerate"]),
            "skipped_domain": str(r["skipped_domain"]),
            "error": _flat(r["error"]),
        })
    return rows


def _aggregate(records: list[dict]) -> dict:
    agg = {s: 0 for s in STATUSES}
    notes = []
    for r in records:
        agg[r["status"]] += 1
        if r["status"] == "violation":
            notes.append(f"x={r['x']}: |f(x)-g(x)|={r['f_minus_g_norm']} exceeds "
                         f"Psi(x)={r['psi']['value']} while premise and eqt0 hold")
    agg["skipped_degenerate"] = sum(r["skipped_degenerate"] for r in records)
    agg["discrepancies"] = notes
    return agg


def config_echo(config: ExperimentConfig) -> dict:
    return {"valuation": str(config.valuation), "function": config.function.describe(),
            "mu": config.mu_description, "samples": config.samples,
            "sample_strategy": config.sample_strategy, "n_max": config.n_max, "M": config.M,
            "W": config.W, "seed": config.seed}


def run_experiment(config: ExperimentConfig, write: bool = True) -> StabilityReport:
    samples = draw_samples(config)
    log.info("running %d samples", len(samples))
    records = [run_sample(config, x) for x in samples]
    report = StabilityReport(
        config_echo(config), records, _aggregate(records),
        {"generated_at": _dt.datetime.now(_dt.timezone.utc).isoformat(),
         "version": __version__})
    if write:
        report.write(config.outputs)
    return report


# -- corollary audit ---------------------------------------------------------

AUDIT_XS = ("1", "2", "1/2", "3", "6", "1/4")
AUDIT_COLUMNS = ["family", "params", "x", "psi", "printed", "consistent", "note"]


def audit_sweep() -> list[ControlFunction]:
    return ([constant(Fraction(e)) for e in ("1", "1/2", "1/4")]
            + [power_sum(1, a) for a in (1, 2, 0, -2, -3)]
            + [tau_sum(1, b) for b in (2, 3)])


def audit_corollaries(spec: ValuationSpec, n_max: int = 64,
                      xs=AUDIT_XS) -> list[dict]:
    """Compare Psi against every printed corollary bound over a fixed sweep."""
    rows = []
    for mu in audit_sweep():
        family = {"constant": "cor1", "powersum": "cor2", "tausum": "cor3"}[mu.kind]
        params = mu.describe().partition(":")[2]
        for xt in xs:
            x = parse_rational(xt)
            try:
                cmp = compare_bounds(mu, x, spec, n_max)
            except InvalidParameter as exc:
                rows.append({"family": family, "params": params, "x": xt, "psi": "",
                             "printed": "", "consistent": "", "note": str(exc)})
                continue
            if cmp.alternative is None:
                rows.append({"family": family, "params": params, "x": xt,
                             "psi": format_norm(cmp.psi), "printed": format_norm(cmp.printed),
                             "consistent": str(cmp.consistent), "note": cmp.note})
                continue
            for reading, printed, ok in (("2|x|", cmp.printed, cmp.consistent),
                                         ("|2x|", cmp.alternative, cmp.consistent_alternative)):
                rows.append({"family": family, "params": f"{params},reading={reading}",
                             "x": xt, "psi": format_norm(cmp.psi),
                             "printed": format_norm(printed), "consistent": str(ok),
                             "note": cmp.note})
    return rows


def audit_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=AUDIT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
