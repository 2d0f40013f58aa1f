"""``stability`` command line.

Exit statuses: 0 all checks passed, 2 completed with violations, 1 bad
configuration or I/O. ``defect`` exits 3 on a domain error and 4 on a
degenerate denominator.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import ConfigError, DegenerateDenominator, DomainError, StabilityError
from .funceq import defect_eq1, parse_function
from .harness import audit_corollaries, audit_csv, load_config, run_experiment
from .valued_field import ValuationSpec, format_norm, format_rational, norm, parse_rational, valuation

EXIT_CODES = {DomainError: 3, DegenerateDenominator: 4}


def _verify(args) -> int:
    config = load_config(args.config)
    report = run_experiment(config)
    agg = report.aggregate
    print(" ".join(f"{k}={agg[k]}" for k in ("pass", "violation", "not_cauchy",
                                             "inapplicable", "error")))
    for note in agg["discrepancies"]:
        print(note)
    return report.exit_status


def _defect(args) -> int:
    spec = ValuationSpec.parse(args.prime)
    f = parse_function(args.fn)
    sample = defect_eq1(f, parse_rational(args.x), parse_rational(args.y), spec)
    print(f"defect: {format_rational(sample.defect)}")
    print(f"norm: {format_norm(sample.defect_norm)}")
    return 0


def _norms(args) -> int:
    spec = ValuationSpec.parse(args.prime)
    q = parse_rational(args.value)
    if spec.is_padic:
        v = valuation(q, spec.prime)
        print(f"valuation: {'inf' if q == 0 else v}")
    print(f"norm: {format_norm(norm(spec, q))}")
    return 0


def _audit(args) -> int:
    spec = ValuationSpec.parse(args.prime)
    text = audit_csv(audit_corollaries(spec, args.n_max))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stability", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run an experiment config")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_verify)

    p = sub.add_parser("defect", help="defect of the main equation at (x, y)")
    p.add_argument("--fn", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--prime", default="2")
    p.set_defaults(func=_defect)

    p = sub.add_parser("norms", help="valuation and norm of a rational")
    p.add_argument("--prime", required=True)
    p.add_argument("--value", required=True)
    p.set_defaults(func=_norms)

    p = sub.add_parser("audit-corollaries", help="compare Psi with the printed corollary bounds")
    p.add_argument("--prime", default="2")
    p.add_argument("--out")
    p.add_argument("--n-max", type=int, default=64)
    p.set_defaults(func=_audit)
    return parser


def main(argv=None) -> int:
    # values such as "-3/4" must not be taken for options
    argv = _join_negative(list(sys.argv[1:] if argv is None else argv))
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except tuple(EXIT_CODES) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CODES[type(exc)]
    except (ConfigError, StabilityError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def _join_negative(argv: list[str]) -> list[str]:
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a.startswith("--") and "=" not in a and i + 1 < len(argv) \
                and argv[i + 1][:1] == "-" and argv[i + 1][1:2].isdigit():
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


if __name__ == "__main__":
    sys.exit(main())
