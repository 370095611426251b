"""``gruss-lab`` command line.

Exit codes: 0 all satisfied, 1 violation found, 2 usage/schema/precondition
error, 3 numerical failure. ``GRUSS_LAB_TOL`` ("rel,abs" or a JSON object)
replaces the default tolerance; ``--tol`` takes precedence over both it and a
scenario's own ``tol``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from ..errors import NumericalError, PreconditionError, SchemaError
from ..matcore import ToleranceConfig
from ..scalar_center import distance_to_scalars
from .fuzz import FUZZ_TOL, FuzzConfig, fuzz
from .reproduce import reproduce_examples, rows_to_csv
from .scenario import matrix_from_json, parse, run_check

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3


def parse_tol(text: str) -> ToleranceConfig:
    text = text.strip()
    try:
        if text.startswith("{"):
            return ToleranceConfig.from_json(json.loads(text))
        parts = [float(p) for p in text.split(",")]
    except (ValueError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot parse tolerance {text!r}", "tol") from exc
    if len(parts) == 1:
        return ToleranceConfig(rel=parts[0])
    if len(parts) == 2:
        return ToleranceConfig(rel=parts[0], abs=parts[1])
    raise SchemaError(f"cannot parse tolerance {text!r}", "tol")


def _env_tol() -> ToleranceConfig | None:
    text = os.environ.get("GRUSS_LAB_TOL")
    return parse_tol(text) if text else None


def _complex_arg(text: str) -> list[float]:
    parts = [float(p) for p in text.split(",")]
    if len(parts) == 1:
        parts.append(0.0)
    if len(parts) != 2:
        raise SchemaError(f"expected re,im but got {text!r}")
    return parts


def _exponent_arg(text: str):
    return "inf" if text.lower() in ("inf", "infinity") else float(text)


def _load(path: str) -> dict:
    try:
        return parse(Path(path).read_bytes())
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from exc


def _apply_tol(doc: dict, args) -> dict:
    if args.tol:
        doc["tol"] = parse_tol(args.tol).to_json()
    elif "tol" not in doc:
        env = _env_tol()
        if env is not None:
            doc["tol"] = env.to_json()
    return doc


def _emit_report(rep) -> int:
    print(json.dumps(rep.to_json(), indent=2, sort_keys=True))
    return EXIT_OK if rep.satisfied else EXIT_VIOLATION


def cmd_check(args) -> int:
    doc = _apply_tol(_load(args.scenario), args)
    if args.assume_positive is not None:
        doc["assume_positive"] = args.assume_positive
    return _emit_report(run_check(doc))


def cmd_module_check(args) -> int:
    doc = _apply_tol(_load(args.scenario), args)
    doc["inequality"] = args.inequality
    return _emit_report(run_check(doc))


def cmd_trace_check(args) -> int:
    doc = {
        "inequality": f"trace.{args.variant}",
        "T": _load(args.T),
        "A": _load(args.A),
        "B": _load(args.B),
        "renormalize": args.renormalize,
    }
    if args.alpha:
        doc["alpha"] = _complex_arg(args.alpha)
    if args.beta:
        doc["beta"] = _complex_arg(args.beta)
    if args.variant == "pq":
        doc.update(p=_exponent_arg(args.p), q=_exponent_arg(args.q), r=_exponent_arg(args.r))
    return _emit_report(run_check(_apply_tol(doc, args)))


def cmd_gamma(args) -> int:
    cfg = parse_tol(args.tol) if args.tol else (_env_tol() or ToleranceConfig())
    res = distance_to_scalars(matrix_from_json(_load(args.matrix), "matrix"), cfg)
    print(json.dumps(res.to_json(), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_fuzz(args) -> int:
    tol = parse_tol(args.tol) if args.tol else (_env_tol() or FUZZ_TOL)
    config = FuzzConfig(
        inequality_id=args.inequality,
        dims=tuple(int(d) for d in args.dims.split(",")),
        trials=args.trials,
        master_seed=args.seed,
        tol=tol,
        map_family=args.family,
        output=args.out,
    )
    summary = fuzz(config, workers=args.workers)
    print(json.dumps(summary.to_json(), indent=2, sort_keys=True))
    return EXIT_VIOLATION if summary.violations else EXIT_OK


def cmd_reproduce(args) -> int:
    rows = reproduce_examples()
    if args.csv:
        sys.stdout.write(rows_to_csv(rows))
    else:
        print(json.dumps([r.to_json() for r in rows], indent=2))
    return EXIT_OK if all(r.passed for r in rows) else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gruss-lab", description="Evaluate and fuzz Gruss-type operator inequalities.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="evaluate one scenario file")
    p.add_argument("--scenario", required=True)
    p.add_argument("--tol")
    p.add_argument("--assume-positive", type=int, metavar="K")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("fuzz", help="random search for violations")
    p.add_argument("--inequality", required=True)
    p.add_argument("--dims", default="2,3,4,5")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--family", default="cp_kraus", help="cp_kraus, scaled_cp or builtin:<name>")
    p.add_argument("--out")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--tol")
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("reproduce", help="recompute the worked examples")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("gamma", help="distance to the scalars")
    p.add_argument("--matrix", required=True)
    p.add_argument("--tol")
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("trace-check", help="trace inequalities")
    p.add_argument("--variant", choices=["v1", "v2", "v3", "pq"], default="v1")
    p.add_argument("--p", default="4")
    p.add_argument("--q", default="4")
    p.add_argument("--r", default="2")
    p.add_argument("--T", required=True)
    p.add_argument("--A", required=True)
    p.add_argument("--B", required=True)
    p.add_argument("--alpha")
    p.add_argument("--beta")
    p.add_argument("--renormalize", action="store_true")
    p.add_argument("--tol")
    p.set_defaults(func=cmd_trace_check)

    p = sub.add_parser("module-check", help="Hilbert C*-module inequalities")
    p.add_argument(
        "--inequality",
        required=True,
        choices=["module.variance", "module.gruss", "module.lifted", "hilbert.gruss", "module.accretive"],
    )
    p.add_argument("--scenario", required=True)
    p.add_argument("--tol")
    p.set_defaults(func=cmd_module_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PreconditionError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
