"""Command-line front end.

Exit codes: 0 all checks pass, 1 a verification failed, 2 usage or parse
error, 3 numeric instability.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

import mpmath

from . import catalog as cat
from . import dsl
from .pell import j_n, omega_n, theta_n, v_m
from .quadfield import (
    NumericInstabilityError,
    e2_evaluator,
    ideal_counts,
    linear_grid,
    lvalue_extract,
    verify_theorem2,
)
from .series import DEFAULT_DIGITS, rational_str

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

SEQUENCES = {"omega": omega_n, "theta": theta_n, "v": v_m, "j": j_n}
PARTITION_IDS = ("1.1", "1.3", "1.4", "2.22")


def _write_json(path: str | None, payload) -> None:
    if path is None:
        return
    text = json.dumps(payload, indent=2)
    if path == "-":
        print(text)
    else:
        Path(path).write_text(text + "\n", encoding="utf-8")


def _parse_indices(spec: str) -> list[int]:
    if ":" in spec:
        a, b = spec.split(":", 1)
        lo, hi = int(a), int(b)
        if hi < lo:
            raise ValueError(f"empty index range {spec!r}")
        return list(range(lo, hi + 1))
    return [int(x) for x in spec.split(",")]


def cmd_verify(args) -> int:
    if args.script:
        rep = dsl.run_script(args.script, args.order, args.torder)
        for r in rep.assertions:
            print(r.summary())
        _write_json(args.json, [r.to_json() for r in rep.assertions])
        return EXIT_OK if rep.passed else EXIT_FAIL
    ids = list(cat.CATALOG_IDS) if args.id == "all" else [args.id]
    reports = [cat.verify(i, args.order) for i in ids]
    for r in reports:
        print(r.summary())
    _write_json(args.json, reports[0].to_json() if len(reports) == 1 else [r.to_json() for r in reports])
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_diagnose(args) -> int:
    d = cat.diagnose_full(args.id, args.order)
    r = d.report
    print(r.summary())
    for n in r.notes:
        print("  " + n)
    _write_json(args.json, r.to_json())
    return EXIT_OK if r.passed else EXIT_FAIL


def cmd_seq(args) -> int:
    fn = SEQUENCES[args.name]
    rows = {n: fn(n, args.order) for n in _parse_indices(args.n)}
    if args.format == "csv":
        w = csv.writer(sys.stdout, lineterminator="\n")
        for poly in rows.values():
            w.writerow([rational_str(c) for c in poly.raw()])
    else:
        print(json.dumps({
            "name": args.name,
            "order": args.order,
            "polynomials": {str(n): [rational_str(c) for c in p.raw()] for n, p in rows.items()},
        }, indent=2))
    return EXIT_OK


def cmd_partitions(args) -> int:
    r = cat.verify(args.identity, args.max + 1)
    print(r.summary())
    return EXIT_OK if r.passed else EXIT_FAIL


def cmd_ideals(args) -> int:
    table = ideal_counts(args.max_norm)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["norm", "ideals"])
    for m in range(1, args.max_norm + 1):
        w.writerow([m, table[m]])
    return EXIT_OK


def cmd_lvalues(args) -> int:
    grid = linear_grid(Fraction(args.tmin), Fraction(args.tmax), args.samples)
    digits = args.digits
    if args.source == "coeffs":
        from .pell import error_series

        src = error_series("E2", args.qorder)
        est = lvalue_extract(src, args.nmax, grid, args.qorder, coeff_bound=args.coeff_bound, digits=digits)
    else:
        src = e2_evaluator(digits)
        est = lvalue_extract(src, args.nmax, grid, digits=digits)
    for e in est:
        if e.value is None:
            print(f"L(-{e.n}) = unavailable")
        else:
            print(f"L(-{e.n}) = {mpmath.nstr(e.value, 20)}  +- {mpmath.nstr(e.uncertainty, 3)}")
    rep = verify_theorem2(args.nmax, grid, digits=digits, tolerance=args.tolerance,
                          source=src if args.source == "coeffs" else None)
    for s in (1, -1):
        print(f"sign {s:+d}: max discrepancy {mpmath.nstr(rep.discrepancy[s], 3)}")
    if rep.matched_sign is None:
        print("no unique matching sign: " + "; ".join(rep.notes))
        return EXIT_FAIL
    print(f"matching sign: {rep.matched_sign:+d}")
    _write_json(args.json, {
        "nmax": args.nmax,
        "lvalues": [{"n": e.n,
                     "value": None if e.value is None else mpmath.nstr(e.value, 30),
                     "uncertainty": mpmath.nstr(e.uncertainty, 5)} for e in est],
        "matched_sign": rep.matched_sign,
        "discrepancy": {str(s): mpmath.nstr(v, 5) for s, v in rep.discrepancy.items()},
    })
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qtails", description="Exact q-series identity checks and sums of tails.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="verify a catalog identity or a .qid script")
    g = v.add_mutually_exclusive_group(required=True)
    g.add_argument("--id", help="catalog id, or 'all'")
    g.add_argument("--script", help="path to a .qid script")
    v.add_argument("--order", type=int, default=40)
    v.add_argument("--torder", type=int, default=8, help="t-truncation for scripts using t")
    v.add_argument("--json", help="write the JSON report here ('-' for stdout)")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("diagnose", help="search for a correction to a failing identity")
    d.add_argument("--id", required=True)
    d.add_argument("--order", type=int, default=40)
    d.add_argument("--json")
    d.set_defaults(func=cmd_diagnose)

    s = sub.add_parser("seq", help="dump sequence polynomials as exact rationals")
    s.add_argument("--name", required=True, choices=sorted(SEQUENCES))
    s.add_argument("--n", required=True, help="index, comma list, or inclusive range a:b")
    s.add_argument("--order", type=int, default=20)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.set_defaults(func=cmd_seq)

    pa = sub.add_parser("partitions", help="enumeration-side identity checks")
    pa.add_argument("--identity", required=True, choices=PARTITION_IDS)
    pa.add_argument("--max", type=int, default=30, help="largest partitioned integer")
    pa.set_defaults(func=cmd_partitions)

    i = sub.add_parser("ideals", help="ideal counts of Z[sqrt 2] by norm")
    i.add_argument("--max-norm", type=int, required=True)
    i.set_defaults(func=cmd_ideals)

    lv = sub.add_parser("lvalues", help="L-values from the error series and the Theta_n sign check")
    lv.add_argument("--nmax", type=int, default=3)
    lv.add_argument("--source", choices=("direct", "coeffs"), default="direct",
                    help="evaluate E2 from its defining sum, or from truncated coefficients")
    lv.add_argument("--qorder", type=int, default=4000, help="coefficient count for --source coeffs")
    lv.add_argument("--coeff-bound", type=int, default=8, help="bound on dropped coefficients (coeffs)")
    lv.add_argument("--tmin", default="0.001")
    lv.add_argument("--tmax", default="0.005")
    lv.add_argument("--samples", type=int, default=12)
    lv.add_argument("--digits", type=int, default=DEFAULT_DIGITS)
    lv.add_argument("--tolerance", type=float, default=1e-6)
    lv.add_argument("--json")
    lv.set_defaults(func=cmd_lvalues)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericInstabilityError as ex:
        print(f"qtails: numeric instability: {ex}", file=sys.stderr)
        return EXIT_NUMERIC
    except (dsl.DSLError, cat.UnknownIdentityError, ValueError, OSError) as ex:
        msg = ex.args[0] if isinstance(ex, KeyError) and ex.args else ex
        print(f"qtails: error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
