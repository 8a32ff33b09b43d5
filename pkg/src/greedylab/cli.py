"""Command line interface: ``greedylab {run,constants,chebyshev,admissible}``.

Exit codes: 0 success (no failed checks), 1 a check failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analysis import (
    VectorFamily,
    check_rho_admissibility,
    compute_report,
)
from .chebyshev import chebyshev_min
from .greedy import all_greedy_sets, greedy_set
from .spaces import DimensionError, Vector, parse_space
from .verifier import ConfigError, _clean, _fmt, default_suite, load_suite, run_suite
from .weights import parse_weight

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma list of numbers, got {text!r}") from None


def cmd_run(args) -> int:
    try:
        cfg = load_suite(args.suite) if args.suite else default_suite()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    def progress(entry):
        if args.verbose:
            print(f"  {entry.space:10s} {entry.weight:24s} N={entry.N}", file=sys.stderr)

    ledger = run_suite(cfg, progress=progress)
    ledger.write(args.out, cfg.csv_name, cfg.json_name)
    summary = ledger.to_dict()["summary"]
    print(f"{cfg.suite_id}: {summary['checks']} checks, {summary['fail']} fail, "
          f"{summary['skipped']} skipped -> {args.out}")
    for row in ledger.failures:
        c = row.check
        print(f"FAIL {row.entry.space} {row.entry.weight} N={row.entry.N} {c.id}: "
              f"{_fmt(c.lhs)} > {_fmt(c.rhs)}")
    return ledger.exit_code


def cmd_constants(args) -> int:
    model = parse_space(args.space, args.dim)
    w = parse_weight(args.weight)
    fams = None
    if args.levels is not None:
        fams = [VectorFamily.level_grid(args.levels)]
        if args.dim <= 8:
            fams.append(VectorFamily.proof_extremal())
        fams.append(VectorFamily.sign_indicators())
    report = compute_report(model, w, fams)
    for r in report.rows():
        print(f"{r['constant']:8s} {_fmt(r['value']):>14s}  {r['exactness']}")
    if args.out:
        Path(args.out).write_text(json.dumps(_clean(report.to_dict()), indent=1, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_chebyshev(args) -> int:
    x = Vector(args.vector)
    model = parse_space(args.space, x.dim)
    natural = greedy_set(x, args.m)
    out = {"space": model.id, "x": list(args.vector), "m": args.m, "sets": []}
    for Lam in all_greedy_sets(x, args.m):
        res = chebyshev_min(model, x, Lam)
        out["sets"].append({
            "Lambda": list(Lam.indices), "natural": Lam == natural,
            "coeffs": {str(k): v for k, v in res.coeffs.items()},
            "value": res.value, "method": res.method, "certified_gap": res.certified_gap,
        })
    out["value"] = next(s["value"] for s in out["sets"] if s["natural"])
    out["max_over_greedy_sets"] = max(s["value"] for s in out["sets"])
    print(json.dumps(_clean(out), indent=1))
    return EXIT_OK


def cmd_admissible(args) -> int:
    model = parse_space(args.space, args.dim)
    rows = check_rho_admissibility(model, args.rho, horizon=args.horizon, max_size=args.max_size,
                                   n_random=args.random, seed=args.seed)
    missing = 0
    for r in rows:
        n0 = "-" if r.n0 is None else str(r.n0)
        missing += r.n0 is None
        print(f"A={r.A!s:16s} n0={n0:3s} worst={_fmt(r.worst_ratio):>10s}  {r.evidence}")
    print(f"{len(rows) - missing}/{len(rows)} sets admit a threshold at rho={args.rho:g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="greedylab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an inequality suite and write the ledger")
    r.add_argument("--suite", help="suite JSON (default: the built-in suite)")
    r.add_argument("--out", required=True, help="output directory")
    r.add_argument("-v", "--verbose", action="store_true")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("constants", help="compute every constant for one space/weight/N")
    c.add_argument("--space", required=True)
    c.add_argument("--weight", default="const:1")
    c.add_argument("--dim", type=int, required=True)
    c.add_argument("--levels", type=_floats, help="level grid, e.g. 0,1,2,3 (default families otherwise)")
    c.add_argument("--out", help="write the report as JSON")
    c.set_defaults(func=cmd_constants)

    h = sub.add_parser("chebyshev", help="Chebyshev greedy approximation of one vector")
    h.add_argument("--space", required=True)
    h.add_argument("--vector", type=_floats, required=True)
    h.add_argument("--m", type=int, required=True)
    h.set_defaults(func=cmd_chebyshev)

    a = sub.add_parser("admissible", help="search rho-admissibility thresholds (unweighted)")
    a.add_argument("--space", required=True)
    a.add_argument("--rho", type=float, required=True)
    a.add_argument("--dim", type=int, required=True)
    a.add_argument("--horizon", type=int)
    a.add_argument("--max-size", type=int, default=4)
    a.add_argument("--random", type=int, default=500, help="random coefficient probes per pair")
    a.add_argument("--seed", type=int, default=0)
    a.set_defaults(func=cmd_admissible)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
