"""Command line entry point: ``iwalog verify | catalog list | group validate``."""
from __future__ import annotations

import argparse
import json
import sys

from .group_structures import ACCEPTANCE_CATALOG, CATALOG, GroupValidationError, build_group
from .harness import SUITES, ConfigError, RunConfig, exit_code, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="iwalog", description="Exact checks of integral logarithm identities.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", help=f"one of: {', '.join(SUITES)}, or 'all'")
    v.add_argument("--group", required=True, help="catalog id or path to a group JSON file")
    v.add_argument("--p", type=int, default=None)
    v.add_argument("--e", type=int, default=None)
    v.add_argument("--f", type=int, default=1)
    v.add_argument("--prec", type=int, default=8, help="p-adic working precision N")
    v.add_argument("--tdeg", type=int, default=16, help="T-adic truncation M")
    v.add_argument("--lneg", type=int, default=16, help="Laurent depth of the completed ring")
    v.add_argument("--guard", type=int, default=4)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--hat-trials", type=int, default=None,
                   help="run completed-ring theta and L-hat only on the first k trials")
    v.add_argument("--report", help="write the JSON report here")
    v.add_argument("--timing", action="store_true", help="record wall time in the report")

    c = sub.add_parser("catalog", help="catalog groups")
    c.add_argument("action", choices=["list"])

    g = sub.add_parser("group", help="group files")
    g.add_argument("action", choices=["validate"])
    g.add_argument("path")
    return ap


def _verify(args) -> int:
    suites = list(SUITES) if args.suite == "all" else [args.suite]
    if any(s not in SUITES for s in suites):
        print(f"iwalog: unknown suite {args.suite!r}; choose from {', '.join(SUITES)}", file=sys.stderr)
        return EXIT_USAGE
    reports = []
    for s in suites:
        cfg = RunConfig(args.group, args.p, args.e, args.f, N=args.prec, M=args.tdeg, L_neg=args.lneg,
                        guard=args.guard, suites=[s], trials=args.trials, seed=args.seed,
                        hat_trials=args.hat_trials)
        rep = run_suite(s, cfg, timing=args.timing)
        reports.append(rep)
        status = "PASS" if rep.ok else "FAIL"
        print(f"{status} {s}: {rep.passes}/{rep.trials} trials, precision {rep.precision_effective}")
        for f in rep.failures[:5]:
            print(f"  trial {f['trial']} {f['check']}: {json.dumps(f['witness'], sort_keys=True)}")
    if args.report:
        if len(reports) == 1:
            reports[0].write(args.report)
        else:
            with open(args.report, "w") as fh:
                json.dump([r.as_dict() for r in reports], fh, indent=2, sort_keys=True)
                fh.write("\n")
    return exit_code(reports)


def _catalog() -> int:
    for name, desc in CATALOG.items():
        ps = [str(p) for p, names in ACCEPTANCE_CATALOG.items() if name in names]
        tag = f"  [acceptance p={','.join(ps)}]" if ps else ""
        print(f"{name:14s} {desc}{tag}")
    return EXIT_PASS


def _validate(path) -> int:
    try:
        G = build_group(path)
    except (GroupValidationError, ValueError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(json.dumps(G.describe(), indent=2, sort_keys=True))
    return EXIT_PASS


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code in (0, None) else EXIT_USAGE
    try:
        if args.cmd == "verify":
            return _verify(args)
        if args.cmd == "catalog":
            return _catalog()
        return _validate(args.path)
    except ConfigError as exc:
        print(f"iwalog: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"iwalog: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
