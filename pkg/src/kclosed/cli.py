"""Command line: ``kclosed {gen-corpus,decompose,verify,report}``.

Exit codes: 0 success / all blocking checks pass, 1 check failure,
2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .config import ConfigError, RunConfig
from .runner import run_decompose, run_gen_corpus, run_report, run_verify

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kclosed", description="Constructive (H^p1, H^p2) splitting on a periodic grid.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("gen-corpus", "write the test corpus (fields and index)"),
        ("decompose", "split every corpus item, write summary.csv"),
        ("verify", "run all checks, write verdict.json and plot data"),
        ("report", "re-check a run directory and summarize it"),
    ):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--config", metavar="PATH", help="JSON run configuration")
        s.add_argument("--seed", type=int, help="master seed of the corpus")
        s.add_argument("--out", metavar="DIR", help="output directory")
        s.add_argument("--items", type=int, help="number of corpus items")
        s.add_argument("--grid", type=int, help="points per axis N")
        s.add_argument("--p1", type=float, help="exponent p1")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = RunConfig.load(args.config).with_overrides(seed=args.seed, out=args.out, items=args.items, grid=args.grid, p1=args.p1)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "gen-corpus":
        items = run_gen_corpus(cfg)
        print(f"wrote {len(items)} items to {cfg.out / 'corpus'}")
        return EXIT_OK
    if args.command == "decompose":
        rows = run_decompose(cfg)
        print(f"wrote {cfg.out / 'summary.csv'} ({len(rows)} rows)")
        return EXIT_OK
    if args.command == "verify":
        verdict, code = run_verify(cfg)
        for c in verdict["checks"]:
            print(f"{c['status']:12s} {c['check_name']}")
        print(f"verdict: {verdict['status']}" + (f" (failed: {', '.join(verdict['failures'])})" if verdict["failures"] else ""))
        return code
    try:
        report, code = run_report(cfg.out)
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(json.dumps(report, indent=1, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
