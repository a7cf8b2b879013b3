"""Command-line driver: ``lcakit check FILE`` and ``lcakit fmt FILE``."""

from __future__ import annotations

import argparse
import os
import sys

from . import kernel
from .cochains import set_max_arity
from .dsl import DslError, parse, print_file
from .runner import render_json, run_source

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _degree_limit_from_env() -> None:
    raw = os.environ.get("LCAKIT_MAX_DEGREE")
    if raw:
        kernel.degree_limit = int(raw)


def cmd_check(args) -> int:
    _degree_limit_from_env()
    if args.max_arity is not None:
        set_max_arity(args.max_arity)
    try:
        text = _read(args.file)
        report = run_source(text, os.path.basename(args.file), seed=args.seed, jobs=args.jobs,
                            timings=args.timings)
    except DslError as exc:
        print(f"{args.file}:{exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, UnicodeDecodeError) as exc:
        print(f"{args.file}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = render_json(report)
    if args.json == "-":
        sys.stdout.write(out)
    else:
        if args.json:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(out)
        for c in report["checks"]:
            line = f"{c['status'].upper():4}  {c['directive']}"
            if c.get("detail", {}).get("classification"):
                line += f"  [{c['detail']['classification']}]"
            print(line)
            for f in c["failures"][:3]:
                w = f.get("witness", {})
                print(f"      {f['name']} at {tuple(w.get('tuple', ()))}: {w.get('difference', '')}")
        s = report["summary"]
        print(f"{s['passed']}/{s['checks']} checks passed")
    return EXIT_OK if report["summary"]["failed"] == 0 else EXIT_FAIL


def cmd_fmt(args) -> int:
    try:
        sys.stdout.write(print_file(parse(_read(args.file))))
    except DslError as exc:
        print(f"{args.file}:{exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lcakit", description="Verify Lie conformal algebra structures.")
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("check", help="run the directives of an .lca file")
    c.add_argument("file")
    c.add_argument("--json", metavar="OUT", help="write the JSON report here ('-' for stdout)")
    c.add_argument("--max-arity", type=int, default=None)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--timings", action="store_true", help="add per-check timings (makes reports nondeterministic)")
    c.set_defaults(func=cmd_check)
    f = sub.add_parser("fmt", help="print the canonical form of an .lca file")
    f.add_argument("file")
    f.set_defaults(func=cmd_fmt)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
