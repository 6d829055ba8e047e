"""Command line: ``gwmspaces run JOB`` and ``gwmspaces verify``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .jobs import JobError, base_config, load_job, run_job
from .report import dumps, golden_body
from .verify import DEFAULT_SEED, verify_suite


def _emit(report: dict, out: str | None, timing: bool) -> None:
    text = dumps(report if timing else golden_body(report)) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="gwmspaces", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a JSON job file and write a report")
    run.add_argument("jobfile")
    run.add_argument("--horizon", type=int)
    run.add_argument("--tol", type=float)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out")
    run.add_argument("--no-timing", action="store_true", help="omit the wall-time section")

    ver = sub.add_parser("verify", help="run the oracle battery")
    ver.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ver.add_argument("--cases", type=int, default=2)
    ver.add_argument("--out")

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0

    if args.command == "verify":
        report = verify_suite(args.seed, args.cases)
        _emit(report, args.out, timing=True)
        return 0 if report["summary"]["failed"] == 0 else 2

    try:
        job = load_job(args.jobfile)
        report, code = run_job(job, base_config(job, args.horizon, args.tol), args.seed)
    except JobError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit(report, args.out, timing=not args.no_timing)
    for r in report["results"]:
        if r["status"] == "error":
            print(f"error: {r['error']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
