#!/usr/bin/env python3
"""
Krein-Feller toolkit - CLI Entrypoint

Usage:
    python main.py eig --spec=data/specs/half_circle_dirac.json --out=out/eig
    python main.py solve --spec=data/specs/half_circle_wave.json --out=out/wave
    python main.py verify --spec=data/specs/full_circle_dirac.json --threads=4

Outputs:
- Structured logs to stderr
- Command summary as JSON to stdout
- Artifacts (JSON / CSV) in the --out directory

Exit codes: 0 ok, 1 numeric acceptance failure, 2 validation error.
"""

import argparse
import json
import sys

from pipeline.export import to_jsonable
from pipeline.runner import COMMANDS, run_pipeline


def serialize_result(result) -> dict:
    """Summary of a ProblemResult for stdout."""
    return to_jsonable(
        {
            "name": result.name,
            "command": result.command,
            "exit_code": result.exit_code,
            "eigenvalues": result.eigenvalues,
            "checks": [
                {"name": c.name, "passed": c.passed} for c in result.checks
            ],
            "artifacts": result.artifacts,
            "errors": result.errors,
            "failure": result.failure,
        }
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Krein-Feller spectral toolkit")
    parser.add_argument("command", choices=COMMANDS, help="subcommand to run")
    parser.add_argument(
        "--spec", type=str, required=True, help="Path to the problem spec JSON"
    )
    parser.add_argument(
        "--out",
        type=str,
        default="out",
        help="Directory for artifacts (default: out)",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=1,
        help="Worker threads for the verify suite (default: 1)",
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="Seed for randomized checks; overrides the spec's seed",
    )
    return parser


def main(argv=None) -> int:
    """Main CLI entrypoint; returns the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    if args.seed is not None and args.seed < 0:
        parser.error("--seed must be >= 0")

    result = run_pipeline(
        args.spec,
        command=args.command,
        out_dir=args.out,
        seed=args.seed,
        threads=args.threads,
    )
    print(json.dumps(serialize_result(result), indent=2))
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
