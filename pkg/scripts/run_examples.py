#!/usr/bin/env python3
"""
Run every bundled problem spec through its command and print a summary table.

Usage:
    python3 scripts/run_examples.py [--out out/examples]
"""

import argparse
import os
import sys
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from pipeline.runner import run_pipeline  # noqa: E402

SPEC_DIR = Path("data/specs")

# (spec file, command, expected exit code)
EXAMPLE_RUNS = [
    ("half_circle_dirac.json", "eig", 0),
    ("half_circle_wave.json", "oracle-compare", 0),
    ("half_circle_heat_c0.json", "oracle-compare", 0),
    ("half_circle_heat_c0125.json", "oracle-compare", 0),
    ("half_circle_heat_c075.json", "oracle-compare", 0),
    ("half_circle_schrodinger.json", "oracle-compare", 0),
    ("half_circle_semilinear_heat.json", "solve", 0),
    ("full_circle_dirac.json", "eig", 0),
    ("full_circle_wave.json", "oracle-compare", 0),
    ("full_circle_heat.json", "oracle-compare", 0),
    ("full_circle_schrodinger.json", "oracle-compare", 0),
    ("full_circle_semilinear_sin.json", "solve", 0),
    ("full_circle_dirac.json", "verify", 0),
    ("full_circle_fault.json", "verify", 1),
    ("sphere_ifs_dimension.json", "dim", 0),
    ("torus_gifs.json", "dim", 0),
    ("torus_gifs.json", "gifs-check", 0),
    ("torus_gifs_removed_edge.json", "verify", 1),
    ("sphere_bilipschitz.json", "bilip", 0),
]


def main():
    """Run all example specs and print summary."""
    parser = argparse.ArgumentParser(description="Run the bundled example specs")
    parser.add_argument("--out", default="out/examples", help="artifact root")
    args = parser.parse_args()

    print(f"\n{'='*90}")
    print(f"Running {len(EXAMPLE_RUNS)} example problems")
    print(f"{'='*90}\n")

    results = []
    for spec_file, command, expected in EXAMPLE_RUNS:
        out_dir = Path(args.out) / f"{Path(spec_file).stem}_{command}"
        try:
            result = run_pipeline(str(SPEC_DIR / spec_file), command, str(out_dir))
            results.append(
                {
                    "spec": spec_file,
                    "command": command,
                    "exit": result.exit_code,
                    "expected": expected,
                    "checks": len(result.checks),
                    "failed": sum(1 for c in result.checks if not c.passed),
                }
            )
        except Exception as e:
            results.append(
                {
                    "spec": spec_file,
                    "command": command,
                    "exit": -1,
                    "expected": expected,
                    "checks": 0,
                    "failed": 0,
                }
            )
            print(f"ERROR running {spec_file} ({command}): {e}")

    print(f"\n{'='*90}")
    print("SUMMARY")
    print(f"{'='*90}\n")
    hdr = (
        f"{'Spec':<36} {'Command':<16} {'Exit':>5} "
        f"{'Expected':>9} {'Checks':>7} {'Failed':>7}"
    )
    print(hdr)
    print("-" * 90)
    for r in results:
        row = (
            f"{r['spec']:<36} {r['command']:<16} {r['exit']:>5} "
            f"{r['expected']:>9} {r['checks']:>7} {r['failed']:>7}"
        )
        print(row)

    matched = sum(1 for r in results if r["exit"] == r["expected"])
    print(f"\n{'='*90}")
    print(f"Runs matching expected exit code: {matched}/{len(results)}")
    print(f"{'='*90}\n")
    return 0 if matched == len(results) else 1


if __name__ == "__main__":
    sys.exit(main())
