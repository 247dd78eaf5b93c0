#!/usr/bin/env python3
"""Run every verification suite at desk scale and print a summary table.

Usage: python scripts/run_all_suites.py [--trials N] [--seed S] [--jobs J]
"""

import argparse
import sys
import time

from qentropy.harness import SUITE_NAMES, SuiteConfig, run_suite

SUITE_DIMS = {
    "inequalities": [2, 4, 8],
    "continuity": [8],
    "monotonicity": [4],
    "complementary": [3],
    "criteria": [4],
    "roof": [4],
    "eof": [2],
    "appendix": [4],
}


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()

    total_failures = 0
    print(f"{'suite':<15} {'cases':>6} {'failures':>9} {'seconds':>8}")
    for suite in SUITE_NAMES:
        config = SuiteConfig(
            suite=suite, dims=SUITE_DIMS[suite], trials=args.trials, seed=args.seed
        )
        start = time.time()
        report = run_suite(config, jobs=args.jobs)
        elapsed = time.time() - start
        total_failures += report.failures
        print(f"{suite:<15} {len(report.cases):>6} {report.failures:>9} {elapsed:>8.2f}")
    print(f"\ntotal failures: {total_failures}")
    return 0 if total_failures == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
