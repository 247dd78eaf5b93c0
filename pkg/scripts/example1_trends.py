#!/usr/bin/env python3
"""Truncation trends for the damped projector channel sum_k c_k P_k rho P_k.

Prints the Kraus-criterion series (norm-sum divergence for criterion b, the
weighted-norm/exponential-sum pair for criterion c with h_k = 2 ln k) and the
multi-start sup estimates of the pure-state output entropy along a schedule,
next to the variational upper bound 2 alpha + ln(pi^2/6).

Usage: python scripts/example1_trends.py [--alpha A] [--schedule 64,256,1024]
"""

import argparse
import math
import sys

from qentropy.channels import family_example1
from qentropy.pce import (
    criterion_b_report,
    criterion_c_report,
    sup_pure_trend,
)


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--alpha", type=float, default=math.log(2))
    parser.add_argument(
        "--schedule", type=lambda s: [int(x) for x in s.split(",")], default=[64, 256, 1024]
    )
    parser.add_argument("--starts", type=int, default=8)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    fam = family_example1(args.alpha)
    schedule = args.schedule

    rep_b = criterion_b_report(fam, schedule)
    rep_c = criterion_c_report(fam, "2lnk", schedule)
    trend = sup_pure_trend(fam, schedule, n_starts=args.starts, seed=args.seed)
    gibbs = args.alpha * 2 + math.log(math.pi**2 / 6)

    print(f"alpha = {args.alpha:.6f}, schedule = {schedule}")
    print(f"\ncriterion b ({rep_b.verdict}):")
    print(f"  {'N':>6} {'sum ||V_k||^2':>14} {'S(norms)':>10}")
    for n, s, sv in zip(schedule, rep_b.values["norm_partial_sums"], rep_b.values["shannon_values"]):
        print(f"  {n:>6} {s:>14.4f} {sv:>10.4f}")

    print(f"\ncriterion c, h_k = 2 ln k ({rep_c.verdict}):")
    print(f"  {'N':>6} {'||sum h V†V||':>14} {'sum e^-h':>10} {'tail bound':>11}")
    for n, nv, ev, tv in zip(
        schedule,
        rep_c.values["weighted_norms"],
        rep_c.values["exp_sums"],
        rep_c.values["exp_tail_bounds"],
    ):
        print(f"  {n:>6} {nv:>14.12f} {ev:>10.6f} {tv:>11.2e}")
    print(f"  exact weighted norm: 2 alpha = {2 * args.alpha:.12f}")

    print("\nsup-pure output entropy (lower estimates, warm-started):")
    print(f"  {'N':>6} {'estimate':>10} {'ln N upper':>11}")
    for n, res in zip(schedule, trend):
        print(f"  {n:>6} {res.lower_estimate:>10.6f} {res.upper_bound:>11.6f}")
    print(f"  variational bound 2a + ln(pi^2/6) = {gibbs:.6f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
