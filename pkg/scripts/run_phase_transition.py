#!/usr/bin/env python3
"""Phase-transition scan: largest reliably recoverable sparsity per row count.

For a fixed ambient dimension M = n^2, sweeps the measurement count m over
multiples of n and reports the (m/M, k/M) boundary where the success rate
drops below the target fraction.

    python3 scripts/run_phase_transition.py --M 121 --trials 200 --seed 7
"""

import argparse
import math

from eulercs.experiments import run_phase_transition


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--M", type=int, default=121, help="ambient dimension n^2")
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--fraction", type=float, default=0.5,
                    help="success fraction defining the transition")
    args = ap.parse_args()

    n = math.isqrt(args.M)
    rows = [n * k for k in range(2, n)]
    report = run_phase_transition(args.M, rows, trials=args.trials,
                                  master_seed=args.seed,
                                  fraction=args.fraction)
    print(f"{'m':>5} {'m/M':>8} {'k*':>5} {'k*/M':>8}")
    for row in report.rows:
        print(f"{row['m']:>5} {row['delta']:>8.4f} "
              f"{row['k_star']:>5} {row['k_frac']:>8.4f}")


if __name__ == "__main__":
    main()
