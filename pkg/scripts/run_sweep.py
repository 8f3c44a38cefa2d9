#!/usr/bin/env python3
"""Success-rate sweep for a deterministic sensing matrix vs. a Gaussian one.

Runs orthogonal matching pursuit over a range of sparsity levels on the
55x121 binary matrix and on a size-matched Gaussian baseline, then prints
both success curves side by side.

    python3 scripts/run_sweep.py --n 11 --k 5 --trials 200 --seed 7
"""

import argparse

from eulercs.experiments import MatrixSpec, SweepConfig, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=11, help="square order")
    ap.add_argument("--k", type=int, default=5, help="square degree")
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--kmax", type=int, default=None,
                    help="highest sparsity level (default: half the rows)")
    args = ap.parse_args()

    m, M = args.n * args.k, args.n * args.n
    levels = tuple(range(1, (args.kmax or m // 2) + 1))
    euler = run_sweep(SweepConfig(
        matrix=MatrixSpec(family="euler", n=args.n, k=args.k),
        sparsity_levels=levels, trials=args.trials, master_seed=args.seed))
    gauss = run_sweep(SweepConfig(
        matrix=MatrixSpec(family="gaussian", m=m, M=M, seed=args.seed),
        sparsity_levels=levels, trials=args.trials, master_seed=args.seed))

    print(f"{'k':>4} {'euler %':>9} {'gaussian %':>11}")
    for e_row, g_row in zip(euler.rows, gauss.rows):
        print(f"{e_row['k']:>4} {e_row['success_pct']:>9.1f} "
              f"{g_row['success_pct']:>11.1f}")


if __name__ == "__main__":
    main()
