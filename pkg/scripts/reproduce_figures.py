"""Regenerate the statistic sweep and the power tables as CSV files.

    python3 scripts/reproduce_figures.py --out results --replicates 500

Each table gets a ``.json`` sidecar with the seed and settings used.  Use
``--quick`` for a smoke run on a short vertex grid.
"""

import argparse
import time

from graphcorr.experiments import DEFAULT_N_GRID, reproduce_fig1, reproduce_power


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--replicates", type=int, default=500)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--figures", default="fig1,fig3,fig4")
    ap.add_argument("--quick", action="store_true", help="n in {20, 50, 100} and 100 replicates")
    args = ap.parse_args()

    grid = (20, 50, 100) if args.quick else DEFAULT_N_GRID
    reps = 100 if args.quick else args.replicates
    for fig in args.figures.split(","):
        start = time.perf_counter()
        if fig == "fig1":
            path = reproduce_fig1(args.out, args.seed, replicates=reps)
        else:
            naive = reps if args.quick else None
            path = reproduce_power(int(fig[-1]), args.out, args.seed, grid, reps, naive, threads=args.threads)
        print(f"{fig}: wrote {path} in {time.perf_counter() - start:.0f}s")


if __name__ == "__main__":
    main()
