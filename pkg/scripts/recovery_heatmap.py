"""Exact-recovery rate grid for M-MSR and the PCA/RPCA baselines.

Writes one CSV (same schema as ``mmsr recovery-sweep``) and prints a rate
table per method.

    python scripts/recovery_heatmap.py --dims 10,20,40 --trials 50 --out results/recovery.csv
"""

import argparse
import time

from mmsr import io
from mmsr.recovery import METHODS, recovery_sweep


def floats(text):
    return [float(x) for x in text.split(",")]


def ints(text):
    return [int(x) for x in text.split(",")]


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dims", type=ints, default=[10, 20, 40])
    p.add_argument("--noise-probs", type=floats, default=[0.0, 0.1, 0.2, 0.3, 0.4])
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--methods", default=",".join(METHODS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="results/recovery.csv")
    args = p.parse_args()

    cells = []
    for method in args.methods.split(","):
        start = time.perf_counter()
        got = recovery_sweep(args.dims, args.noise_probs, args.trials, method, args.seed)
        cells.extend(got)
        print(f"\n{method} ({time.perf_counter() - start:.1f} s)")
        print("n \\ p  " + " ".join(f"{q:>6.2f}" for q in sorted(args.noise_probs)))
        for n in sorted(args.dims):
            row = [c.recovery_rate for c in got if c.n == n]
            print(f"{n:<7d}" + " ".join(f"{r:>6.2f}" for r in row))
    io.ensure_dir(__import__("os").path.dirname(args.out) or ".")
    io.write_sweep(cells, args.out)
    print(f"\nwrote {args.out}")


if __name__ == "__main__":
    main()
