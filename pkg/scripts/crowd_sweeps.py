"""One-parameter sweeps of the synthetic crowdsourcing experiment.

Each sweep varies a single setting of the default configuration and records
the mean and standard deviation of the prediction error of M-MSR, majority
voting and PGD over the repeat seeds.

    python scripts/crowd_sweeps.py --repeats 20 --out results/crowd.csv
"""

import argparse
import csv
import os
import time

from mmsr.crowd.experiment import CrowdConfig, sweep

SWEEPS = {
    "adversaries": [0, 4, 8, 12, 16, 20, 24, 28, 32, 36, 40],
    "adv_accuracy": [0.0, 0.25, 0.5, 0.75, 1.0],
    "adv_groups": [1, 2, 4, 5, 10, 20],
    "adv_obs_sparsity": [0.1, 0.2, 0.3, 0.4, 0.5],
    "obs_sparsity": [0.02, 0.04, 0.06, 0.08, 0.1],
}


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--keys", default=",".join(SWEEPS), help="comma-separated sweep keys")
    p.add_argument("--repeats", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="results/crowd.csv")
    args = p.parse_args()

    cfg = CrowdConfig(repeats=args.repeats, seed=args.seed)
    rows = []
    for key in args.keys.split(","):
        start = time.perf_counter()
        got = sweep(cfg, key, SWEEPS[key])
        rows.extend(got)
        print(f"\n{key} ({time.perf_counter() - start:.1f} s)")
        for value in SWEEPS[key]:
            cells = {r["method"]: r for r in got if r["value"] == value}
            print(f"  {value!s:>6}  " + "  ".join(f"{m} {c['mean']:.3f}+-{c['std']:.3f}" for m, c in cells.items()))
    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    with open(args.out, "w", newline="") as fh:
        out = csv.DictWriter(fh, ["key", "value", "method", "mean", "std"], lineterminator="\n")
        out.writeheader()
        out.writerows(rows)
    print(f"\nwrote {args.out}")


if __name__ == "__main__":
    main()
