"""Finite-n trend check of the random-graph recovery threshold.

For n x n Erdos-Renyi bipartite graphs with edge probability
``(ln n + 2F ln ln n + x) / n``, count how often M-MSR recovers the normal
block under a random F-local static corruption.  Above the threshold
(x = +3) recovery should be common, below it (x = -3) rare.  This is slow
(a few minutes at the defaults) and is not part of the test suite.

    python scripts/threshold_check.py --n 400 --seeds 50
"""

import argparse
import time

import numpy as np

from mmsr.adversary import random_f_local_set, solve_instance, static_instance
from mmsr.graph import generate_er_bipartite, theorem1_threshold
from mmsr.solver import reconstruct_error


def success_rate(n, F, x, seeds, corrupted, tol):
    p = theorem1_threshold(n, F, x)
    wins = 0
    for seed in range(seeds):
        rng = np.random.default_rng(seed)
        g = generate_er_bipartite(n, n, p, rng)
        a = rng.uniform(0.5, 2.0, n)
        b = rng.uniform(0.5, 2.0, n)
        C = random_f_local_set(g, F, corrupted, rng)
        inst = static_instance(g, a, b, C, [1e3, 1e-3], rng)
        try:
            fp, _ = solve_instance(inst, F, max_iter=5000, tol=1e-13)
            wins += reconstruct_error(fp, inst.truth, restrict_normal=True) <= tol
        except Exception:
            pass  # isolated or exhausted vertices count as failures
    return p, wins / seeds


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=400)
    ap.add_argument("--F", type=int, default=1)
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--corrupted", type=int, default=20, help="corrupted vertices per instance")
    ap.add_argument("--tol", type=float, default=1e-6)
    args = ap.parse_args()
    for x in (3.0, -3.0):
        start = time.perf_counter()
        p, rate = success_rate(args.n, args.F, x, args.seeds, args.corrupted, args.tol)
        print(f"x={x:+.0f}  p={p:.4f}  success {rate:.2f}  ({time.perf_counter() - start:.1f} s)")


if __name__ == "__main__":
    main()
