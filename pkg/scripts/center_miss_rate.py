"""How often does a random center sample miss a long canonical path?

A miss is an (s, t) pair whose canonical path has at least h hops but contains
no sampled center. Compares the default alpha against a larger one.

    python3 scripts/center_miss_rate.py --n 256 --trials 50 --alphas 1 3
"""
import argparse
import random

import numpy as np

from congest_apsp import generate
from congest_apsp.driver import apsp_center_count, apsp_hops
from congest_apsp.oracle import canonical_parents


def path_members(g):
    """members[s][t] = set of nodes on the canonical s-t path."""
    out = []
    for s in range(g.n):
        parent, hops = canonical_parents(g, s)
        rows = []
        for t in range(g.n):
            nodes, x = set(), t
            while x is not None:
                nodes.add(x)
                x = parent[x]
            rows.append((hops[t], nodes))
        out.append(rows)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=256)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--alphas", type=float, nargs="+", default=[1.0, 3.0])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    n, h = args.n, apsp_hops(args.n)
    g = generate("path", n, seed=args.seed)  # many long paths
    members = path_members(g)
    long_pairs = [(hp, nodes) for row in members for hp, nodes in row if hp >= h]
    print(f"n={n} h={h} pairs with >= h hops: {len(long_pairs)}")
    for alpha in args.alphas:
        zeta = apsp_center_count(n, alpha)
        rng = random.Random(args.seed)
        missed_trials, misses = 0, []
        for _ in range(args.trials):
            C = set(rng.sample(range(n), zeta))
            m = sum(1 for _, nodes in long_pairs if not nodes & C)
            misses.append(m)
            missed_trials += m > 0
        print(f"alpha={alpha:g} centers={zeta}: trials with a miss {missed_trials}/{args.trials}, "
              f"mean missed pairs {np.mean(misses):.2f}")


if __name__ == "__main__":
    main()
