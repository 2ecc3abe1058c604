"""Measure total APSP rounds against n and fit the log-log slope.

    python3 scripts/round_scaling.py --sizes 16 32 64 --seeds 3
"""
import argparse
import json
import math
import statistics
import time

import numpy as np

from congest_apsp import apsp, generate
from congest_apsp.driver import phase_budget_ratios


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[16, 32, 64])
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--json", help="write the table as JSON here")
    args = ap.parse_args()
    rows = []
    for n in args.sizes:
        runs, start = [], time.time()
        for seed in range(args.seeds):
            runs.append(apsp(generate("random", n, seed=seed), seed=seed))
        ratios = [phase_budget_ratios(r) for r in runs]
        row = {
            "n": n,
            "median_rounds": statistics.median(r.stats.rounds_total for r in runs),
            "n_sqrt_n_log2": n * math.sqrt(n) * math.log2(n) ** 2,
            "max_ratios": {k: max(x[k] for x in ratios) for k in ratios[0]},
            "seconds": round(time.time() - start, 1),
        }
        rows.append(row)
        print(f"n={n:4d} median rounds {row['median_rounds']:8.0f}  ratios "
              + " ".join(f"{k}={v:.3f}" for k, v in row["max_ratios"].items())
              + f"  ({row['seconds']}s)", flush=True)
    if len(rows) > 1:
        slope = np.polyfit(np.log([r["n"] for r in rows]),
                           np.log([r["median_rounds"] for r in rows]), 1)[0]
        print(f"log-log slope {slope:.3f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
