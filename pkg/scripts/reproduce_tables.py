"""Ablation tables: CTRV/CV × ES on/off for both manoeuvres and several radar rates.

Prints one row per (scenario, method, α) with mean IOUs and RMSE_v over the
seeds, and optionally writes the rows as CSV.

    python scripts/reproduce_tables.py --seeds 10 --alphas 1 5 10 --csv tables.csv
"""

from __future__ import annotations

import argparse
import csv
import time

from skeleton_eot.experiment import RunConfig, method_name, run_experiment

ARMS = [("ctrv", True), ("ctrv", False), ("cv", True), ("cv", False)]
COLUMNS = ["scenario", "method", "alpha", "mean_iou_xy", "mean_iou_yz", "mean_iou_zx", "rmse_v", "n_runs"]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--alphas", type=float, nargs="+", default=[1.0, 5.0, 10.0])
    ap.add_argument("--scenarios", nargs="+", default=["lane_change", "u_turn"])
    ap.add_argument("--csv", default=None)
    args = ap.parse_args()

    rows = []
    print(" | ".join(f"{c:>12}" for c in COLUMNS))
    for scenario in args.scenarios:
        for alpha in args.alphas:
            for motion, es in ARMS:
                t0 = time.time()
                agg = run_experiment(
                    RunConfig(motion=motion, es_fusion=es, scenario=scenario, alpha=alpha, seeds=tuple(range(args.seeds)))
                )
                row = {
                    "scenario": scenario,
                    "method": method_name(motion, es),
                    "alpha": alpha,
                    **{k: round(agg[k], 4) for k in ("mean_iou_xy", "mean_iou_yz", "mean_iou_zx", "rmse_v")},
                    "n_runs": len(agg["runs"]),
                }
                rows.append(row)
                print(" | ".join(f"{row[c]!s:>12}" for c in COLUMNS), f"({time.time() - t0:.0f} s)", flush=True)
    if args.csv:
        with open(args.csv, "w", newline="") as f:
            w = csv.DictWriter(f, fieldnames=COLUMNS)
            w.writeheader()
            w.writerows(rows)


if __name__ == "__main__":
    main()
