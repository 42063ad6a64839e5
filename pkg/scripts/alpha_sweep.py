"""Mean IOU_xy of CTRV+ES as a function of the radar Poisson rate α.

    python scripts/alpha_sweep.py --scenario u_turn --alphas 1 2 5 10 20 --seeds 5
"""

from __future__ import annotations

import argparse

import numpy as np

from skeleton_eot.experiment import RunConfig, run_experiment


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scenario", default="lane_change")
    ap.add_argument("--alphas", type=float, nargs="+", default=[1.0, 2.0, 5.0, 10.0, 20.0])
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--motion", choices=["ctrv", "cv"], default="ctrv")
    ap.add_argument("--es", choices=["on", "off"], default="on")
    args = ap.parse_args()

    print(f"{'alpha':>6} {'IOU_xy':>8} {'±std':>7} {'RMSE_v':>8}")
    for alpha in args.alphas:
        agg = run_experiment(
            RunConfig(motion=args.motion, es_fusion=args.es == "on", scenario=args.scenario, alpha=alpha,
                      seeds=tuple(range(args.seeds)))
        )
        std = np.std([r["mean_iou_xy"] for r in agg["runs"]])
        print(f"{alpha:6.1f} {agg['mean_iou_xy']:8.3f} {std:7.3f} {agg['rmse_v']:8.3f}", flush=True)


if __name__ == "__main__":
    main()
