"""Batch runs: track a scenario, score it, aggregate across seeds and arms."""

from __future__ import annotations

import csv
import glob
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import rotkit
from .config import Hyperparams
from .metrics import frame_ious, rmse_velocity
from .motion import KinematicState
from .scenario import ScenarioFrame, make_scenario, read_scenario
from .vbtracker import Tracker, ground_residuals

TRACE_SCHEMA_VERSION = 1
METRICS_SCHEMA_VERSION = 1
REPORT_COLUMNS = ["scenario", "method", "alpha", "metric", "mean", "std", "n_runs"]


def method_name(motion: str, es_fusion: bool) -> str:
    return motion.upper() + ("+ES" if es_fusion else "")


@dataclass
class RunConfig:
    motion: str = "ctrv"
    es_fusion: bool = True
    hyperparams: Hyperparams = field(default_factory=Hyperparams)
    scenario: str = "lane_change"  # trajectory kind, used when no path is given
    scenario_path: str | None = None
    alpha: float = 10.0
    seeds: tuple = (0,)
    N_vb: int | None = None

    def hp(self) -> Hyperparams:
        hp = replace(self.hyperparams, motion=self.motion, es_fusion=self.es_fusion)
        if self.N_vb is not None:
            hp = replace(hp, N_vb=self.N_vb)
        return hp


def _r(x):
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_r(v) for v in x]
    return float(f"{float(x):.9g}")


def track(frames: list[ScenarioFrame], hp: Hyperparams) -> list[dict]:
    """Run the tracker over the measurements and return one trace record per frame."""
    tracker = Tracker(hp)
    trace = []
    for fr in frames:
        diag = tracker.step(fr.meas)
        x = tracker.kb.x_ref
        P = tracker.kb.P
        Sig = tracker.sb.Sigma
        trace.append(
            {
                "schema_version": TRACE_SCHEMA_VERSION,
                "t": _r(fr.meas.time),
                "p": _r(x.p),
                "q": _r(x.q),
                "v": _r(x.v),
                "omega": _r(x.omega),
                "xi": _r(x.xi),
                "knots": _r(tracker.sb.knots),
                "P_diag": _r(np.diag(P)),
                "cond_P": _r(np.linalg.cond(P)),
                "cond_Sigma_max": _r(np.linalg.cond(Sig).max()),
                "checks": {
                    "spd": bool(diag.spd_ok),
                    "row_sum_err": float(diag.row_sum_err),
                    "weight_sum_err": float(diag.weight_sum_err),
                    "ground_residual_max": float(np.abs(ground_residuals(x, hp.plane)).max()),
                },
            }
        )
    return trace


def state_from_record(rec: dict) -> KinematicState:
    q = rotkit.quat_normalize(np.asarray(rec["q"], dtype=float))
    return KinematicState.make(rec["p"], rec["v"], rotkit.quat_log(q), rec["omega"], rec["xi"])


def evaluate(frames: list[ScenarioFrame], trace: list[dict]) -> dict:
    """Per-frame IOUs, their means and the velocity RMSE."""
    if len(frames) != len(trace):
        raise ValueError(f"truth has {len(frames)} frames but the trace has {len(trace)}")
    per = {"iou_xy": [], "iou_yz": [], "iou_zx": []}
    v_true, v_est = [], []
    for fr, rec in zip(frames, trace):
        x_est = state_from_record(rec)
        ious = frame_ious(fr.truth.x_true, fr.truth.knots_vcs, x_est, np.asarray(rec["knots"]))
        for k, v in ious.items():
            per[k].append(v)
        v_true.append(fr.truth.x_true.v)
        v_est.append(x_est.v)
    out = {"schema_version": METRICS_SCHEMA_VERSION, "N": len(frames)}
    for k, vals in per.items():
        out[f"mean_{k}"] = float(np.mean(vals)) if vals else 0.0
    out["rmse_v"] = rmse_velocity(v_true, v_est) if v_true else 0.0
    out["per_frame"] = {k: [_r(v) for v in vals] for k, vals in per.items()}
    checks = [rec["checks"] for rec in trace]
    out["checks"] = {
        "spd": all(c["spd"] for c in checks),
        "row_sum_err": max((c["row_sum_err"] for c in checks), default=0.0),
        "weight_sum_err": max((c["weight_sum_err"] for c in checks), default=0.0),
        "ground_residual_max": max((c["ground_residual_max"] for c in checks), default=0.0),
    }
    return out


def run_experiment(config: RunConfig, with_trace: bool = False) -> dict:
    """Track every seed of a configuration and aggregate the metrics."""
    hp = config.hp()
    runs = []
    for seed in config.seeds:
        if config.scenario_path is not None:
            frames = read_scenario(config.scenario_path)
        else:
            frames = make_scenario(config.scenario, config.alpha, seed)
        trace = track(frames, hp)
        m = evaluate(frames, trace)
        m.update(seed=int(seed), method=method_name(config.motion, config.es_fusion),
                 scenario=config.scenario, alpha=config.alpha)
        if with_trace:
            m["trace"] = trace
        runs.append(m)
    agg = {
        "method": method_name(config.motion, config.es_fusion),
        "scenario": config.scenario,
        "alpha": config.alpha,
        "runs": runs,
    }
    for key in ("mean_iou_xy", "mean_iou_yz", "mean_iou_zx", "rmse_v"):
        agg[key] = float(np.mean([r[key] for r in runs]))
    return agg


# --- trace/metrics files and the report ----------------------------------------------


def write_jsonl(path, records) -> None:
    with open(path, "w") as f:
        for rec in records:
            f.write(json.dumps(rec, separators=(",", ":")) + "\n")


def read_jsonl(path) -> list[dict]:
    out = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if line.strip():
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: malformed JSON line ({exc})") from exc
    return out


def report(pattern: str, csv_path, plot_path=None) -> list[dict]:
    """Aggregate metrics JSON files into a CSV (one row per scenario/method/α/metric)
    and optionally dump per-frame IOU series for plotting."""
    groups: dict = {}
    series: dict = {}
    for path in sorted(glob.glob(pattern)):
        m = json.loads(Path(path).read_text())
        key = (str(m.get("scenario", "")), str(m.get("method", "")), float(m.get("alpha", math.nan)))
        groups.setdefault(key, []).append(m)
        if "per_frame" in m:
            series.setdefault("|".join(map(str, key)), []).append(m["per_frame"]["iou_xy"])
    rows = []
    for key in sorted(groups):
        ms = groups[key]
        for metric in ("mean_iou_xy", "mean_iou_yz", "mean_iou_zx", "rmse_v"):
            vals = [m[metric] for m in ms if metric in m]
            if not vals:
                continue
            rows.append(
                {
                    "scenario": key[0],
                    "method": key[1],
                    "alpha": key[2],
                    "metric": metric,
                    "mean": float(np.mean(vals)),
                    "std": float(np.std(vals)),
                    "n_runs": len(vals),
                }
            )
    with open(csv_path, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=REPORT_COLUMNS)
        w.writeheader()
        w.writerows(rows)
    if plot_path is not None:
        plot = {}
        for key, runs in sorted(series.items()):
            n = min(len(r) for r in runs)
            plot[key] = {"frame": list(range(n)), "mean_iou_xy": np.mean([r[:n] for r in runs], axis=0).tolist()}
        Path(plot_path).write_text(json.dumps(plot))
    return rows
