import csv
import json

import numpy as np
import pytest

from skeleton_eot import experiment
from skeleton_eot.config import Hyperparams
from skeleton_eot.experiment import RunConfig, evaluate, method_name, report, run_experiment, track
from skeleton_eot.scenario import make_scenario, write_scenario

N_FRAMES = 25


@pytest.fixture
def short_scenarios(monkeypatch):
    full = experiment.make_scenario
    monkeypatch.setattr(experiment, "make_scenario", lambda *a, **k: full(*a, **k)[:N_FRAMES])


def test_method_names():
    assert method_name("ctrv", True) == "CTRV+ES"
    assert method_name("cv", False) == "CV"


def test_run_config_wires_ablation_switches():
    hp = RunConfig(motion="cv", es_fusion=False, N_vb=1).hp()
    assert hp.motion == "cv" and not hp.es_fusion and hp.N_vb == 1 and hp.eps_effective == 0.0


def test_same_seed_same_metrics(short_scenarios):
    cfg = RunConfig(scenario="u_turn", seeds=(3,))
    a, b = run_experiment(cfg), run_experiment(cfg)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_aggregate_is_mean_of_individual_runs(short_scenarios):
    seeds = tuple(range(10))
    agg = run_experiment(RunConfig(scenario="lane_change", seeds=seeds))
    singles = [run_experiment(RunConfig(scenario="lane_change", seeds=(s,))) for s in seeds]
    for key in ("mean_iou_xy", "mean_iou_yz", "mean_iou_zx", "rmse_v"):
        assert abs(agg[key] - sum(s[key] for s in singles) / len(seeds)) < 1e-12
        for run, single in zip(agg["runs"], singles):
            assert run[key] == single[key]


def test_trace_and_metrics_contents():
    frames = make_scenario("lane_change", 10.0, seed=1)[:N_FRAMES]
    trace = track(frames, Hyperparams())
    assert len(trace) == N_FRAMES
    rec = trace[-1]
    for key in ("t", "p", "q", "v", "omega", "xi", "knots", "P_diag", "cond_P", "cond_Sigma_max", "checks"):
        assert key in rec
    m = evaluate(frames, trace)
    assert m["N"] == N_FRAMES
    assert all(0 <= v <= 1 for v in m["per_frame"]["iou_xy"])
    assert np.isclose(m["mean_iou_xy"], np.mean(m["per_frame"]["iou_xy"]), atol=1e-8)
    assert m["checks"]["spd"]
    with pytest.raises(ValueError):
        evaluate(frames, trace[:-1])


def test_run_from_scenario_file(tmp_path):
    frames = make_scenario("u_turn", 5.0, seed=2)[:N_FRAMES]
    p = tmp_path / "s.jsonl"
    write_scenario(p, frames)
    out = run_experiment(RunConfig(scenario="u_turn", scenario_path=str(p), seeds=(0,)))
    assert out["runs"][0]["N"] == N_FRAMES


def _metrics_file(path, scenario, method, alpha, iou, rmse):
    m = {"scenario": scenario, "method": method, "alpha": alpha, "mean_iou_xy": iou, "mean_iou_yz": iou,
         "mean_iou_zx": iou, "rmse_v": rmse, "per_frame": {"iou_xy": [iou, iou]}}
    path.write_text(json.dumps(m))


def test_report_empty_gives_header_only(tmp_path):
    rows = report(str(tmp_path / "*.json"), tmp_path / "r.csv")
    assert rows == []
    assert (tmp_path / "r.csv").read_text().strip() == ",".join(experiment.REPORT_COLUMNS)


def test_report_single_run_passthrough_and_ordering(tmp_path):
    _metrics_file(tmp_path / "b.json", "u_turn", "CV", 10.0, 0.4, 1.5)
    _metrics_file(tmp_path / "a.json", "lane_change", "CTRV+ES", 10.0, 0.7, 0.8)
    _metrics_file(tmp_path / "c.json", "lane_change", "CTRV+ES", 10.0, 0.5, 0.6)
    rows = report(str(tmp_path / "*.json"), tmp_path / "r.csv", tmp_path / "plot.json")
    keys = [(r["scenario"], r["method"], r["alpha"], r["metric"]) for r in rows]
    assert keys == sorted(keys, key=lambda k: (k[0], k[1], k[2]))
    lc = {r["metric"]: r for r in rows if r["scenario"] == "lane_change"}
    assert np.isclose(lc["mean_iou_xy"]["mean"], 0.6) and lc["mean_iou_xy"]["n_runs"] == 2
    ut = {r["metric"]: r for r in rows if r["scenario"] == "u_turn"}
    assert ut["rmse_v"]["mean"] == 1.5 and ut["rmse_v"]["std"] == 0.0
    with open(tmp_path / "r.csv") as f:
        assert len(list(csv.DictReader(f))) == len(rows)
    plot = json.loads((tmp_path / "plot.json").read_text())
    assert plot["lane_change|CTRV+ES|10.0"]["mean_iou_xy"] == [0.6, 0.6]
