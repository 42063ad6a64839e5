import csv
import json
import subprocess
import sys

import pytest

from skeleton_eot import scenario
from skeleton_eot.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main


@pytest.fixture
def short_generate(monkeypatch):
    full = scenario.make_scenario
    import skeleton_eot.cli as cli

    monkeypatch.setattr(cli, "make_scenario", lambda *a, **k: full(*a, **k)[:15])


def test_pipeline(tmp_path, short_generate):
    s, t, m = tmp_path / "s.jsonl", tmp_path / "t.jsonl", tmp_path / "m.json"
    assert main(["generate", "--scenario", "u-turn", "--alpha", "5", "--seed", "1", "--out", str(s)]) == EXIT_OK
    assert len(s.read_text().splitlines()) == 15
    cfg = tmp_path / "hp.json"
    cfg.write_text(json.dumps({"N_vb": 2}))
    args = ["track", "--config", str(cfg), "--motion", "cv", "--es", "off", "--in", str(s), "--out", str(t)]
    assert main(args) == EXIT_OK
    recs = [json.loads(line) for line in t.read_text().splitlines()]
    assert len(recs) == 15 and recs[0]["method"] == "CV"
    args = ["evaluate", "--truth", str(s), "--est", str(t), "--out", str(m), "--scenario", "u_turn", "--alpha", "5"]
    assert main(args) == EXIT_OK
    metrics = json.loads(m.read_text())
    assert metrics["method"] == "CV" and metrics["scenario"] == "u_turn" and metrics["alpha"] == 5.0
    c, pd = tmp_path / "r.csv", tmp_path / "plot.json"
    assert main(["report", "--in", str(tmp_path / "*.json"), "--csv", str(c), "--plot-data", str(pd), "-v"]) == EXIT_OK
    with open(c) as f:
        rows = list(csv.DictReader(f))
    assert {r["metric"] for r in rows} == {"mean_iou_xy", "mean_iou_yz", "mean_iou_zx", "rmse_v"}


def test_usage_errors():
    assert main([]) == EXIT_USAGE
    assert main(["bogus"]) == EXIT_USAGE
    assert main(["generate", "--scenario", "figure-eight", "--out", "x"]) == EXIT_USAGE
    assert main(["track", "--es", "maybe", "--in", "a", "--out", "b"]) == EXIT_USAGE


def test_data_errors(tmp_path):
    missing = str(tmp_path / "nope.jsonl")
    assert main(["track", "--in", missing, "--out", str(tmp_path / "t")]) == EXIT_DATA
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{broken\n")
    assert main(["track", "--in", str(bad), "--out", str(tmp_path / "t")]) == EXIT_DATA
    cfg = tmp_path / "hp.json"
    cfg.write_text(json.dumps({"unknown_knob": 1}))
    assert main(["track", "--config", str(cfg), "--in", str(bad), "--out", str(tmp_path / "t")]) == EXIT_DATA


def test_console_entry_point_help():
    out = subprocess.run([sys.executable, "-m", "skeleton_eot.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    for cmd in ("generate", "track", "evaluate", "report"):
        assert cmd in out.stdout
