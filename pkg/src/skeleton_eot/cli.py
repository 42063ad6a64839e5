"""Command-line interface: ``eot generate | track | evaluate | report``.

Exit codes: 0 success, 1 usage error, 2 data error (missing or malformed input).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .config import Hyperparams
from .experiment import evaluate, method_name, read_jsonl, report, track, write_jsonl
from .scenario import ScenarioParseError, make_scenario, read_scenario, write_scenario

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

log = logging.getLogger("eot")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class DataError(Exception):
    pass


def _cmd_generate(args) -> None:
    frames = make_scenario(args.scenario, alpha=args.alpha, seed=args.seed)
    write_scenario(args.out, frames)
    log.info("wrote %d frames to %s", len(frames), args.out)


def _load_hp(path) -> Hyperparams:
    if path is None:
        return Hyperparams()
    try:
        return Hyperparams.load(path)
    except (OSError, json.JSONDecodeError, ValueError, TypeError) as exc:
        raise DataError(f"bad config {path}: {exc}") from exc


def _cmd_track(args) -> None:
    hp = replace(_load_hp(args.config), motion=args.motion, es_fusion=args.es == "on")
    frames = read_scenario(args.inp)
    trace = track(frames, hp)
    method = method_name(hp.motion, hp.es_fusion)
    for rec in trace:
        rec["method"] = method
    write_jsonl(args.out, trace)
    log.info("tracked %d frames with %s", len(trace), method)


def _cmd_evaluate(args) -> None:
    frames = read_scenario(args.truth)
    trace = read_jsonl(args.est)
    metrics = evaluate(frames, trace)
    metrics["method"] = trace[0].get("method", "") if trace else ""
    metrics["scenario"] = args.scenario
    metrics["alpha"] = args.alpha
    Path(args.out).write_text(json.dumps(metrics))
    log.info("mean IOU_xy %.3f, RMSE_v %.3f", metrics["mean_iou_xy"], metrics["rmse_v"])


def _cmd_report(args) -> None:
    rows = report(args.inp, args.csv, args.plot_data)
    log.info("wrote %d rows to %s", len(rows), args.csv)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="eot", description="Radar-camera extended object tracking experiments.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", parents=[common], help="simulate a scenario and write it as JSON Lines")
    g.add_argument("--scenario", required=True, choices=["lane-change", "u-turn"])
    g.add_argument("--alpha", type=float, default=10.0, help="Poisson rate of radar points")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_generate)

    t = sub.add_parser("track", parents=[common], help="run the tracker over a scenario file")
    t.add_argument("--config", default=None, help="hyperparameter JSON (defaults if omitted)")
    t.add_argument("--motion", choices=["ctrv", "cv"], default="ctrv")
    t.add_argument("--es", choices=["on", "off"], default="on")
    t.add_argument("--in", dest="inp", required=True)
    t.add_argument("--out", required=True)
    t.set_defaults(func=_cmd_track)

    e = sub.add_parser("evaluate", parents=[common], help="score a trace against the scenario truth")
    e.add_argument("--truth", required=True)
    e.add_argument("--est", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--scenario", default="", help="label stored in the metrics file")
    e.add_argument("--alpha", type=float, default=float("nan"), help="label stored in the metrics file")
    e.set_defaults(func=_cmd_evaluate)

    r = sub.add_parser("report", parents=[common], help="aggregate metrics files into a CSV")
    r.add_argument("--in", dest="inp", required=True, help="glob of metrics JSON files")
    r.add_argument("--csv", required=True)
    r.add_argument("--plot-data", default=None)
    r.set_defaults(func=_cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        args.func(args)
    except (DataError, ScenarioParseError, OSError, ValueError, KeyError) as exc:
        print(f"eot: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
