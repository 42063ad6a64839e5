"""Synthetic ground truth and measurements for a single vehicle.

World frame: Z up, ground at Z = 0.  A static camera (which is also the radar
origin) sits ``height`` metres above the world origin looking along +Y, pitched
down by ``pitch``.  All truth and measurements are stored in the sensor frame
(x right, y down, z forward), like the tracker expects.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import rotkit
from .config import CAMERA_HEIGHT, CAMERA_PITCH
from .motion import KinematicState, predict_reference
from .sensors import (
    BehindCameraError,
    CameraIntrinsics,
    camera_ground_plane,
    project_point,
    sgw_weights,
)
from .template import CORNER_G, SkeletonTemplate
from .vbtracker import FrameMeasurements, Keypoint

SCHEMA_VERSION = 1


class ScenarioParseError(ValueError):
    pass


# --- geometry --------------------------------------------------------------------


@dataclass(frozen=True)
class CameraRig:
    height: float = CAMERA_HEIGHT
    pitch: float = CAMERA_PITCH

    @property
    def R_sw(self) -> np.ndarray:
        """World-to-sensor rotation (rows are the camera axes in world coordinates)."""
        s, c = math.sin(self.pitch), math.cos(self.pitch)
        return np.array([[1.0, 0.0, 0.0], [0.0, -s, -c], [0.0, c, -s]])

    @property
    def centre(self) -> np.ndarray:
        return np.array([0.0, 0.0, self.height])

    @property
    def plane(self):
        return camera_ground_plane(self.height, self.pitch)

    def to_sensor(self, P_w) -> np.ndarray:
        return (np.asarray(P_w) - self.centre) @ self.R_sw.T

    def vehicle_rotation(self, yaw: float) -> np.ndarray:
        c, s = math.cos(yaw), math.sin(yaw)
        Rz = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
        return self.R_sw @ Rz


@dataclass
class TrajectoryParams:
    """Piecewise constant-turn-rate trajectory on the ground plane."""

    start_xy: tuple = (-1.5, 18.0)  # world X, Y of the bottom centre
    yaw0: float = math.pi / 2  # heading angle in the ground plane (+Y = π/2)
    speed: float = 5.0
    segments: tuple = ((4.0, 0.0), (2.0, 0.25), (2.0, -0.25), (7.0, 0.0))  # (duration, yaw rate)

    def __post_init__(self):
        if self.speed < 0:
            raise ValueError("speed must be non-negative")
        if any(d <= 0 for d, _ in self.segments):
            raise ValueError("segment durations must be positive")


LANE_CHANGE = TrajectoryParams()
U_TURN = TrajectoryParams(
    start_xy=(5.0, 20.0),
    yaw0=math.pi / 2,
    speed=4.0,
    segments=((2.5, 0.0), (math.pi / 0.5, 0.5), (3.0, 0.0)),
)

# simulated vehicle per manoeuvre: a bus changes lanes, a passenger car turns around
VEHICLE = {"lane_change": "bus", "u_turn": "suv"}
TRAJECTORIES = {"lane_change": LANE_CHANGE, "u_turn": U_TURN}


@dataclass
class GroundTruthFrame:
    time: float
    x_true: KinematicState
    knots_vcs: np.ndarray  # (T, 3)
    visible: np.ndarray  # 0-based indices of visible knots


@dataclass
class ScenarioFrame:
    truth: GroundTruthFrame
    meas: FrameMeasurements


def _advance(x: KinematicState, n: np.ndarray, rate: float, dt: float) -> KinematicState:
    xr = KinematicState.make(x.p, x.v, x.theta, rate * n, x.xi)
    return predict_reference(xr, dt)


def gen_trajectory(
    kind: str,
    params: TrajectoryParams | None = None,
    dt: float = 0.1,
    duration: float | None = None,
    rig: CameraRig | None = None,
    template: SkeletonTemplate | None = None,
) -> list[GroundTruthFrame]:
    """Integrate the CTRV reference model stepwise along constant-yaw-rate segments.

    Steps that straddle a segment boundary are split so each segment's heading
    change is exact (the u-turn ends exactly π from where it started).
    """
    kind = kind.replace("-", "_")
    if kind not in TRAJECTORIES:
        raise ValueError(f"unknown trajectory kind {kind!r}")
    params = TRAJECTORIES[kind] if params is None else params
    rig = CameraRig() if rig is None else rig
    shape = SkeletonTemplate.vehicle(VEHICLE[kind]) if template is None else template
    total = sum(d for d, _ in params.segments)
    duration = total if duration is None else duration
    n_frames = int(round(duration / dt)) + 1

    n_s = rig.plane.normal
    P0 = np.array([params.start_xy[0], params.start_xy[1], 0.0])
    R0 = rig.vehicle_rotation(params.yaw0)
    theta0 = rotkit.quat_log(rotkit.quat_from_rot(R0))
    x = KinematicState.make(rig.to_sensor(P0), params.speed, theta0, np.zeros(3), shape.xi)
    bounds = np.cumsum([d for d, _ in params.segments])
    rates = [r for _, r in params.segments]

    def rate_at(t):
        i = int(np.searchsorted(bounds, t + 1e-12, side="right"))
        return rates[min(i, len(rates) - 1)]

    frames = []
    t = 0.0
    for k in range(n_frames):
        tk = k * dt
        # integrate from t to tk, splitting at segment boundaries
        while t < tk - 1e-12:
            upcoming = bounds[bounds > t + 1e-12]
            nxt = min(tk, upcoming[0]) if len(upcoming) else tk
            x = _advance(x, n_s, rate_at(t), nxt - t)
            t = nxt
        xk = KinematicState.make(x.p, x.v, x.theta, rate_at(tk) * n_s, x.xi)
        frames.append(GroundTruthFrame(round(tk, 9), xk, shape.knots.copy(), visibility(xk, shape.knots)))
        t = tk
    return frames


def visibility(x: KinematicState, knots_vcs, sensor_origin=None) -> np.ndarray:
    """Indices of knots whose outward normal faces the sensor.

    The outward normal of a knot is its offset from the knot centroid; a knot is
    visible iff that offset has a negative dot product with the sensor→knot ray.
    """
    o = np.zeros(3) if sensor_origin is None else np.asarray(sensor_origin, dtype=float)
    pts = np.asarray(knots_vcs) @ x.R.T + x.p
    normals = pts - pts.mean(axis=0)
    rays = pts - o
    return np.flatnonzero(np.einsum("ta,ta->t", normals, rays) < 0)


# --- measurement sampling ---------------------------------------------------------


def sample_radar(gt: GroundTruthFrame, alpha: float, Q_sim=None, rng=None, lam: float = 1.0):
    """max(1, Poisson(α)) points, each a visible knot (drawn by SGW weight) plus noise."""
    if alpha <= 0:
        raise ValueError("Poisson rate must be positive")
    rng = np.random.default_rng(rng)
    Q_sim = 0.5 * np.eye(3) if Q_sim is None else np.asarray(Q_sim, dtype=float)
    count = max(1, int(rng.poisson(alpha)))
    idx = gt.visible if len(gt.visible) else np.arange(len(gt.knots_vcs))
    knots = gt.knots_vcs[idx]
    w = sgw_weights(gt.x_true, knots, lam)
    pick = rng.choice(len(idx), size=count, p=w)
    pts = knots[pick] @ gt.x_true.R.T + gt.x_true.p
    noise = rng.multivariate_normal(np.zeros(3), Q_sim, size=count) if np.any(Q_sim) else 0.0
    return pts + noise


def sample_keypoints(
    gt: GroundTruthFrame,
    K: CameraIntrinsics,
    sigma_px: float = 2.0,
    detection_prob: float = 0.95,
    rng=None,
) -> list[Keypoint]:
    """Visible knots and all four bottom corners with pixel noise and random drop-outs.

    With ``detection_prob = 0`` the result is empty (corners are dropped too).
    """
    if sigma_px < 0:
        raise ValueError("pixel noise must be non-negative")
    rng = np.random.default_rng(rng)
    x = gt.x_true
    items = [("knot", int(t) + 1, gt.knots_vcs[t]) for t in gt.visible]
    items += [("corner", i + 1, CORNER_G[i] @ x.xi) for i in range(4)]
    out = []
    for kind, kid, pt in items:
        noise = rng.normal(0.0, sigma_px, size=2) if sigma_px > 0 else np.zeros(2)
        keep = rng.random() < detection_prob
        try:
            uv = project_point(K, x.R @ pt + x.p)
        except BehindCameraError:
            continue
        if keep:
            uv = uv + noise
            out.append(Keypoint(kind, kid, float(uv[0]), float(uv[1])))
    return out


def make_scenario(
    kind: str,
    alpha: float = 10.0,
    seed: int = 0,
    dt: float = 0.1,
    K: CameraIntrinsics | None = None,
    sigma_px: float = 2.0,
    detection_prob: float = 0.95,
    Q_sim=None,
    lam: float = 1.0,
) -> list[ScenarioFrame]:
    K = CameraIntrinsics() if K is None else K
    rng = np.random.default_rng(seed)
    frames = []
    for gt in gen_trajectory(kind, dt=dt):
        radar = sample_radar(gt, alpha, Q_sim, rng, lam)
        kps = sample_keypoints(gt, K, sigma_px, detection_prob, rng)
        frames.append(ScenarioFrame(gt, FrameMeasurements(gt.time, radar, kps)))
    return frames


# --- JSONL I/O ----------------------------------------------------------------------


def _r(x):
    """Round to 9 significant digits (nested lists/arrays)."""
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_r(v) for v in x]
    return float(f"{float(x):.9g}")


def frame_to_dict(fr: ScenarioFrame) -> dict:
    x = fr.truth.x_true
    return {
        "schema_version": SCHEMA_VERSION,
        "t": _r(fr.truth.time),
        "truth": {
            "p": _r(x.p),
            "q": _r(x.q),
            "v": _r(x.v),
            "omega": _r(x.omega),
            "xi": _r(x.xi),
            "knots": _r(fr.truth.knots_vcs),
            "visible": [int(i) + 1 for i in fr.truth.visible],
        },
        "radar": _r(fr.meas.radar),
        "keypoints": [
            {"kind": k.kind, "id": int(k.id), "u": _r(k.u), "v": _r(k.v)} for k in fr.meas.keypoints
        ],
    }


_FRAME_KEYS = {"schema_version", "t", "truth", "radar", "keypoints"}
_TRUTH_KEYS = {"p", "q", "v", "omega", "xi", "knots", "visible"}


def frame_from_dict(d: dict, where: str = "") -> ScenarioFrame:
    for extra in sorted(set(d) - _FRAME_KEYS):
        warnings.warn(f"{where}ignoring unknown field {extra!r}", stacklevel=3)
    tr = d["truth"]
    for extra in sorted(set(tr) - _TRUTH_KEYS):
        warnings.warn(f"{where}ignoring unknown truth field {extra!r}", stacklevel=3)
    q = rotkit.quat_normalize(np.asarray(tr["q"], dtype=float))
    x = KinematicState.make(tr["p"], tr["v"], rotkit.quat_log(q), tr["omega"], tr["xi"])
    knots = np.asarray(tr["knots"], dtype=float).reshape(-1, 3)
    vis = np.asarray(tr.get("visible", []), dtype=int) - 1
    gt = GroundTruthFrame(float(d["t"]), x, knots, vis)
    kps = [Keypoint(k["kind"], int(k["id"]), float(k["u"]), float(k["v"])) for k in d["keypoints"]]
    return ScenarioFrame(gt, FrameMeasurements(float(d["t"]), np.asarray(d["radar"], dtype=float), kps))


def write_scenario(path, frames) -> None:
    with open(path, "w") as f:
        for fr in frames:
            f.write(json.dumps(frame_to_dict(fr), separators=(",", ":")) + "\n")


def read_scenario(path) -> list[ScenarioFrame]:
    frames = []
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            d = json.loads(line)
            if not isinstance(d, dict):
                raise TypeError("frame is not a JSON object")
            ver = d.get("schema_version", SCHEMA_VERSION)
            if ver != SCHEMA_VERSION:
                raise ValueError(f"unsupported schema version {ver}")
            frames.append(frame_from_dict(d, f"line {lineno}: "))
        except (ValueError, KeyError, TypeError) as exc:
            raise ScenarioParseError(f"{path}:{lineno}: malformed scenario frame ({exc})") from exc
    return frames
