"""Hyperparameters and their JSON representation.

Matrices in a config file may be given as a scalar (times identity), a list
(diagonal) or a nested list (full matrix).  Missing keys take the defaults
below, which are the published settings of the method.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .sensors import CameraIntrinsics, GroundPlane, camera_ground_plane

CAMERA_HEIGHT = 6.0
CAMERA_PITCH = float(np.deg2rad(10))

_MATRIX_DIMS = {
    "W": 12,
    "W_theta": 9,
    "Q": 3,
    "Q_cb": 2,
    "Q_cg": 2,
    "Q_sym": 3,
    "P0": 12,
    "Sigma0": 9,
}


def as_matrix(value, dim: int) -> np.ndarray:
    a = np.asarray(value, dtype=float)
    if a.ndim == 0:
        return float(a) * np.eye(dim)
    if a.ndim == 1:
        if a.shape != (dim,):
            raise ValueError(f"diagonal of length {a.shape[0]} given, expected {dim}")
        return np.diag(a)
    if a.shape != (dim, dim):
        raise ValueError(f"matrix of shape {a.shape} given, expected {(dim, dim)}")
    return a


def _default_W():
    return [0.0, 0.0, 0.0, 0.01, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.1, 0.1]


def _default_P0():
    # p, v, θ, ω, ξ
    return [1.0, 1.0, 1.0, 25.0, 0.02, 0.02, 0.02, 0.05, 0.05, 0.05, 0.5, 0.5]


def _default_Sigma0():
    # u, ϖ, v (knot velocity)
    return [0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.05, 0.05, 0.05]


@dataclass
class Hyperparams:
    W: object = field(default_factory=_default_W)
    W_theta: object = 1.0
    eps: float = 100.0
    rho: float = 20.0
    Q: object = 0.5
    Q_cb: object = 5.0
    Q_cg: object = 5.0
    Q_rot: float = 0.1
    Q_grnd: float = 1e-4
    Q_sym: object = 0.05
    lam: float = 1.0
    T: int = 24
    N_vb: int = 3
    motion: str = "ctrv"  # ctrv | cv
    es_fusion: bool = True
    camera: CameraIntrinsics = field(default_factory=CameraIntrinsics)
    plane: GroundPlane = field(
        default_factory=lambda: camera_ground_plane(CAMERA_HEIGHT, CAMERA_PITCH)
    )
    # track initialisation (not part of the published settings)
    P0: object = field(default_factory=_default_P0)
    Sigma0: object = field(default_factory=_default_Sigma0)
    v0: float = 0.0
    heading0: float = 0.0
    n_min: float = 1e-6
    reg: float = 1e-9

    def __post_init__(self):
        if self.motion not in ("ctrv", "cv"):
            raise ValueError(f"motion must be 'ctrv' or 'cv', got {self.motion!r}")
        if self.N_vb < 0:
            raise ValueError("N_vb must be non-negative")
        if isinstance(self.camera, dict):
            self.camera = CameraIntrinsics(**self.camera)
        if isinstance(self.plane, dict):
            self.plane = GroundPlane(tuple(self.plane["n"]), float(self.plane["d"]))
        for name, dim in _MATRIX_DIMS.items():
            as_matrix(getattr(self, name), dim)  # validate early

    def mat(self, name: str) -> np.ndarray:
        return as_matrix(getattr(self, name), _MATRIX_DIMS[name])

    @property
    def eps_effective(self) -> float:
        return self.eps if self.es_fusion else 0.0

    def to_dict(self) -> dict:
        d = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, CameraIntrinsics):
                v = asdict(v)
            elif isinstance(v, GroundPlane):
                v = {"n": list(map(float, v.n)), "d": float(v.d)}
            elif isinstance(v, np.ndarray):
                v = v.tolist()
            d[f.name] = v
        return d

    @staticmethod
    def from_dict(d: dict) -> "Hyperparams":
        known = {f.name for f in fields(Hyperparams)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown hyperparameter(s): {sorted(unknown)}")
        return Hyperparams(**d)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    @staticmethod
    def load(path) -> "Hyperparams":
        return Hyperparams.from_dict(json.loads(Path(path).read_text()))
