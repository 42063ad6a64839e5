"""Measurement models.

Every model returns a :class:`LinearizedMeasurement` whose ``residual`` is the
measurement minus the prediction at the reference state, so the linear model
reads ``residual ≈ H_x δx (+ H_aux δaux) + noise``.  The pose error δθ is an
additive perturbation of the rotation vector, which is what makes the left
Jacobian appear in every rotation derivative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rotkit
from .motion import ERR_DIM, FORWARD, OM_SL, P_SL, TH_SL, XI_SL, KinematicState
from .template import MIRROR, SkeletonTemplate, corner_matrix

Z_MIN = 0.1


class BehindCameraError(ValueError):
    pass


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float = 1000.0
    fy: float = 1000.0
    u0: float = 640.0
    v0: float = 360.0

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")

    @property
    def K(self) -> np.ndarray:
        return np.array([[self.fx, 0.0, self.u0], [0.0, self.fy, self.v0], [0.0, 0.0, 1.0]])


@dataclass(frozen=True)
class GroundPlane:
    n: tuple
    d: float

    def __post_init__(self):
        n = np.asarray(self.n, dtype=float)
        if abs(np.linalg.norm(n) - 1.0) > 1e-9:
            raise ValueError("ground plane normal must be a unit vector")

    @property
    def normal(self) -> np.ndarray:
        return np.asarray(self.n, dtype=float)

    def signed_distance(self, pts) -> np.ndarray:
        return np.asarray(pts) @ self.normal + self.d

    def project(self, pts) -> np.ndarray:
        """Orthogonal projection of points onto the plane."""
        pts = np.asarray(pts, dtype=float)
        return pts - np.multiply.outer(self.signed_distance(pts), self.normal)


def camera_ground_plane(height: float, pitch: float) -> GroundPlane:
    """Ground plane in the frame of a camera mounted ``height`` metres above it and
    pitched down by ``pitch`` radians (camera axes: x right, y down, z forward)."""
    return GroundPlane((0.0, -float(np.cos(pitch)), -float(np.sin(pitch))), float(height))


@dataclass
class LinearizedMeasurement:
    residual: np.ndarray
    H_x: np.ndarray
    R: np.ndarray
    H_aux: np.ndarray | None = None


# --- SGW radar weights ---------------------------------------------------------


def sgw_log_weights(x: KinematicState, reflectors, lam: float) -> np.ndarray:
    """Unnormalized log weights ``λ(-cos∠(p, R u_t) - 1)``."""
    p = np.asarray(x.p, dtype=float)
    pn = np.linalg.norm(p)
    if pn == 0:
        raise ValueError("vehicle position must be non-zero for SGW weights")
    U = np.atleast_2d(np.asarray(reflectors, dtype=float))
    un = np.linalg.norm(U, axis=1)
    ok = un > 1e-6
    logw = np.empty(len(U))
    dirs = U[ok] @ x.R.T
    logw[ok] = lam * (-(dirs @ p) / (pn * un[ok]) - 1.0)
    if not ok.all():
        # reflector at the origin has no direction; give it the mean weight of the others
        fill = np.log(np.mean(np.exp(logw[ok]))) if ok.any() else 0.0
        logw[~ok] = fill
    return logw


def sgw_weights(x: KinematicState, reflectors, lam: float = 1.0) -> np.ndarray:
    logw = sgw_log_weights(x, reflectors, lam)
    w = np.exp(logw - logw.max())
    return w / w.sum()


# --- pinhole -------------------------------------------------------------------


def project_point(K: CameraIntrinsics, p_scs, z_min: float = Z_MIN) -> np.ndarray:
    x, y, z = p_scs
    if z <= z_min:
        raise BehindCameraError(f"point depth {z:.3f} m is not in front of the camera")
    return np.array([K.fx * x / z + K.u0, K.fy * y / z + K.v0])


def project_points(K: CameraIntrinsics, pts) -> np.ndarray:
    pts = np.atleast_2d(pts)
    z = pts[:, 2]
    return np.stack([K.fx * pts[:, 0] / z + K.u0, K.fy * pts[:, 1] / z + K.v0], axis=1)


def pixel_jacobian(K: CameraIntrinsics, p_scs) -> np.ndarray:
    x, y, z = p_scs
    return np.array(
        [[K.fx / z, 0.0, -x * K.fx / z**2], [0.0, K.fy / z, -y * K.fy / z**2]]
    )


def rigid_transform(x: KinematicState, pts_vcs) -> np.ndarray:
    return np.asarray(pts_vcs) @ x.R.T + x.p


def rotated_point_jacobian(x: KinematicState, pt_vcs, R=None, Jl=None) -> np.ndarray:
    """∂(R{θ} t)/∂δθ = -[R t]× J_l(θ)."""
    R = x.R if R is None else R
    Jl = rotkit.left_jacobian(x.theta) if Jl is None else Jl
    return -rotkit.skew(R @ pt_vcs) @ Jl


def knot_measurement(x: KinematicState, knot, K: CameraIntrinsics, z=None, Q=None):
    """Pixel model of one skeleton knot; H_aux is w.r.t. the knot's VCS position."""
    R = x.R
    knot = np.asarray(knot, dtype=float)
    ps = R @ knot + x.p
    pred = project_point(K, ps)
    Jp = pixel_jacobian(K, ps)
    H = np.zeros((2, ERR_DIM))
    H[:, P_SL] = Jp
    H[:, TH_SL] = Jp @ rotated_point_jacobian(x, knot, R)
    Haux = Jp @ R
    res = (np.zeros(2) if z is None else np.asarray(z, dtype=float)) - pred
    return LinearizedMeasurement(res, H, np.eye(2) * 5.0 if Q is None else Q, Haux)


def corner_measurement(x: KinematicState, corner_id: int, K: CameraIntrinsics, z=None, Q=None):
    R = x.R
    G = corner_matrix(corner_id)
    c = G @ x.xi
    ps = R @ c + x.p
    pred = project_point(K, ps)
    Jp = pixel_jacobian(K, ps)
    H = np.zeros((2, ERR_DIM))
    H[:, P_SL] = Jp
    H[:, TH_SL] = Jp @ rotated_point_jacobian(x, c, R)
    H[:, XI_SL] = Jp @ R @ G
    res = (np.zeros(2) if z is None else np.asarray(z, dtype=float)) - pred
    return LinearizedMeasurement(res, H, np.eye(2) * 5.0 if Q is None else Q)


def corner_position(x: KinematicState, corner_id: int) -> np.ndarray:
    return x.R @ corner_matrix(corner_id) @ x.xi + x.p


# --- pseudo-measurements -----------------------------------------------------------


def angular_velocity_constraint(x: KinematicState, Q_rot: float = 0.1):
    d = x.R @ FORWARD
    H = np.zeros((1, ERR_DIM))
    H[0, OM_SL] = d
    H[0, TH_SL] = -x.omega @ rotkit.skew(d) @ rotkit.left_jacobian(x.theta)
    res = np.array([-(d @ x.omega)])
    return LinearizedMeasurement(res, H, np.array([[Q_rot]]))


def ground_constraint(x: KinematicState, plane: GroundPlane, corner_id: int, Q_grnd: float = 1e-4):
    R = x.R
    G = corner_matrix(corner_id)
    n = plane.normal
    c = R @ G @ x.xi
    H = np.zeros((1, ERR_DIM))
    H[0, P_SL] = n
    H[0, TH_SL] = -n @ rotkit.skew(c) @ rotkit.left_jacobian(x.theta)
    H[0, XI_SL] = n @ R @ G
    res = np.array([-(n @ (x.p + c) + plane.d)])
    return LinearizedMeasurement(res, H, np.array([[Q_grnd]]))


def symmetry_constraint(template: SkeletonTemplate, t: int):
    """Mirror partner of knot ``t`` (1-based id) and the reflection D = diag(1, -1, 1)."""
    if not 1 <= t <= template.T:
        raise IndexError(f"knot id {t} outside 1..{template.T}")
    s = int(template.sym[t - 1])
    if s < 0 or template.sym[s] != t - 1:
        raise ValueError(f"knot {t} has no consistent mirror partner")
    return s + 1, MIRROR.copy()


def symmetry_residual(knot_t, knot_sym) -> np.ndarray:
    return np.asarray(knot_sym) - MIRROR @ np.asarray(knot_t)
