"""Variational-Bayes radar/camera extended-object tracker.

Belief representation
---------------------
* Kinematics: a reference state ``x_ref`` plus a Gaussian error ``δx ~ N(dx, P)``.
  The rotation error is an *additive* perturbation of the rotation vector
  (``θ = θ_ref + δθ``), the convention under which every measurement Jacobian
  carries a left Jacobian ``J_l(θ_ref)``.  The time update works in
  left-multiplicative coordinates (``R = Exp(δφ) R_ref``); :func:`predict`
  converts with ``δφ = J_l(θ_ref) δθ`` on the way in and out.
* Skeleton: ``T`` independent Gaussians over ``ϑ_t = [u_t, ϖ_t, v_t]``
  (radar reflector, visual knot, knot velocity) in the vehicle frame.

Measurement update
------------------
``N_vb`` rounds of mean-field coordinate ascent over q(x) q(ϑ) q(A).  Every
round starts from the *predicted* densities as prior, keeps ``x_ref`` fixed and
recomputes (responsibilities → sufficient statistics → q(x) → q(ϑ)).  All
expectations of the bilinear radar model ``ζ_t = p + (I + [J δθ]×) R u_t`` are
taken exactly, including the terms that depend on the current means.  The
reference is re-based once after the loop.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from . import rotkit
from .config import Hyperparams
from .motion import (
    ERR_DIM,
    OM_SL,
    P_SL,
    TH_SL,
    V_IDX,
    XI_SL,
    KinematicState,
    check_spd,
    error_transition,
    predict_covariance,
    predict_reference,
    predict_skeleton,
    skeleton_process_noise,
    skeleton_transition,
    symmetrize,
    with_zero_turn_rate,
)
from .sensors import (
    BehindCameraError,
    GroundPlane,
    LinearizedMeasurement,
    angular_velocity_constraint,
    corner_measurement,
    ground_constraint,
    knot_measurement,
    sgw_weights,
)
from .template import MIRROR, SkeletonTemplate, default_pairs

log = logging.getLogger(__name__)

U_SL = slice(0, 3)
K_SL = slice(3, 6)  # knot position ϖ
KV_SL = slice(6, 9)  # knot velocity
SKEL_DIM = 9


class InsufficientMeasurements(ValueError):
    pass


# --- data types ------------------------------------------------------------------


@dataclass(frozen=True)
class Keypoint:
    kind: str  # "knot" | "corner"
    id: int  # knot id 1..T or corner id 1..4
    u: float
    v: float

    def __post_init__(self):
        if self.kind not in ("knot", "corner"):
            raise ValueError(f"unknown keypoint kind {self.kind!r}")

    @property
    def z(self) -> np.ndarray:
        return np.array([self.u, self.v])


@dataclass
class FrameMeasurements:
    time: float
    radar: np.ndarray  # (n, 3) sensor frame
    keypoints: list = field(default_factory=list)

    def __post_init__(self):
        self.radar = np.asarray(self.radar, dtype=float).reshape(-1, 3)


@dataclass
class KinematicBelief:
    x_ref: KinematicState
    dx: np.ndarray
    P: np.ndarray

    @property
    def mean(self) -> KinematicState:
        """Reference plus error mean (no canonicalization)."""
        return KinematicState.from_vector(self.x_ref.as_vector() + self.dx)


@dataclass
class SkeletonBelief:
    mu: np.ndarray  # (T, 9)
    Sigma: np.ndarray  # (T, 9, 9)

    @property
    def T(self) -> int:
        return self.mu.shape[0]

    @property
    def knots(self) -> np.ndarray:
        return self.mu[:, K_SL]

    @property
    def reflectors(self) -> np.ndarray:
        return self.mu[:, U_SL]


@dataclass
class Responsibilities:
    upsilon: np.ndarray  # (n, T)
    n: np.ndarray | None = None  # (T,)
    zbar: np.ndarray | None = None  # (T, 3)
    Zbar: np.ndarray | None = None  # (T, 3, 3)
    active: np.ndarray | None = None  # (T,) bool


# --- small linear-algebra helpers ---------------------------------------------------


def trace_skew_vector(A: np.ndarray) -> np.ndarray:
    """Vector c with ``tr([w]× A) = wᵀ c`` for every w (works on stacks)."""
    A = np.asarray(A)
    return np.stack(
        [A[..., 1, 2] - A[..., 2, 1], A[..., 2, 0] - A[..., 0, 2], A[..., 0, 1] - A[..., 1, 0]],
        axis=-1,
    )


def skew_quadratic(L: np.ndarray, S: np.ndarray) -> np.ndarray:
    """``[L]_* diag_3(S) [L]_*ᵀ``; with ``Λ = L Lᵀ`` it satisfies
    ``aᵀ (·) a = tr(Λ [a]× S [a]×ᵀ)`` (star-operator sandwich form).  ``S`` may be a stack."""
    Ls = rotkit.skew_batch(np.asarray(L).T)  # [L_k]× for each column k
    return np.einsum("kab,...bc,kdc->...ad", Ls, S, Ls)


def spd_inverse(A: np.ndarray, reg: float = 1e-9, name: str = "information matrix"):
    """Inverse of an SPD (stack of) matrix; regularizes only if Cholesky fails."""
    A = symmetrize(A)
    try:
        np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        log.warning("%s ill-conditioned; adding %.1e·I before inversion", name, reg)
        A = A + reg * np.eye(A.shape[-1])
    return symmetrize(np.linalg.inv(A))


def _rotation_block(theta, inverse: bool = False) -> np.ndarray:
    """Identity except ``J_l(θ)`` (or its inverse) on the δθ block."""
    Tm = np.eye(ERR_DIM)
    J = rotkit.left_jacobian(theta)
    Tm[TH_SL, TH_SL] = np.linalg.inv(J) if inverse else J
    return Tm


# --- initialisation ---------------------------------------------------------------


def back_project_to_plane(hp: Hyperparams, u: float, v: float):
    K = hp.camera
    ray = np.array([(u - K.u0) / K.fx, (v - K.v0) / K.fy, 1.0])
    n = hp.plane.normal
    denom = n @ ray
    if abs(denom) < 1e-9:
        return None
    s = -hp.plane.d / denom
    return s * ray if s > 0 else None


def rotation_from_plane(n: np.ndarray, forward: np.ndarray) -> np.ndarray:
    """Vehicle-to-sensor rotation with body z along the plane normal and x along
    the in-plane component of ``forward``."""
    z = n / np.linalg.norm(n)
    x = forward - (forward @ z) * z
    nx = np.linalg.norm(x)
    if nx < 1e-9:
        raise InsufficientMeasurements("heading direction is parallel to the plane normal")
    x = x / nx
    y = np.cross(z, x)
    return np.column_stack([x, y, z])


def _heading_direction(hp: Hyperparams) -> np.ndarray:
    """Config heading (angle in the plane, measured from the in-plane image x axis)."""
    n = hp.plane.normal
    e1 = np.array([1.0, 0.0, 0.0])
    e1 = e1 - (e1 @ n) * n
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return np.cos(hp.heading0) * e1 + np.sin(hp.heading0) * e2


def init_track(frame: FrameMeasurements, template: SkeletonTemplate, hp: Hyperparams):
    """Initial beliefs from a single frame.

    Position: midpoint of a detected corner diagonal (1–3 or 2–4), else the
    centroid of the ground-back-projected corners, else the radar centroid
    snapped onto the ground plane.  Heading: front-minus-rear corner direction
    when both ends are seen, otherwise the configured heading.  Extent: length
    and width from every detected pair of corners sharing a side (three corners
    suffice), otherwise the template value.
    """
    if len(frame.radar) < 1 or len(frame.keypoints) < 4:
        raise InsufficientMeasurements("initialisation needs >= 1 radar point and >= 4 keypoints")
    plane = hp.plane
    n = plane.normal
    corners = {}
    for kp in frame.keypoints:
        if kp.kind == "corner":
            g = back_project_to_plane(hp, kp.u, kp.v)
            if g is not None:
                corners[kp.id] = g
    diagonals = [(a, b) for a, b in ((1, 3), (2, 4)) if a in corners and b in corners]
    if diagonals:
        p0 = np.mean([0.5 * (corners[a] + corners[b]) for a, b in diagonals], axis=0)
    elif corners:
        p0 = np.mean(list(corners.values()), axis=0)
    else:
        p0 = plane.project(frame.radar.mean(axis=0))
    front = [corners[i] for i in (1, 2) if i in corners]
    rear = [corners[i] for i in (3, 4) if i in corners]
    forward = None
    if front and rear:
        forward = np.mean(front, axis=0) - np.mean(rear, axis=0)
        if np.linalg.norm(forward - (forward @ n) * n) < 0.5:
            forward = None
    if forward is None:
        forward = _heading_direction(hp)
    R0 = rotation_from_plane(n, forward)
    xi0 = template.xi.copy()
    for k, sides in enumerate((((1, 4), (2, 3)), ((1, 2), (4, 3)))):  # length, then width
        d = [np.linalg.norm(corners[a] - corners[b]) for a, b in sides if a in corners and b in corners]
        if d and np.mean(d) > 0.5:
            xi0[k] = np.mean(d)
    theta0 = rotkit.quat_log(rotkit.quat_from_rot(R0))
    x0 = KinematicState.make(p0, hp.v0, theta0, np.zeros(3), xi0)
    kb = KinematicBelief(x0, np.zeros(ERR_DIM), hp.mat("P0").copy())

    # template knots stretched to the initial footprint
    scale = np.array([xi0[0] / template.xi[0], xi0[1] / template.xi[1], 1.0])
    knots = template.knots * scale
    mu = np.concatenate([knots, knots, np.zeros_like(knots)], axis=1)
    Sigma = np.broadcast_to(hp.mat("Sigma0"), (template.T, SKEL_DIM, SKEL_DIM)).copy()
    return kb, SkeletonBelief(mu, Sigma)


# --- time update ---------------------------------------------------------------------


def predict(kb: KinematicBelief, sb: SkeletonBelief, dt: float, hp: Hyperparams):
    """Propagate both beliefs by ``dt``; CV mode drops ω from the prediction only."""
    if dt < 0:
        raise ValueError("dt must be non-negative")
    if dt == 0:
        return kb, sb
    if np.any(kb.dx != 0):
        kb = rebase(kb)
    x = kb.x_ref
    x_motion = with_zero_turn_rate(x) if hp.motion == "cv" else x
    x_new = replace(predict_reference(x_motion, dt), omega=x.omega.copy())
    Phi = error_transition(x_motion, dt)
    T_in = _rotation_block(x.theta)
    P_left = symmetrize(T_in @ kb.P @ T_in.T)
    P_left = predict_covariance(P_left, Phi, hp.mat("W"), dt)
    T_out = _rotation_block(x_new.theta, inverse=True)
    P_new = symmetrize(T_out @ P_left @ T_out.T)

    trans = skeleton_transition(hp.eps_effective, hp.rho, dt)
    mu, Sigma = predict_skeleton(sb.mu, sb.Sigma, trans, skeleton_process_noise(hp.mat("W_theta")), dt)
    return KinematicBelief(x_new, np.zeros(ERR_DIM), P_new), SkeletonBelief(mu, Sigma)


# --- responsibilities and sufficient statistics -------------------------------------


def _radar_moments(kb: KinematicBelief, sb: SkeletonBelief):
    """Shared quantities of the bilinear radar model at the current iterates."""
    x = kb.x_ref
    R = x.R
    J = rotkit.left_jacobian(x.theta)
    b_hat = J @ kb.dx[TH_SL]
    C_bb = J @ kb.P[TH_SL, TH_SL] @ J.T
    C_bp = J @ kb.P[TH_SL, P_SL]  # Cov(b, δp)
    w_hat = sb.mu[:, U_SL] @ R.T  # (T, 3)
    S_w = R @ sb.Sigma[:, U_SL, U_SL] @ R.T  # (T, 3, 3)
    return R, J, b_hat, C_bb, C_bp, w_hat, S_w


def expected_radar_sqdist(kb: KinematicBelief, sb: SkeletonBelief, Z, Q) -> np.ndarray:
    """``E[(z_i - ζ_t)ᵀ Q⁻¹ (z_i - ζ_t)]`` under q(x) q(ϑ), shape (n, T)."""
    R, J, b_hat, C_bb, C_bp, w_hat, S_w = _radar_moments(kb, sb)
    Qinv = np.linalg.inv(Q)
    Lq = np.linalg.cholesky(Qinv)
    x = kb.x_ref
    A_hat = np.eye(3) + rotkit.skew(b_hat)
    mean_zeta = x.p + kb.dx[P_SL] + w_hat @ A_hat.T  # (T, 3)
    # A = Δp - [ŵ]× Δb : x-only part of the fluctuation
    G = np.concatenate(
        [np.broadcast_to(np.eye(3), (len(w_hat), 3, 3)), -rotkit.skew_batch(w_hat)], axis=2
    )
    C6 = np.block([[kb.P[P_SL, P_SL], C_bp.T], [C_bp, C_bb]])
    cov = G @ C6 @ np.swapaxes(G, 1, 2)
    cov = cov + A_hat @ S_w @ A_hat.T  # ϑ-only part
    tr_cov = np.einsum("ab,tba->t", Qinv, cov)
    # product term [Δb]× Δw
    tr_prod = np.einsum("tab,ba->t", skew_quadratic(Lq, S_w), C_bb)
    diff = np.asarray(Z)[:, None, :] - mean_zeta[None, :, :]
    maha = np.einsum("nta,ab,ntb->nt", diff, Qinv, diff)
    return maha + (tr_cov + tr_prod)[None, :]


def compute_responsibilities(kb, sb, Z, pi, hp: Hyperparams) -> Responsibilities:
    Z = np.asarray(Z, dtype=float).reshape(-1, 3)
    pi = np.asarray(pi, dtype=float)
    with np.errstate(divide="ignore"):
        logpi = np.log(pi)
    logr = logpi[None, :] - 0.5 * expected_radar_sqdist(kb, sb, Z, hp.mat("Q"))
    logr -= logr.max(axis=1, keepdims=True)
    r = np.exp(logr)
    r /= r.sum(axis=1, keepdims=True)
    return Responsibilities(r)


def radar_sufficient_stats(resp: Responsibilities, Z, n_min: float = 1e-6) -> Responsibilities:
    Z = np.asarray(Z, dtype=float).reshape(-1, 3)
    U = resp.upsilon
    n = U.sum(axis=0)
    active = n >= n_min
    zbar = np.zeros((U.shape[1], 3))
    zbar[active] = (U[:, active].T @ Z) / n[active, None]
    d = Z[:, None, :] - zbar[None, :, :]
    Zbar = np.einsum("it,ita,itb->tab", U, d, d)
    return Responsibilities(U, n, zbar, Zbar, active)


# --- measurement assembly -------------------------------------------------------------


def keypoint_measurements(x: KinematicState, sb: SkeletonBelief, frame, hp: Hyperparams):
    """Linearized knot and corner keypoint models at (x_ref, current knot means).

    Returns lists of (knot index, LinearizedMeasurement) and LinearizedMeasurement.
    Keypoints whose prediction falls behind the camera are skipped.
    """
    knots, corners = [], []
    Qcb, Qcg = hp.mat("Q_cb"), hp.mat("Q_cg")
    for kp in frame.keypoints:
        try:
            if kp.kind == "knot":
                t = kp.id - 1
                if not 0 <= t < sb.T:
                    raise ValueError(f"knot id {kp.id} outside template")
                knots.append((t, knot_measurement(x, sb.mu[t, K_SL], hp.camera, kp.z, Qcb)))
            else:
                corners.append(corner_measurement(x, kp.id, hp.camera, kp.z, Qcg))
        except BehindCameraError as exc:
            log.debug("skipping keypoint %s: %s", kp, exc)
    return knots, corners


def constraint_measurements(x: KinematicState, hp: Hyperparams) -> list:
    out = [angular_velocity_constraint(x, hp.Q_rot)]
    out += [ground_constraint(x, hp.plane, i, hp.Q_grnd) for i in (1, 2, 3, 4)]
    return out


def _add_linear(info, vec, lm: LinearizedMeasurement, H=None):
    H = lm.H_x if H is None else H
    Rinv = np.linalg.inv(lm.R)
    info += H.T @ Rinv @ H
    vec += H.T @ Rinv @ lm.residual


# --- q(x) update -------------------------------------------------------------------


def update_kinematic(kb, sb, stats, frame, hp: Hyperparams, prior=None, meas=None):
    """Information-form update of q(δx).

    ``prior`` is the predicted kinematic belief (defaults to ``kb``); ``meas``
    optionally carries pre-computed (knots, corners, constraints) linearizations.
    """
    prior = kb if prior is None else prior
    x = kb.x_ref
    info = np.linalg.inv(prior.P)
    vec = info @ prior.dx

    if stats is not None and stats.active is not None and stats.active.any():
        R = x.R
        J = rotkit.left_jacobian(x.theta)
        Qinv = hp.mat("Q")
        Qinv = np.linalg.inv(Qinv)
        Lq = np.linalg.cholesky(Qinv)
        act = stats.active
        n = stats.n[act]
        r = sb.mu[act, U_SL] @ R.T
        S = R @ sb.Sigma[act][:, U_SL, U_SL] @ R.T
        H = np.zeros((len(n), 3, ERR_DIM))
        H[:, :, P_SL] = np.eye(3)
        H[:, :, TH_SL] = -rotkit.skew_batch(r) @ J
        h = stats.zbar[act] - x.p - r
        Lam = n[:, None, None] * Qinv
        HtL = np.swapaxes(H, 1, 2) @ Lam
        info += np.einsum("tab,tbc->ac", HtL, H)
        vec += np.einsum("tab,tb->a", HtL, h)
        # reflector uncertainty: ½ aᵀ Q_tx a + aᵀ c, a = J δθ
        Qtx = np.einsum("t,tab->ab", n, skew_quadratic(Lq, S))
        c = trace_skew_vector(S @ Lam).sum(axis=0)
        info[TH_SL, TH_SL] += J.T @ Qtx @ J
        vec[TH_SL] -= J.T @ c

    if meas is None:
        knots, corners = keypoint_measurements(x, sb, frame, hp)
        cons = constraint_measurements(x, hp)
    else:
        knots, corners, cons = meas
    for _, lm in knots:
        _add_linear(info, vec, lm)
    for lm in corners:
        _add_linear(info, vec, lm)
    for lm in cons:
        _add_linear(info, vec, lm)

    P = spd_inverse(info, hp.reg, "kinematic information matrix")
    return KinematicBelief(x, P @ vec, P)


# --- q(ϑ) update ---------------------------------------------------------------------


def update_skeleton(kb, sb, stats, frame, hp: Hyperparams, prior=None, meas=None, template=None):
    """Per-component information-form update of q(ϑ_t).

    ``prior`` is the predicted skeleton belief (defaults to ``sb``); the mirror
    partner enters through its current mean.
    """
    prior = sb if prior is None else prior
    T = sb.T
    x = kb.x_ref
    info = np.linalg.inv(prior.Sigma)
    vec = np.einsum("tab,tb->ta", info, prior.mu)

    if stats is not None and stats.active is not None and stats.active.any():
        R, J, b_hat, C_bb, C_bp, _, _ = _radar_moments(kb, sb)
        Qinv = np.linalg.inv(hp.mat("Q"))
        Lq = np.linalg.cholesky(Qinv)
        act = stats.active
        n = stats.n[act]
        B = (np.eye(3) + rotkit.skew(b_hat)) @ R
        h = stats.zbar[act] - x.p - kb.dx[P_SL]
        BtQ = B.T @ Qinv
        idx = np.flatnonzero(act)
        info[idx, U_SL, U_SL] += n[:, None, None] * (BtQ @ B)
        info[idx, U_SL, U_SL] += n[:, None, None] * (R.T @ skew_quadratic(Lq, C_bb) @ R)
        vec[idx, U_SL] += n[:, None] * (h @ BtQ.T)
        vec[idx, U_SL] += n[:, None] * (R.T @ trace_skew_vector(C_bp @ Qinv))[None, :]

    # symmetry with the partner's current mean
    sym = template.sym if template is not None else default_pairs(T)
    Qs_inv = np.linalg.inv(hp.mat("Q_sym"))
    D = MIRROR
    self_paired = sym == np.arange(T)
    DQD = D @ Qs_inv @ D
    info[~self_paired, K_SL, K_SL] += DQD
    vec[~self_paired, K_SL] += sb.mu[sym[~self_paired], K_SL] @ (D @ Qs_inv).T
    ImD = np.eye(3) - D
    info[self_paired, K_SL, K_SL] += ImD @ Qs_inv @ ImD

    if meas is None:
        knots, _ = keypoint_measurements(x, sb, frame, hp)
    else:
        knots = meas[0]
    for t, lm in knots:
        Rinv = np.linalg.inv(lm.R)
        Ha = lm.H_aux
        y = lm.residual - lm.H_x @ kb.dx + Ha @ sb.mu[t, K_SL]
        info[t, K_SL, K_SL] += Ha.T @ Rinv @ Ha
        vec[t, K_SL] += Ha.T @ Rinv @ y

    Sigma = spd_inverse(info, hp.reg, "skeleton information matrix")
    mu = np.einsum("tab,tb->ta", Sigma, vec)
    return SkeletonBelief(mu, Sigma)


# --- rebase and the full VB update --------------------------------------------------


def rebase(kb: KinematicBelief) -> KinematicBelief:
    """Move the error mean into the reference: additive on every block (rotation
    vector included, which equals left-composing ``Exp(J_l δθ)``).  The rotation
    vector is canonicalized to norm ≤ π, with the covariance transported
    exactly when that changes the representation."""
    if not np.any(kb.dx):
        return kb
    xv = kb.x_ref.as_vector() + kb.dx
    x_new = KinematicState.from_vector(xv)
    P = kb.P
    th = x_new.theta
    if np.linalg.norm(th) > np.pi:
        thc = rotkit.canonical_rotvec(th)
        A = np.eye(ERR_DIM)
        A[TH_SL, TH_SL] = np.linalg.solve(rotkit.left_jacobian(thc), rotkit.left_jacobian(th))
        P = symmetrize(A @ P @ A.T)
        x_new = replace(x_new, theta=thc)
    return KinematicBelief(x_new, np.zeros(ERR_DIM), P.copy())


@dataclass
class UpdateDiagnostics:
    row_sum_err: float = 0.0
    weight_sum_err: float = 0.0
    n_sum_err: float = 0.0
    spd_ok: bool = True
    iterations: int = 0


def _all_spd(kb, sb) -> bool:
    try:
        check_spd(kb.P, "P")
        np.linalg.cholesky(sb.Sigma)
    except (ValueError, np.linalg.LinAlgError):
        return False
    return True


def vb_update(kb, sb, frame: FrameMeasurements, hp: Hyperparams, template=None, diag=None):
    """N_vb rounds of coordinate ascent from the predicted beliefs, then rebase."""
    if diag is None:
        diag = UpdateDiagnostics()
    if hp.N_vb == 0:
        return kb, sb
    if np.any(kb.dx):
        kb = rebase(kb)
    prior_kb, prior_sb = kb, sb
    x = kb.x_ref
    Z = frame.radar
    cons = constraint_measurements(x, hp)
    for _ in range(hp.N_vb):
        stats = None
        if len(Z):
            pi = sgw_weights(x, sb.reflectors, hp.lam)
            diag.weight_sum_err = max(diag.weight_sum_err, abs(pi.sum() - 1.0))
            resp = compute_responsibilities(kb, sb, Z, pi, hp)
            stats = radar_sufficient_stats(resp, Z, hp.n_min)
            diag.row_sum_err = max(diag.row_sum_err, np.abs(resp.upsilon.sum(axis=1) - 1).max())
            diag.n_sum_err = max(diag.n_sum_err, abs(stats.n.sum() - len(Z)))
        knots, corners = keypoint_measurements(x, sb, frame, hp)
        kb = update_kinematic(kb, sb, stats, frame, hp, prior=prior_kb, meas=(knots, corners, cons))
        sb = update_skeleton(kb, sb, stats, frame, hp, prior=prior_sb, meas=(knots,), template=template)
        diag.spd_ok &= _all_spd(kb, sb)
        diag.iterations += 1
    return rebase(kb), sb


def ground_residuals(x: KinematicState, plane: GroundPlane) -> np.ndarray:
    from .template import CORNER_G

    pts = x.p + (CORNER_G @ x.xi) @ x.R.T
    return plane.signed_distance(pts)


# --- tracker driver -----------------------------------------------------------------


class Tracker:
    """Stateful wrapper: initialise on the first frame, then predict/update."""

    def __init__(self, hp: Hyperparams, template: SkeletonTemplate | None = None):
        self.hp = hp
        self.template = template if template is not None else SkeletonTemplate()
        self.kb: KinematicBelief | None = None
        self.sb: SkeletonBelief | None = None
        self.time: float | None = None

    def step(self, frame: FrameMeasurements) -> UpdateDiagnostics:
        diag = UpdateDiagnostics()
        if self.kb is None:
            self.kb, self.sb = init_track(frame, self.template, self.hp)
        else:
            dt = frame.time - self.time
            self.kb, self.sb = predict(self.kb, self.sb, dt, self.hp)
        self.kb, self.sb = vb_update(self.kb, self.sb, frame, self.hp, self.template, diag)
        self.time = frame.time
        return diag
