"""Time update: 3D CTRV reference prediction, error-state transition and the
elastic-skeleton spring/damper transition.

Error-state ordering (12 dims): ``[δp(3), δv, δθ(3), δω(3), δξ(2)]``.
Skeleton component ordering (9 dims): ``[u(3), ϖ(3), v(3)]``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, replace

import numpy as np

from . import rotkit

FORWARD = np.array([1.0, 0.0, 0.0])

# slices into the 12-dim error state
P_SL = slice(0, 3)
V_IDX = 3
TH_SL = slice(4, 7)
OM_SL = slice(7, 10)
XI_SL = slice(10, 12)
ERR_DIM = 12


@dataclass(frozen=True)
class KinematicState:
    p: np.ndarray
    v: float
    theta: np.ndarray
    omega: np.ndarray
    xi: np.ndarray

    @staticmethod
    def make(p, v, theta, omega, xi) -> "KinematicState":
        return KinematicState(
            np.asarray(p, dtype=float).copy(),
            float(v),
            np.asarray(theta, dtype=float).copy(),
            np.asarray(omega, dtype=float).copy(),
            np.asarray(xi, dtype=float).copy(),
        )

    @property
    def q(self) -> np.ndarray:
        return rotkit.quat_exp(self.theta)

    @property
    def R(self) -> np.ndarray:
        return rotkit.rot_from_rotvec(self.theta)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.p, [self.v], self.theta, self.omega, self.xi])

    @staticmethod
    def from_vector(x) -> "KinematicState":
        x = np.asarray(x, dtype=float)
        return KinematicState.make(x[0:3], x[3], x[4:7], x[7:10], x[10:12])


@dataclass
class ErrorTransition:
    Phi: np.ndarray
    M0: np.ndarray
    M1: np.ndarray
    M2: np.ndarray
    S0: np.ndarray
    S1: np.ndarray
    S2: np.ndarray


@dataclass
class SkeletonTransition:
    Phi: np.ndarray  # 9x9
    eps: float
    rho: float
    M3: float
    M4: float


def _sigma_coeffs(phi: float) -> tuple[float, float, float, float]:
    """Coefficients of the Σ1/Δt and Σ2/Δt² expansions in powers of [ωΔt]×.

    Σ1 = Δt (I + b1 K + b2 K²), Σ2 = Δt² (I/2 + c1 K + c2 K²), K = [ωΔt]×.
    """
    if phi < 5e-2:
        p2 = phi * phi
        b1 = 0.5 - p2 / 24.0 + p2**2 / 720.0 - p2**3 / 40320.0
        b2 = 1.0 / 6.0 - p2 / 120.0 + p2**2 / 5040.0 - p2**3 / 362880.0
        c2 = 1.0 / 24.0 - p2 / 720.0 + p2**2 / 40320.0 - p2**3 / 3628800.0
        return b1, b2, b2, c2
    s, c = np.sin(phi), np.cos(phi)
    b1 = (1.0 - c) / phi**2
    b2 = (phi - s) / phi**3
    c2 = (0.5 * phi * phi - 1.0 + c) / phi**4
    return b1, b2, b2, c2


def sigma_blocks(omega, dt: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Σ0 = exp([ω]×Δt), Σ1 = ∫exp, Σ2 = ∫∫exp, evaluated stably for any ‖ω‖."""
    w = np.asarray(omega, dtype=float) * dt
    phi = float(np.linalg.norm(w))
    K = rotkit.skew(w)
    K2 = K @ K
    I = np.eye(3)
    S0 = rotkit.rot_from_rotvec(w)
    b1, b2, c1, c2 = _sigma_coeffs(phi)
    S1 = dt * (I + b1 * K + b2 * K2)
    S2 = dt * dt * (0.5 * I + c1 * K + c2 * K2)
    return S0, S1, S2


def predict_reference(x: KinematicState, dt: float) -> KinematicState:
    if dt == 0:
        return x
    _, S1, _ = sigma_blocks(x.omega, dt)
    d = x.R @ FORWARD
    p = x.p + x.v * S1 @ d
    q = rotkit.quat_mul(rotkit.quat_exp(x.omega * dt), x.q)
    q = rotkit.quat_normalize(q)
    return KinematicState.make(p, x.v, rotkit.quat_log(q), x.omega, x.xi)


def error_dynamics(x: KinematicState) -> np.ndarray:
    """Continuous-time error-state matrix F."""
    d = x.R @ FORWARD
    F = np.zeros((ERR_DIM, ERR_DIM))
    F[P_SL, V_IDX] = d
    F[P_SL, TH_SL] = -x.v * rotkit.skew(d)
    F[TH_SL, TH_SL] = rotkit.skew(x.omega)
    F[TH_SL, OM_SL] = np.eye(3)
    return F


def error_transition(x: KinematicState, dt: float) -> ErrorTransition:
    d = x.R @ FORWARD
    M0 = d
    M1 = -x.v * rotkit.skew(d)
    M2 = rotkit.skew(x.omega)
    S0, S1, S2 = sigma_blocks(x.omega, dt)
    Phi = np.eye(ERR_DIM)
    Phi[P_SL, V_IDX] = M0 * dt
    Phi[P_SL, TH_SL] = M1 @ S1
    Phi[P_SL, OM_SL] = M1 @ S2
    Phi[TH_SL, TH_SL] = S0
    Phi[TH_SL, OM_SL] = S1
    return ErrorTransition(Phi, M0, M1, M2, S0, S1, S2)


def symmetrize(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + np.swapaxes(A, -1, -2))


def check_spd(A: np.ndarray, name: str = "matrix") -> None:
    try:
        np.linalg.cholesky(A)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"{name} is not symmetric positive definite") from exc


def predict_covariance(P, Phi, W, dt: float) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    check_spd(symmetrize(P), "P")
    if isinstance(Phi, ErrorTransition):
        Phi = Phi.Phi
    return symmetrize(Phi @ P @ Phi.T + np.asarray(W) * dt)


# --- elastic skeleton ---------------------------------------------------------


def skeleton_dynamics(eps: float, rho: float) -> np.ndarray:
    """Continuous 9x9 F_ϑ."""
    I = np.eye(3)
    Z = np.zeros((3, 3))
    return np.block([[Z, Z, Z], [Z, Z, I], [eps * I, -eps * I, -rho * I]])


def _spring_scalars(eps: float, rho: float, dt: float) -> tuple[float, float]:
    """M3 and M4 scalars of the damped spring with the exponent exp(-ρΔt/2).

    Uses cosh(βΔt) and sinh(βΔt)/β with β² = ρ²/4 - ε, which are entire in β²,
    so under-, over- and critically-damped regimes share one code path.
    """
    b2 = 0.25 * rho * rho - eps
    x = b2 * dt * dt
    if abs(x) < 1e-6:
        ch = 1.0 + x / 2 + x * x / 24 + x**3 / 720
        sh = dt * (1.0 + x / 6 + x * x / 120 + x**3 / 5040)
    else:
        beta = cmath.sqrt(b2)
        ch = cmath.cosh(beta * dt).real
        sh = (cmath.sinh(beta * dt) / beta).real
    decay = np.exp(-0.5 * rho * dt)
    M4 = decay * sh
    M3 = -1.0 + decay * (ch + 0.5 * rho * sh)
    return M3, M4


def skeleton_transition(eps: float, rho: float, dt: float) -> SkeletonTransition:
    if eps < 0 or rho < 0:
        raise ValueError("spring and damping constants must be non-negative")
    M3, M4 = _spring_scalars(eps, rho, dt)
    small = np.array(
        [
            [1.0, 0.0, 0.0],
            [-M3, 1.0 + M3, M4],
            [eps * M4, -eps * M4, 1.0 + M3 - rho * M4],
        ]
    )
    return SkeletonTransition(np.kron(small, np.eye(3)), eps, rho, M3, M4)


# The skeleton noise vector is [n_u; 0; n_a]: reflectors and knot accelerations are
# perturbed, knot positions only move through their velocity.
SKELETON_NOISE_INPUT = np.diag([1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0])


def skeleton_process_noise(W_theta) -> np.ndarray:
    """Covariance of [n_u; 0; n_a] given the 9x9 noise intensity W_ϑ."""
    S = SKELETON_NOISE_INPUT
    return S @ np.asarray(W_theta, dtype=float) @ S


def predict_skeleton(mu, Sigma, Phi, W_theta, dt: float):
    """Propagate one component (or a stack of T components) through Φ_ϑ."""
    if isinstance(Phi, SkeletonTransition):
        Phi = Phi.Phi
    mu = np.asarray(mu, dtype=float)
    Sigma = np.asarray(Sigma, dtype=float)
    mu_new = mu @ Phi.T
    Sigma_new = symmetrize(Phi @ Sigma @ Phi.T + np.asarray(W_theta) * dt)
    return mu_new, Sigma_new


def with_zero_turn_rate(x: KinematicState) -> KinematicState:
    return replace(x, omega=np.zeros(3))
