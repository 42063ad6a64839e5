"""Quaternion / rotation-vector algebra and the block "star" operators.

Quaternions are numpy arrays ``[w, x, y, z]`` (Hamilton product).  Rotation
vectors are 3-arrays.  All functions are pure.
"""

from __future__ import annotations

import numpy as np

SMALL_ANGLE = 1e-7
# below this angle the trig coefficient functions switch to Taylor series
_SERIES_ANGLE = 5e-2

IDENTITY_QUAT = np.array([1.0, 0.0, 0.0, 0.0])


def skew(v) -> np.ndarray:
    """Cross-product matrix: ``skew(v) @ t == np.cross(v, t)``."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def skew_batch(v: np.ndarray) -> np.ndarray:
    """Stacked cross-product matrices for an ``(..., 3)`` array."""
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (3, 3))
    out[..., 0, 1] = -v[..., 2]
    out[..., 0, 2] = v[..., 1]
    out[..., 1, 0] = v[..., 2]
    out[..., 1, 2] = -v[..., 0]
    out[..., 2, 0] = -v[..., 1]
    out[..., 2, 1] = v[..., 0]
    return out


def _trig_coeffs(phi: float) -> tuple[float, float, float]:
    """Return (sin φ/φ, (1-cos φ)/φ², (φ-sin φ)/φ³), stable near zero."""
    if phi < _SERIES_ANGLE:
        p2 = phi * phi
        a = 1.0 - p2 / 6.0 + p2 * p2 / 120.0 - p2**3 / 5040.0
        b = 0.5 - p2 / 24.0 + p2 * p2 / 720.0 - p2**3 / 40320.0
        c = 1.0 / 6.0 - p2 / 120.0 + p2 * p2 / 5040.0 - p2**3 / 362880.0
        return a, b, c
    s, co = np.sin(phi), np.cos(phi)
    return s / phi, (1.0 - co) / phi**2, (phi - s) / phi**3


def rot_from_rotvec(theta) -> np.ndarray:
    """Rodrigues formula ``exp([θ]×)``."""
    theta = np.asarray(theta, dtype=float)
    phi = float(np.linalg.norm(theta))
    K = skew(theta)
    if phi < SMALL_ANGLE:
        return np.eye(3) + K + 0.5 * K @ K
    a, b, _ = _trig_coeffs(phi)
    return np.eye(3) + a * K + b * K @ K


def left_jacobian(theta) -> np.ndarray:
    """Left Jacobian of SO(3): ``Exp(θ+δ) ≈ Exp(J_l(θ) δ) Exp(θ)``."""
    theta = np.asarray(theta, dtype=float)
    phi = float(np.linalg.norm(theta))
    K = skew(theta)
    if phi < SMALL_ANGLE:
        return np.eye(3) + 0.5 * K + K @ K / 6.0
    _, b, c = _trig_coeffs(phi)
    return np.eye(3) + b * K + c * K @ K


def left_jacobian_inv(theta) -> np.ndarray:
    return np.linalg.inv(left_jacobian(theta))


def quat_mul(p, q) -> np.ndarray:
    pw, pv = p[0], np.asarray(p[1:], dtype=float)
    qw, qv = q[0], np.asarray(q[1:], dtype=float)
    w = pw * qw - pv @ qv
    v = pw * qv + qw * pv + np.cross(pv, qv)
    return np.concatenate(([w], v))


def quat_conj(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return np.concatenate(([q[0]], -q[1:]))


def quat_normalize(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q)


def rot_from_quat(q) -> np.ndarray:
    """``R{q} = (w² - vᵀv) I + 2 v vᵀ + 2 w [v]×``."""
    w = q[0]
    v = np.asarray(q[1:], dtype=float)
    return (w * w - v @ v) * np.eye(3) + 2.0 * np.outer(v, v) + 2.0 * w * skew(v)


def quat_from_rot(R: np.ndarray) -> np.ndarray:
    """Unit quaternion of a rotation matrix (Shepperd's method)."""
    tr = np.trace(R)
    if tr > 0:
        s = 2.0 * np.sqrt(tr + 1.0)
        q = [0.25 * s, (R[2, 1] - R[1, 2]) / s, (R[0, 2] - R[2, 0]) / s, (R[1, 0] - R[0, 1]) / s]
    elif R[0, 0] > R[1, 1] and R[0, 0] > R[2, 2]:
        s = 2.0 * np.sqrt(1.0 + R[0, 0] - R[1, 1] - R[2, 2])
        q = [(R[2, 1] - R[1, 2]) / s, 0.25 * s, (R[0, 1] + R[1, 0]) / s, (R[0, 2] + R[2, 0]) / s]
    elif R[1, 1] > R[2, 2]:
        s = 2.0 * np.sqrt(1.0 + R[1, 1] - R[0, 0] - R[2, 2])
        q = [(R[0, 2] - R[2, 0]) / s, (R[0, 1] + R[1, 0]) / s, 0.25 * s, (R[1, 2] + R[2, 1]) / s]
    else:
        s = 2.0 * np.sqrt(1.0 + R[2, 2] - R[0, 0] - R[1, 1])
        q = [(R[1, 0] - R[0, 1]) / s, (R[0, 2] + R[2, 0]) / s, (R[1, 2] + R[2, 1]) / s, 0.25 * s]
    return quat_normalize(np.array(q))


def quat_exp(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    phi = float(np.linalg.norm(theta))
    if phi < SMALL_ANGLE:
        q = np.concatenate(([1.0 - phi * phi / 8.0], 0.5 * theta))
        return q / np.linalg.norm(q)
    return np.concatenate(([np.cos(phi / 2)], np.sin(phi / 2) / phi * theta))


def quat_log(q) -> np.ndarray:
    """Rotation vector of a unit quaternion; the sign is canonicalized to w >= 0."""
    q = np.asarray(q, dtype=float)
    if q[0] < 0:
        q = -q
    v = q[1:]
    s = float(np.linalg.norm(v))
    if s < SMALL_ANGLE:
        return 2.0 * v / q[0]
    phi = 2.0 * np.arctan2(s, q[0])
    return phi / s * v


def canonical_rotvec(theta) -> np.ndarray:
    """Equivalent rotation vector with norm <= π."""
    return quat_log(quat_exp(theta))


# --- block operators -------------------------------------------------------


def mat_star(M) -> np.ndarray:
    """``[M]_*``: horizontal splice of the cross-product matrices of M's columns (3 x 3n)."""
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M[:, None]
    return np.hstack([skew(M[:, i]) for i in range(M.shape[1])])


def rowmajor_flatten(M) -> np.ndarray:
    """``[M]_⋆``: row-major vectorization."""
    return np.asarray(M, dtype=float).reshape(-1)


def diag_rep(X, n: int) -> np.ndarray:
    """Block-diagonal matrix with ``n`` copies of X (a vector is treated as a column)."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    return np.kron(np.eye(n), X)


def star_skew_matrix(v, M) -> np.ndarray:
    """``-[M]_* diag_n(v)`` which equals ``[v]× M``."""
    M = np.asarray(M, dtype=float)
    n = M.shape[1] if M.ndim == 2 else 1
    return -mat_star(M) @ diag_rep(v, n)


def star_skew_matrix_vector(v, M, t) -> np.ndarray:
    """``-[M]_* diag_3(v) t`` which equals ``[v]× M t``.

    ``diag_3(v) t`` stacks the blocks ``t_j v``, i.e. the row-major flattening of
    ``t vᵀ`` (the column-major flattening of ``v tᵀ``).
    """
    return -mat_star(M) @ rowmajor_flatten(np.outer(t, v))


def star_skew_sandwich(v, M, t) -> np.ndarray:
    """``[L]_* diag_3(v tᵀ) [L]_*ᵀ`` with ``M = L Lᵀ``; equals ``[v]× M [t]×ᵀ``.

    Raises ``np.linalg.LinAlgError`` when M is not SPD.
    """
    L = np.linalg.cholesky(np.asarray(M, dtype=float))
    Ls = mat_star(L)
    return Ls @ diag_rep(np.outer(v, t), 3) @ Ls.T
