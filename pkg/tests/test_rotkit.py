import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from skeleton_eot import rotkit

finite = st.floats(-5.0, 5.0, allow_nan=False, allow_infinity=False)
vec3 = st.tuples(finite, finite, finite).map(np.array)


def random_unit_quat(rng):
    q = rng.normal(size=4)
    return q / np.linalg.norm(q)


def random_rotvec(rng, max_angle=np.pi - 1e-3):
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    return axis * rng.uniform(0.0, max_angle)


def random_spd(rng, n=3):
    A = rng.normal(size=(n, n))
    return A @ A.T + 0.1 * np.eye(n)


# --- skew -----------------------------------------------------------------------


def test_skew_zero_and_layout():
    assert np.array_equal(rotkit.skew([0, 0, 0]), np.zeros((3, 3)))
    qx, qy, qz = 1.0, 2.0, 3.0
    expected = np.array([[0, -qz, qy], [qz, 0, -qx], [-qy, qx, 0]])
    assert np.array_equal(rotkit.skew([qx, qy, qz]), expected)


def test_skew_matches_componentwise_cross_product():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        v, t = rng.normal(size=3), rng.normal(size=3)
        cross = np.array(
            [v[1] * t[2] - v[2] * t[1], v[2] * t[0] - v[0] * t[2], v[0] * t[1] - v[1] * t[0]]
        )
        assert np.allclose(rotkit.skew(v) @ t, cross, atol=1e-12)


@given(vec3)
def test_skew_antisymmetric_and_third_power(v):
    K = rotkit.skew(v)
    assert np.array_equal(K, -K.T)
    assert np.allclose(K @ K @ K, -(v @ v) * K, atol=1e-10 * max(1.0, (v @ v) ** 1.5))


def test_skew_batch_matches_skew():
    v = np.random.default_rng(1).normal(size=(5, 3))
    assert np.array_equal(rotkit.skew_batch(v), np.stack([rotkit.skew(r) for r in v]))


# --- rotations -------------------------------------------------------------------


def test_rot_from_rotvec_identity_and_quarter_turn():
    assert np.allclose(rotkit.rot_from_rotvec(np.zeros(3)), np.eye(3))
    R = rotkit.rot_from_rotvec([0, 0, np.pi / 2])
    assert np.allclose(R @ [1, 0, 0], [0, 1, 0], atol=1e-15)


def test_rot_from_rotvec_matches_matrix_exponential():
    rng = np.random.default_rng(2)
    for _ in range(300):
        theta = random_rotvec(rng, max_angle=2 * np.pi - 1e-3)
        R = rotkit.rot_from_rotvec(theta)
        assert np.allclose(R, expm(rotkit.skew(theta)), atol=1e-10)
        assert np.allclose(R.T @ R, np.eye(3), atol=1e-10)
        assert np.isclose(np.linalg.det(R), 1.0)


@pytest.mark.parametrize("angle", [0.0, 1e-9, 1e-7, 1e-5, 1e-3, 0.049, 0.051, 1.0])
def test_small_angle_regimes_match_expm(angle):
    theta = angle * np.array([0.6, -0.8, 0.0])
    assert np.allclose(rotkit.rot_from_rotvec(theta), expm(rotkit.skew(theta)), atol=1e-14)


def test_quat_mul_identity_and_conjugate():
    rng = np.random.default_rng(3)
    q = random_unit_quat(rng)
    assert np.allclose(rotkit.quat_mul(rotkit.IDENTITY_QUAT, q), q)
    assert np.allclose(rotkit.quat_mul(q, rotkit.quat_conj(q)), rotkit.IDENTITY_QUAT, atol=1e-15)


def test_quat_mul_is_rotation_homomorphism():
    rng = np.random.default_rng(4)
    for _ in range(1000):
        p, q = random_unit_quat(rng), random_unit_quat(rng)
        lhs = rotkit.rot_from_quat(rotkit.quat_mul(p, q))
        rhs = rotkit.rot_from_quat(p) @ rotkit.rot_from_quat(q)
        assert np.allclose(lhs, rhs, atol=1e-10)


def test_conjugate_inverts_rotation():
    q = random_unit_quat(np.random.default_rng(5))
    assert np.allclose(rotkit.rot_from_quat(rotkit.quat_conj(q)) @ rotkit.rot_from_quat(q), np.eye(3))


def test_quat_exp_known_values():
    assert np.array_equal(rotkit.quat_exp(np.zeros(3)), [1, 0, 0, 0])
    assert np.allclose(rotkit.quat_exp([0, 0, np.pi]), [0, 0, 0, 1], atol=1e-15)


def test_quat_exp_log_roundtrip_and_consistency():
    rng = np.random.default_rng(6)
    for _ in range(1000):
        theta = random_rotvec(rng)
        q = rotkit.quat_exp(theta)
        assert np.allclose(rotkit.quat_log(q), theta, atol=1e-9)
        assert np.allclose(rotkit.rot_from_quat(q), rotkit.rot_from_rotvec(theta), atol=1e-10)


def test_quat_log_canonicalizes_sign():
    q = rotkit.quat_exp([0.3, -0.2, 0.1])
    assert np.allclose(rotkit.quat_log(-q), rotkit.quat_log(q))


def test_quat_from_rot_roundtrip():
    rng = np.random.default_rng(7)
    for _ in range(500):
        q = random_unit_quat(rng)
        q2 = rotkit.quat_from_rot(rotkit.rot_from_quat(q))
        assert np.allclose(q2 * np.sign(q2 @ q), q, atol=1e-10)


def test_canonical_rotvec_wraps_to_pi():
    theta = np.array([0.0, 0.0, 1.5 * np.pi])
    c = rotkit.canonical_rotvec(theta)
    assert np.linalg.norm(c) <= np.pi + 1e-12
    assert np.allclose(rotkit.rot_from_rotvec(c), rotkit.rot_from_rotvec(theta))


# --- left Jacobian ------------------------------------------------------------------


def test_left_jacobian_identity_at_zero():
    assert np.allclose(rotkit.left_jacobian(np.zeros(3)), np.eye(3))


def test_left_jacobian_matches_series():
    theta = np.array([0.0, 0.0, np.pi / 2])
    K = rotkit.skew(theta)
    series, term, fact = np.zeros((3, 3)), np.eye(3), 1.0
    for k in range(30):
        fact *= k + 1
        series += term / fact
        term = term @ K
    assert np.allclose(rotkit.left_jacobian(theta), series, atol=1e-10)


def test_left_jacobian_finite_difference():
    """Derivatives of R{θ} t under additive and left-composition perturbations."""
    rng = np.random.default_rng(8)
    h = 1e-6
    for _ in range(200):
        theta, t = random_rotvec(rng), rng.normal(size=3)
        R = rotkit.rot_from_rotvec(theta)
        # additive perturbation of θ: R{θ+δ} t ≈ R t − [R t]× J_l(θ) δ
        J = np.zeros((3, 3))
        for i in range(3):
            e = np.zeros(3)
            e[i] = h
            J[:, i] = (rotkit.rot_from_rotvec(theta + e) @ t - rotkit.rot_from_rotvec(theta - e) @ t) / (2 * h)
        analytic = -rotkit.skew(R @ t) @ rotkit.left_jacobian(theta)
        assert np.linalg.norm(J - analytic) <= 1e-4 * max(1.0, np.linalg.norm(analytic))
        # left-composition perturbation: R{Exp(δ)R} t ≈ R t − [R t]× δ
        Jc = np.zeros((3, 3))
        for i in range(3):
            e = np.zeros(3)
            e[i] = h
            Jc[:, i] = (rotkit.rot_from_rotvec(e) @ R @ t - rotkit.rot_from_rotvec(-e) @ R @ t) / (2 * h)
        assert np.allclose(Jc, -rotkit.skew(R @ t), atol=1e-6)


def test_left_jacobian_inverse():
    rng = np.random.default_rng(9)
    for _ in range(100):
        theta = random_rotvec(rng)
        assert np.allclose(rotkit.left_jacobian_inv(theta) @ rotkit.left_jacobian(theta), np.eye(3))


# --- star operators and identities ---------------------------------------------------------


def test_mat_star_blocks_are_antisymmetric():
    M = np.random.default_rng(10).normal(size=(3, 4))
    S = rotkit.mat_star(M)
    assert S.shape == (3, 12)
    for i in range(4):
        B = S[:, 3 * i : 3 * i + 3]
        assert np.array_equal(B, -B.T)


def test_rowmajor_flatten_order():
    M = np.arange(9.0).reshape(3, 3)
    assert np.array_equal(rotkit.rowmajor_flatten(M), np.arange(9.0))


def test_diag_rep_shape():
    D = rotkit.diag_rep(np.array([1.0, 2.0, 3.0]), 4)
    assert D.shape == (12, 4)
    assert np.array_equal(D[3:6, 1], [1, 2, 3])


def test_star_skew_matrix_trivial_case():
    e = np.array([1.0, 0.0, 0.0])
    assert np.allclose(rotkit.star_skew_matrix(e, np.eye(3)), rotkit.skew(e))


def test_star_identities_random():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        v, t = rng.normal(size=3), rng.normal(size=3)
        n = int(rng.integers(1, 5))
        Mn = rng.normal(size=(3, n))
        assert np.allclose(rotkit.skew(v) @ Mn, rotkit.star_skew_matrix(v, Mn), atol=1e-9)
        M = rng.normal(size=(3, 3))
        assert np.allclose(rotkit.skew(v) @ M @ t, rotkit.star_skew_matrix_vector(v, M, t), atol=1e-9)
        S = random_spd(rng)
        assert np.allclose(rotkit.skew(v) @ S @ rotkit.skew(t).T, rotkit.star_skew_sandwich(v, S, t), atol=1e-9)


def test_star_skew_matrix_vector_block_order():
    """The stacked vector is diag_3(v) t, i.e. blocks t_j v."""
    rng = np.random.default_rng(12)
    v, t = rng.normal(size=3), rng.normal(size=3)
    assert np.allclose(rotkit.diag_rep(v, 3) @ t, rotkit.rowmajor_flatten(np.outer(t, v)))
    assert np.allclose(rotkit.diag_rep(v, 3) @ t, np.outer(v, t).reshape(-1, order="F"))


def test_star_skew_sandwich_rejects_non_spd():
    with pytest.raises(np.linalg.LinAlgError):
        rotkit.star_skew_sandwich(np.ones(3), -np.eye(3), np.ones(3))


@settings(max_examples=200)
@given(vec3, vec3)
def test_star_skew_matrix_vector_property(v, t):
    M = np.diag([1.0, 2.0, 3.0]) + 0.5
    lhs = rotkit.skew(v) @ M @ t
    assert np.allclose(lhs, rotkit.star_skew_matrix_vector(v, M, t), atol=1e-9 * max(1.0, np.abs(lhs).max()))
