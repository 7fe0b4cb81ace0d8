import numpy as np
from hypothesis import given, strategies as st

from rendopt import quaternion as quat

YAW180 = np.array([0.0, 0.0, 1.0, 0.0])


def random_unit(rng):
    return quat.normalize(rng.normal(size=4))


class TestMul:
    def test_identity_left(self):
        b = quat.normalize(np.array([0.1, -0.4, 0.2, 0.8]))
        assert np.allclose(quat.mul(quat.IDENTITY, b), b, atol=1e-15)

    def test_inverse_property(self):
        rng = np.random.default_rng(1)
        for _ in range(5):
            a = random_unit(rng)
            assert np.allclose(quat.mul(a, quat.conj(a)), quat.IDENTITY, atol=1e-15)

    def test_yaw180_squared(self):
        # hand expansion of the Hamilton product: [0;0;1;0] x [0;0;1;0]
        out = quat.mul(YAW180, YAW180)
        assert np.allclose(out, [0.0, 0.0, 0.0, -1.0], atol=1e-15)

    def test_norm_multiplicative(self):
        rng = np.random.default_rng(2)
        a, b = rng.normal(size=4), rng.normal(size=4)
        prod = quat.mul(a, b)
        assert np.isclose(
            np.linalg.norm(prod), np.linalg.norm(a) * np.linalg.norm(b), atol=1e-12
        )


class TestRotate:
    def test_identity(self):
        u = np.array([1.0, 2.0, 3.0])
        assert np.allclose(quat.rotate(quat.IDENTITY, u), u, atol=1e-15)

    def test_yaw180(self):
        assert np.allclose(
            quat.rotate(YAW180, np.array([1.0, 0.0, 0.0])), [-1.0, 0.0, 0.0], atol=1e-15
        )

    def test_matches_rotation_matrix_oracle(self):
        # independent oracle: Rodrigues rotation matrix from axis-angle
        rng = np.random.default_rng(3)
        for _ in range(10):
            axis = rng.normal(size=3)
            axis /= np.linalg.norm(axis)
            angle = rng.uniform(-np.pi, np.pi)
            q = quat.from_axis_angle(axis, angle)
            K = quat.skew(axis)
            R = np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * (K @ K)
            u = rng.normal(size=3)
            assert np.allclose(quat.rotate(q, u), R @ u, atol=1e-12)

    @given(
        st.lists(st.floats(-1, 1), min_size=4, max_size=4),
        st.lists(st.floats(-10, 10), min_size=3, max_size=3),
    )
    def test_norm_preservation(self, qraw, uraw):
        q = np.array(qraw)
        if np.linalg.norm(q) < 1e-3:
            return
        q = q / np.linalg.norm(q)
        u = np.array(uraw)
        out = quat.rotate(q, u)
        assert abs(np.linalg.norm(out) - np.linalg.norm(u)) <= 1e-12 * max(
            1.0, np.linalg.norm(u)
        )

    def test_matrix_consistency(self):
        rng = np.random.default_rng(4)
        q = random_unit(rng)
        u = rng.normal(size=3)
        assert np.allclose(quat.to_matrix(q) @ u, quat.rotate(q, u), atol=1e-13)


class TestJacobians:
    def test_rotate_jacobian_vs_fd(self):
        rng = np.random.default_rng(5)
        q = random_unit(rng)
        u = rng.normal(size=3)
        J = quat.rotate_jacobian_q(q, u)
        eps = 1e-7
        for j in range(4):
            dq = np.zeros(4)
            dq[j] = eps
            fd = (quat.rotate(q + dq, u) - quat.rotate(q - dq, u)) / (2 * eps)
            assert np.allclose(J[:, j], fd, rtol=1e-6, atol=1e-8)

    def test_mul_matrices(self):
        rng = np.random.default_rng(6)
        a, b = rng.normal(size=4), rng.normal(size=4)
        assert np.allclose(quat.left_mat(a) @ b, quat.mul(a, b), atol=1e-13)
        assert np.allclose(quat.right_mat(b) @ a, quat.mul(a, b), atol=1e-13)


class TestSlerp:
    def test_endpoints_and_midpoint(self):
        rng = np.random.default_rng(7)
        a, b = random_unit(rng), random_unit(rng)
        path = quat.slerp(a, b, np.array([0.0, 0.5, 1.0]))
        assert np.allclose(path[0], a, atol=1e-12)
        b_hem = b if a @ b >= 0 else -b
        assert np.allclose(path[2], b_hem, atol=1e-12)
        assert np.isclose(np.linalg.norm(path[1]), 1.0, atol=1e-12)
        # midpoint is equidistant in angle
        assert np.isclose(
            quat.angle_between(path[1], a), quat.angle_between(path[1], b), atol=1e-9
        )

    def test_angle_between(self):
        q = quat.from_axis_angle(np.array([0.0, 1.0, 0.0]), 0.3)
        assert np.isclose(quat.angle_between(quat.IDENTITY, q), 0.3, atol=1e-12)
