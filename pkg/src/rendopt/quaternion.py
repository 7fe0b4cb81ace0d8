"""Hamilton quaternion algebra, scalar-last storage.

Quaternions are plain ``numpy`` arrays ``[x, y, z, w]`` with the scalar part
LAST, so the identity rotation is ``[0, 0, 0, 1]``.  A quaternion ``q`` maps
body-frame vectors into the LVLH frame via ``q ⊗ v ⊗ q*``.
"""

from __future__ import annotations

import numpy as np

IDENTITY = np.array([0.0, 0.0, 0.0, 1.0])


def mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product a ⊗ b (scalar-last)."""
    av, aw = a[:3], a[3]
    bv, bw = b[:3], b[3]
    v = aw * bv + bw * av + np.cross(av, bv)
    w = aw * bw - av @ bv
    return np.array([v[0], v[1], v[2], w])


def conj(q: np.ndarray) -> np.ndarray:
    """Quaternion conjugate q*."""
    return np.array([-q[0], -q[1], -q[2], q[3]])


def normalize(q: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(q)
    if n == 0.0 or not np.isfinite(n):
        raise ValueError("cannot normalize zero or non-finite quaternion")
    return q / n


def rotate(q: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Rotate vector u by q (body -> LVLH for an attitude quaternion).

    Exactly the vector part of q ⊗ [u; 0] ⊗ q*, kept in its homogeneous
    (degree-2 in q) form so rotate_jacobian_q is its true Jacobian for
    any q, unit or not.
    """
    qv, qw = q[:3], q[3]
    return (qw * qw - qv @ qv) * u + 2.0 * (qv @ u) * qv + 2.0 * qw * np.cross(qv, u)


def to_matrix(q: np.ndarray) -> np.ndarray:
    """3x3 rotation matrix C with C @ u == rotate(q, u) for unit q."""
    x, y, z, w = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
            [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
            [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
        ]
    )


def from_axis_angle(axis: np.ndarray, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    half = 0.5 * angle
    return np.array([*(np.sin(half) * axis), np.cos(half)])


def angle_between(a: np.ndarray, b: np.ndarray) -> float:
    """Rotation angle (rad) taking attitude a to attitude b, in [0, pi]."""
    d = min(1.0, abs(float(a @ b)))
    return 2.0 * np.arccos(d)


def slerp(a: np.ndarray, b: np.ndarray, t: float | np.ndarray) -> np.ndarray:
    """Spherical linear interpolation between unit quaternions.

    ``t`` may be a scalar or a 1-D array; the result has shape (..., 4).
    ``b`` is sign-flipped onto a's hemisphere so the shortest arc is taken.
    """
    t = np.asarray(t, dtype=float)
    d = float(a @ b)
    if d < 0.0:
        b = -b
        d = -d
    d = min(d, 1.0)
    omega = np.arccos(d)
    if omega < 1e-10:
        out = np.outer(1.0 - t, a) + np.outer(t, b)
        out /= np.linalg.norm(out, axis=-1, keepdims=True)
        return out.reshape(np.shape(t) + (4,)) if np.ndim(t) else out[0]
    so = np.sin(omega)
    out = (
        np.outer(np.sin((1.0 - t) * omega) / so, a)
        + np.outer(np.sin(t * omega) / so, b)
    )
    return out.reshape(np.shape(t) + (4,)) if np.ndim(t) else out[0]


def left_mat(q: np.ndarray) -> np.ndarray:
    """4x4 matrix L with L(q) @ b == mul(q, b)."""
    qv, qw = q[:3], q[3]
    out = np.empty((4, 4))
    out[:3, :3] = qw * np.eye(3) + skew(qv)
    out[:3, 3] = qv
    out[3, :3] = -qv
    out[3, 3] = qw
    return out


def right_mat(q: np.ndarray) -> np.ndarray:
    """4x4 matrix R with R(q) @ a == mul(a, q)."""
    qv, qw = q[:3], q[3]
    out = np.empty((4, 4))
    out[:3, :3] = qw * np.eye(3) - skew(qv)
    out[:3, 3] = qv
    out[3, :3] = -qv
    out[3, 3] = qw
    return out


def rotate_jacobian_q(q: np.ndarray, u: np.ndarray) -> np.ndarray:
    """3x4 Jacobian of rotate(q, u) with respect to q (u held fixed)."""
    qv, qw = q[:3], q[3]
    du_dqv = 2.0 * (
        np.outer(qv, u)
        - np.outer(u, qv)
        + (qv @ u) * np.eye(3)
        - qw * skew(u)
    )
    du_dqw = 2.0 * (qw * u + np.cross(qv, u))
    return np.column_stack([du_dqv, du_dqw])


def skew(v: np.ndarray) -> np.ndarray:
    return np.array(
        [
            [0.0, -v[2], v[1]],
            [v[2], 0.0, -v[0]],
            [-v[1], v[0], 0.0],
        ]
    )
