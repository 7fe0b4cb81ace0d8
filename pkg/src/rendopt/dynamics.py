"""Chaser 6-DOF coast dynamics, impulsive jump maps, and linearizations.

State ordering is fixed as ``x = [p; v; q; omega]`` (13 elements): position
and velocity in the LVLH frame, attitude quaternion (body->LVLH, scalar
last), angular rate in the body frame.  Translation follows the
Clohessy-Wiltshire-Hill equations about a circular target orbit; rotation is
rigid-body.  Thrust enters only through instantaneous jumps in ``v`` and
``omega`` at control opportunities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import quaternion as quat

# state vector block slices
P = slice(0, 3)
V = slice(3, 6)
Q = slice(6, 10)
W = slice(10, 13)

NX = 13


class PropagationDiverged(RuntimeError):
    """Raised when numerical integration produces non-finite state."""


@dataclass(frozen=True)
class OrbitModel:
    """Circular target orbit, parameterized by its mean motion [rad/s]."""

    n_o: float

    def __post_init__(self):
        if self.n_o < 0.0:
            raise ValueError("mean motion must be nonnegative")


@dataclass(frozen=True)
class Thruster:
    """One RCS thruster: application point and force direction, body frame."""

    r: np.ndarray
    f_hat: np.ndarray
    forward_facing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "r", np.asarray(self.r, dtype=float))
        object.__setattr__(self, "f_hat", np.asarray(self.f_hat, dtype=float))
        if abs(np.linalg.norm(self.f_hat) - 1.0) > 1e-12:
            raise ValueError("thrust direction must be a unit vector")


@dataclass(frozen=True)
class VehicleModel:
    """Rigid-body chaser with a pulse-width-modulated RCS thruster set."""

    m: float
    J: np.ndarray
    thrusters: tuple[Thruster, ...]
    F_rcs: float
    dt_min: float
    dt_max: float
    dt_db: float

    def __post_init__(self):
        J = np.asarray(self.J, dtype=float)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "thrusters", tuple(self.thrusters))
        if self.m <= 0.0:
            raise ValueError("mass must be positive")
        if J.shape != (3, 3) or np.max(np.abs(J - J.T)) > 1e-9 * np.max(np.abs(J)):
            raise ValueError("inertia must be symmetric 3x3")
        if np.min(np.linalg.eigvalsh(J)) <= 0.0:
            raise ValueError("inertia must be positive definite")
        if not (0.0 < self.dt_min < self.dt_max):
            raise ValueError("require 0 < dt_min < dt_max")
        if not (0.0 < self.dt_db < self.dt_max - self.dt_min):
            raise ValueError("require 0 < dt_db < dt_max - dt_min")

    @property
    def n_rcs(self) -> int:
        return len(self.thrusters)

    @property
    def J_inv(self) -> np.ndarray:
        return np.linalg.inv(self.J)

    @property
    def forward_indices(self) -> tuple[int, ...]:
        return tuple(i for i, t in enumerate(self.thrusters) if t.forward_facing)

    def force_directions(self) -> np.ndarray:
        """n_rcs x 3 array of body-frame force directions."""
        return np.array([t.f_hat for t in self.thrusters])

    def torque_arms(self) -> np.ndarray:
        """n_rcs x 3 array of r_i x f_hat_i (body frame)."""
        return np.array([np.cross(t.r, t.f_hat) for t in self.thrusters])


@dataclass
class ChaserState:
    """13-element chaser state [p; v; q; omega]."""

    p: np.ndarray
    v: np.ndarray
    q: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        self.q = np.asarray(self.q, dtype=float)
        self.w = np.asarray(self.w, dtype=float)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.p, self.v, self.q, self.w])

    @staticmethod
    def from_vector(x: np.ndarray) -> "ChaserState":
        x = np.asarray(x, dtype=float)
        return ChaserState(x[P].copy(), x[V].copy(), x[Q].copy(), x[W].copy())


def lvlh_accel(p: np.ndarray, v: np.ndarray, orbit: OrbitModel) -> np.ndarray:
    """CWH relative-motion acceleration at position p, velocity v."""
    n = orbit.n_o
    return np.array(
        [
            -2.0 * n * v[2],
            -n * n * p[1],
            3.0 * n * n * p[2] + 2.0 * n * v[0],
        ]
    )


def _coast_rhs(x: np.ndarray, vehicle: VehicleModel, orbit: OrbitModel) -> np.ndarray:
    """Coast (thrust-free) state derivative on the raw 13-vector."""
    out = np.empty(NX)
    out[P] = x[V]
    out[V] = lvlh_accel(x[P], x[V], orbit)
    q, w = x[Q], x[W]
    # 0.5 * q ⊗ [w; 0]
    out[Q] = 0.5 * np.array(
        [
            q[3] * w[0] + q[1] * w[2] - q[2] * w[1],
            q[3] * w[1] + q[2] * w[0] - q[0] * w[2],
            q[3] * w[2] + q[0] * w[1] - q[1] * w[0],
            -(q[0] * w[0] + q[1] * w[1] + q[2] * w[2]),
        ]
    )
    out[W] = vehicle.J_inv @ (-np.cross(w, vehicle.J @ w))
    return out


def coast_derivative(
    x: ChaserState, vehicle: VehicleModel, orbit: OrbitModel
) -> np.ndarray:
    """Time derivative of the 13-element state with all thrusters silent."""
    return _coast_rhs(x.as_vector(), vehicle, orbit)


def coast_jacobian(
    x: np.ndarray, vehicle: VehicleModel, orbit: OrbitModel
) -> np.ndarray:
    """Analytic 13x13 Jacobian of the coast derivative at state x."""
    n = orbit.n_o
    A = np.zeros((NX, NX))
    A[P, V] = np.eye(3)
    # d(lvlh_accel)/dp and /dv
    A[4, 1] = -n * n
    A[5, 2] = 3.0 * n * n
    A[3, 5] = -2.0 * n
    A[5, 3] = 2.0 * n
    q, w = x[Q], x[W]
    # d(qdot)/dq = 0.5 * right_mat([w; 0])
    wq = np.array([w[0], w[1], w[2], 0.0])
    A[Q, Q] = 0.5 * quat.right_mat(wq)
    # d(qdot)/dw = 0.5 * left_mat(q) restricted to vector rows
    A[6:10, 10:13] = 0.5 * quat.left_mat(q)[:, :3]
    # d(wdot)/dw
    J = vehicle.J
    A[W, W] = vehicle.J_inv @ (quat.skew(J @ w) - quat.skew(w) @ J)
    return A


def _renorm_q(x: np.ndarray) -> np.ndarray:
    x = x.copy()
    x[Q] = x[Q] / np.linalg.norm(x[Q])
    return x


def _rk4_steps(dt: float, max_step: float | None) -> int:
    if max_step is None:
        max_step = dt / 20.0
    if max_step <= 0.0:
        return 20
    return max(1, int(np.ceil(dt / max_step - 1e-12)))


def propagate_coast(
    x: ChaserState,
    dt: float,
    vehicle: VehicleModel,
    orbit: OrbitModel,
    max_step: float | None = None,
) -> ChaserState:
    """Propagate the coast dynamics for dt seconds with fixed-step RK4.

    The quaternion is renormalized after every step.  Raises
    PropagationDiverged on non-finite state.
    """
    if dt < 0.0:
        raise ValueError("dt must be nonnegative")
    if dt == 0.0:
        return ChaserState.from_vector(x.as_vector())
    y = x.as_vector()
    nsteps = _rk4_steps(dt, max_step)
    h = dt / nsteps
    # overflow here is the divergence signal, not an anomaly to warn about
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(nsteps):
            k1 = _coast_rhs(y, vehicle, orbit)
            k2 = _coast_rhs(y + 0.5 * h * k1, vehicle, orbit)
            k3 = _coast_rhs(y + 0.5 * h * k2, vehicle, orbit)
            k4 = _coast_rhs(y + h * k3, vehicle, orbit)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(y)):
                raise PropagationDiverged(
                    "coast propagation produced non-finite state"
                )
            y = _renorm_q(y)
    return ChaserState.from_vector(y)


def propagate_coast_dense(
    x: ChaserState,
    dt: float,
    vehicle: VehicleModel,
    orbit: OrbitModel,
    n_samples: int,
    max_step: float | None = None,
) -> np.ndarray:
    """States at n_samples+1 equally spaced times in [0, dt], rows of 13."""
    out = np.empty((n_samples + 1, NX))
    out[0] = x.as_vector()
    cur = x
    h = dt / n_samples if n_samples else 0.0
    for i in range(n_samples):
        cur = propagate_coast(cur, h, vehicle, orbit, max_step=max_step)
        out[i + 1] = cur.as_vector()
    return out


def impulse_jump(
    x: ChaserState, pulses: np.ndarray, vehicle: VehicleModel
) -> ChaserState:
    """Apply impulsive thruster firings: p, q unchanged; v, omega jump."""
    pulses = np.asarray(pulses, dtype=float)
    if pulses.shape != (vehicle.n_rcs,):
        raise ValueError("pulses must have one entry per thruster")
    dv_body = vehicle.F_rcs * (pulses @ vehicle.force_directions())
    dv = quat.rotate(x.q, dv_body) / vehicle.m
    dw = vehicle.J_inv @ (vehicle.F_rcs * (pulses @ vehicle.torque_arms()))
    return ChaserState(x.p.copy(), x.v + dv, x.q.copy(), x.w + dw)


def linearize_jump(
    x: ChaserState, pulses: np.ndarray, vehicle: VehicleModel
) -> tuple[np.ndarray, np.ndarray]:
    """Jacobians of impulse_jump: (d x+ / d x, d x+ / d pulses)."""
    pulses = np.asarray(pulses, dtype=float)
    n = vehicle.n_rcs
    A = np.eye(NX)
    B = np.zeros((NX, n))
    dv_body = vehicle.F_rcs * (pulses @ vehicle.force_directions())
    A[V, Q] = quat.rotate_jacobian_q(x.q, dv_body) / vehicle.m
    C = quat.to_matrix(x.q)
    B[V, :] = (vehicle.F_rcs / vehicle.m) * (C @ vehicle.force_directions().T)
    B[W, :] = vehicle.F_rcs * (vehicle.J_inv @ vehicle.torque_arms().T)
    return A, B


def linearize_coast_segment(
    x0: ChaserState,
    dt: float,
    vehicle: VehicleModel,
    orbit: OrbitModel,
    max_step: float | None = None,
) -> tuple[np.ndarray, np.ndarray, ChaserState]:
    """State-transition matrix and affine defect over a coast of dt seconds.

    Integrates the variational equation Phi' = (df/dx) Phi alongside the
    reference generated from x0, mirroring the per-step quaternion
    renormalization of propagate_coast so that Phi is the exact Jacobian of
    the implemented discrete map.  Returns (A, c, x_end) with
    x_end = A @ x0 + c holding exactly on the reference.
    """
    y = x0.as_vector()
    Phi = np.eye(NX)
    if dt < 0.0:
        raise ValueError("dt must be nonnegative")
    if dt > 0.0:
        nsteps = _rk4_steps(dt, max_step)
        h = dt / nsteps
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(nsteps):
                y, Phi = _rk4_step_with_stm(y, Phi, h, vehicle, orbit)
                if not np.all(np.isfinite(y)):
                    raise PropagationDiverged(
                        "STM propagation produced non-finite state"
                    )
    A = Phi
    c = y - A @ x0.as_vector()
    return A, c, ChaserState.from_vector(y)


def _rk4_step_with_stm(y, Phi, h, vehicle, orbit):
    def rhs(state, stm):
        return (
            _coast_rhs(state, vehicle, orbit),
            coast_jacobian(state, vehicle, orbit) @ stm,
        )

    k1, K1 = rhs(y, Phi)
    k2, K2 = rhs(y + 0.5 * h * k1, Phi + 0.5 * h * K1)
    k3, K3 = rhs(y + 0.5 * h * k2, Phi + 0.5 * h * K2)
    k4, K4 = rhs(y + h * k3, Phi + h * K3)
    y_new = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    Phi_new = Phi + (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4)
    # renormalize q and fold the projection Jacobian into the STM
    qn = y_new[Q]
    nrm = np.linalg.norm(qn)
    qh = qn / nrm
    y_new[Q] = qh
    proj = (np.eye(4) - np.outer(qh, qh)) / nrm
    Phi_new[Q, :] = proj @ Phi_new[Q, :]
    return y_new, Phi_new
