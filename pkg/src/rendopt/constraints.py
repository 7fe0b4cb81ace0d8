"""Scenario cost terms and the three smoothed discrete-logic constraints.

Each constraint wraps a single-predicate OR-gate whose sharpness beta comes
from the continuation schedule:

  - approach cone: triggered by p'p - r_appch^2 > 0 (outside the sphere),
    blending the cone constraint with the always-true Cauchy-Schwarz bound;
  - plume impingement: forward-facing pulses bounded by gate * dt_max;
  - minimum impulse bit: the smooth deadband curve dt = gate(dt') * dt'
    plus the wall-avoidance gradient bound that forbids outputs on the
    quasi-vertical segment of the deadband.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import VehicleModel
from .scenario import ScenarioConfig
from .smoothing import SmoothOrGate, or_gate, or_gate_curvature


def fuel_cost(dt: np.ndarray, dt_max: float) -> float:
    """Pulse-duration sum normalized by the maximum pulse width."""
    return float(np.sum(dt) / dt_max)


def eq_regularization(
    dt: np.ndarray, dt_ref: np.ndarray, w_eq: float, dt_min: float
) -> float:
    """One-norm penalty tying obtained pulses to their references."""
    return float(w_eq / dt_min * np.sum(np.abs(dt - dt_ref)))


def approach_gate(cfg: ScenarioConfig, beta: float) -> SmoothOrGate:
    anchor = cfg.envelope_radius**2 - cfg.r_appch**2
    return SmoothOrGate(g_max=cfg.appch_gate_scale, g_c=np.array([anchor]), beta=beta)


def plume_gate(cfg: ScenarioConfig, beta: float) -> SmoothOrGate:
    anchor = cfg.envelope_radius**2 - cfg.r_plume**2
    return SmoothOrGate(g_max=cfg.plume_gate_scale, g_c=np.array([anchor]), beta=beta)


def mib_gate(vehicle: VehicleModel, beta: float, gate_scale: float | None = None) -> SmoothOrGate:
    if gate_scale is None:
        gate_scale = 2.0 * vehicle.dt_min
    anchor = vehicle.dt_max - vehicle.dt_min
    return SmoothOrGate(g_max=gate_scale, g_c=np.array([anchor]), beta=beta)


def approach_cone_constraint(
    p: np.ndarray, beta: float, cfg: ScenarioConfig
) -> tuple[float, np.ndarray]:
    """Smoothed approach-cone residual (<= 0 feasible) and its p-gradient."""
    p = np.asarray(p, dtype=float)
    r = float(np.linalg.norm(p))
    if r < 1e-6:
        raise ValueError("approach-cone direction is singular at the origin")
    gate = approach_gate(cfg, beta)
    ev = or_gate(np.array([p @ p - cfg.r_appch**2]), gate)
    ct = np.cos(cfg.theta_appch)
    residual = ct - (1.0 + ct) * ev.value - p[0] / r
    ex = np.array([1.0, 0.0, 0.0])
    d_dir = ex / r - p[0] * p / r**3
    grad = -(1.0 + ct) * ev.grad[0] * 2.0 * p - d_dir
    return float(residual), grad


def plume_bound(
    p_node: np.ndarray, beta: float, cfg: ScenarioConfig
) -> tuple[float, np.ndarray]:
    """Gate-scaled pulse upper bound for forward thrusters at a node.

    Returns (bound, gradient of bound w.r.t. the node position); the
    constraint is dt_ik <= bound.
    """
    p_node = np.asarray(p_node, dtype=float)
    gate = plume_gate(cfg, beta)
    ev = or_gate(np.array([p_node @ p_node - cfg.r_plume**2]), gate)
    bound = ev.value * cfg.vehicle.dt_max
    grad = ev.grad[0] * 2.0 * p_node * cfg.vehicle.dt_max
    return float(bound), grad


def plume_constraint(
    p_node: np.ndarray, dt_ik: float, beta: float, cfg: ScenarioConfig
) -> float:
    """Residual dt_ik - gate * dt_max, <= 0 feasible."""
    bound, _ = plume_bound(p_node, beta, cfg)
    return float(dt_ik - bound)


@dataclass(frozen=True)
class DeadbandCurve:
    """Smooth deadband curve (SDC) for one sharpness value.

    Maps a reference pulse duration to the obtained one and carries the
    analytic slope/curvature needed for the wall-avoidance constraint.
    """

    vehicle: VehicleModel
    beta: float
    gate_scale: float

    @property
    def gate(self) -> SmoothOrGate:
        return mib_gate(self.vehicle, self.beta, self.gate_scale)

    def _predicate(self, dt_ref: float) -> float:
        return dt_ref - self.vehicle.dt_min

    def gate_value_grad(self, dt_ref: float) -> tuple[float, float]:
        ev = or_gate(np.array([self._predicate(dt_ref)]), self.gate)
        return ev.value, float(ev.grad[0])

    def output(self, dt_ref: float) -> tuple[float, float]:
        """(obtained pulse, d obtained / d reference)."""
        r, dr = self.gate_value_grad(dt_ref)
        return r * dt_ref, dr * dt_ref + r

    def wall_function(self, dt_ref: float) -> tuple[float, float]:
        """SDC gradient W(dt') = R'(dt')dt' + R(dt') and its derivative."""
        r, dr = self.gate_value_grad(dt_ref)
        ddr = or_gate_curvature(self._predicate(dt_ref), self.gate)
        w = dr * dt_ref + r
        dw = ddr * dt_ref + 2.0 * dr
        return w, dw

    @property
    def wall_threshold(self) -> float:
        """W evaluated at dt_min + dt_db (the buffered pivot)."""
        w, _ = self.wall_function(self.vehicle.dt_min + self.vehicle.dt_db)
        return w

    def wall_exclusion(self) -> tuple[float, float] | None:
        """The reference-pulse interval carrying the deadband wall.

        Once the curve is sharp enough to have its quasi-vertical wall (an
        interior slope peak at the deadband pivot, i.e. the slope at dt_max
        has dropped back below the buffered threshold), the sublevel set of
        W <= W(dt_min + dt_db) is the pulse box minus one interval
        (d_lo, dt_min + dt_db), which is returned.  While the slope is
        still monotone over the box there is no wall to avoid and None is
        returned: the literal slope bound would then cap every pulse at
        dt_min + dt_db, an artifact of evaluating the bound far from the
        sharp regime it was derived for.
        """
        veh = self.vehicle
        g_db = self.wall_threshold
        buffer_pt = veh.dt_min + veh.dt_db
        w_peak, _ = self.wall_function(veh.dt_min)
        w_end, _ = self.wall_function(veh.dt_max)
        if w_end > g_db or w_peak <= g_db + 1e-12:
            return None
        lo, hi = 0.0, veh.dt_min
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if self.wall_function(mid)[0] > g_db:
                hi = mid
            else:
                lo = mid
        return (0.5 * (lo + hi), buffer_pt)


def mib_sdc(
    dt_ref_ik: float, beta: float, vehicle: VehicleModel, gate_scale: float | None = None
) -> tuple[float, float]:
    """Smooth deadband output pulse and slope at a reference pulse."""
    if gate_scale is None:
        gate_scale = 2.0 * vehicle.dt_min
    return DeadbandCurve(vehicle, beta, gate_scale).output(dt_ref_ik)


def wall_avoidance(
    dt_ref_ik: float, beta: float, vehicle: VehicleModel, gate_scale: float | None = None
) -> float:
    """Wall-avoidance residual W(dt') - W(dt_min + dt_db), <= 0 feasible."""
    if gate_scale is None:
        gate_scale = 2.0 * vehicle.dt_min
    curve = DeadbandCurve(vehicle, beta, gate_scale)
    w, _ = curve.wall_function(dt_ref_ik)
    return float(w - curve.wall_threshold)


@dataclass(frozen=True)
class BoundaryChecks:
    """Exact boundary-condition residuals for a terminal state + relaxation."""

    dp_inf: float
    dp_x: float
    dv_inf: float
    dw_inf: float
    att_dot: float

    def satisfied(self, cfg: ScenarioConfig, tol: float = 1e-9) -> bool:
        return (
            self.dp_inf <= cfg.tol_pf + tol
            and abs(self.dp_x) <= tol
            and self.dv_inf <= cfg.tol_vf + tol
            and self.dw_inf <= cfg.tol_wf + tol
            and self.att_dot >= np.cos(cfg.tol_qf / 2.0) - tol
        )


def boundary_constraints(
    x_N: np.ndarray, relax_vec: np.ndarray, cfg: ScenarioConfig
) -> BoundaryChecks:
    """Evaluate the terminal boundary conditions at the final node."""
    x_N = np.asarray(x_N, dtype=float)
    x_f = cfg.x_f.as_vector()
    resid = x_N + np.asarray(relax_vec, dtype=float) - x_f
    if np.max(np.abs(resid)) > 1e-6:
        raise ValueError("relaxation vector does not close the terminal equality")
    dp, dv, dw = relax_vec[0:3], relax_vec[3:6], relax_vec[10:13]
    q_N = x_N[6:10]
    q_f = cfg.x_f.q
    dot = float(q_N @ q_f) / float(np.linalg.norm(q_N))
    return BoundaryChecks(
        dp_inf=float(np.max(np.abs(dp))),
        dp_x=float(dp[0]),
        dv_inf=float(np.max(np.abs(dv))),
        dw_inf=float(np.max(np.abs(dw))),
        att_dot=dot,
    )
