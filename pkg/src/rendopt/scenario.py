"""Rendezvous scenario: configuration, Apollo defaults, terminal pose,
initial guess, and TOML config file round-trip.

The shipped defaults reproduce the Apollo CSM transposition-and-docking
setup: 16 RCS thrusters in four quads, the CSM mass/inertia, and the
boundary conditions and algorithm parameters of the reference scenario.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quaternion as quat
from .dynamics import ChaserState, OrbitModel, Thruster, VehicleModel
from .trajectory import PulseSchedule, SolutionTrajectory

EARTH_MU = 3.986004418e14  # m^3/s^2
EARTH_RADIUS = 6378137.0  # m


class ConfigError(ValueError):
    """Invalid or incomplete scenario configuration."""


@dataclass(frozen=True)
class ScenarioConfig:
    """Full problem instance: vehicle, orbit, boundary data, gate scales."""

    vehicle: VehicleModel
    orbit: OrbitModel
    x0: ChaserState
    q_l: np.ndarray  # docked chaser-port attitude w.r.t. target port
    q_dp: np.ndarray  # chaser docking port rotation, body frame
    p_dp: np.ndarray  # chaser docking port position, body frame [m]
    v_f: np.ndarray
    w_f: np.ndarray
    tol_pf: float
    tol_vf: float
    tol_qf: float
    tol_wf: float
    r_plume: float
    r_appch: float
    theta_appch: float
    t_f_bounds: tuple[float, float]
    N_c: int
    w_eq: float
    envelope_radius: float
    appch_gate_scale: float
    plume_gate_scale: float
    mib_gate_scale: float

    def __post_init__(self):
        for name in ("q_l", "q_dp", "p_dp", "v_f", "w_f"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if not (0.0 < self.r_plume < self.r_appch):
            raise ConfigError("require 0 < r_plume < r_appch")
        if not (0.0 < self.theta_appch < math.pi / 2.0):
            raise ConfigError("approach half-angle must lie in (0, pi/2)")
        if not (0.0 < self.t_f_bounds[0] < self.t_f_bounds[1]):
            raise ConfigError("final-time bounds must satisfy 0 < lo < hi")
        if self.N_c < 2:
            raise ConfigError("need at least two control opportunities")
        for name in ("tol_pf", "tol_vf", "tol_qf", "tol_wf"):
            if getattr(self, name) <= 0.0:
                raise ConfigError(f"{name} must be positive")
        for name in ("appch_gate_scale", "plume_gate_scale", "mib_gate_scale",
                     "envelope_radius", "w_eq"):
            if getattr(self, name) <= 0.0:
                raise ConfigError(f"{name} must be positive")

    @property
    def x_f(self) -> ChaserState:
        """Terminal docked state, with q_f on the initial attitude's hemisphere."""
        q_f, p_f = terminal_pose(self.q_l, self.q_dp, self.p_dp)
        if float(q_f @ self.x0.q) < 0.0:
            q_f = -q_f
        return ChaserState(p_f, self.v_f.copy(), q_f, self.w_f.copy())


def terminal_pose(
    q_l: np.ndarray, q_dp: np.ndarray, p_dp: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Docked chaser attitude and COM position from port geometry.

    q_f = q_l ⊗ q_dp*, p_f = -(q_f ⊗ p_dp ⊗ q_f*); the target port sits at
    the LVLH origin pointing along +x.
    """
    q_f = quat.mul(np.asarray(q_l, float), quat.conj(np.asarray(q_dp, float)))
    p_f = -quat.rotate(q_f, np.asarray(p_dp, float))
    return q_f, p_f


def apollo_rcs_thrusters(ring_radius: float = 2.1, axial_offset: float = 0.3):
    """Four RCS quads of four thrusters each (2 axial, 2 tangential).

    The axial units whose nozzles point along +x_B (force -x_B) are the
    forward-facing, plume-critical ones.
    """
    thrusters = []
    ex = np.array([1.0, 0.0, 0.0])
    for phi_deg in (0.0, 90.0, 180.0, 270.0):
        phi = math.radians(phi_deg)
        u = np.array([0.0, math.cos(phi), math.sin(phi)])
        tang = np.array([0.0, -math.sin(phi), math.cos(phi)])
        center = ring_radius * u
        thrusters.append(
            Thruster(r=center - axial_offset * ex, f_hat=ex, forward_facing=False)
        )
        thrusters.append(
            Thruster(r=center + axial_offset * ex, f_hat=-ex, forward_facing=True)
        )
        thrusters.append(Thruster(r=center, f_hat=tang, forward_facing=False))
        thrusters.append(Thruster(r=center, f_hat=-tang, forward_facing=False))
    return tuple(thrusters)


def apollo_docking_port() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(q_l, q_dp, p_dp) calibrated to the reference terminal pose.

    q_l is a 180 deg yaw about +z_L; q_dp rolls the port 30 deg about -x_B;
    p_dp is chosen so the docked COM lands at (4.48, -0.05, 0.17) m.
    """
    q_l = np.array([0.0, 0.0, 1.0, 0.0])
    q_dp = quat.from_axis_angle(np.array([-1.0, 0.0, 0.0]), math.radians(30.0))
    p_f_target = np.array([4.48, -0.05, 0.17])
    q_f = quat.mul(q_l, quat.conj(q_dp))
    p_dp = -quat.rotate(quat.conj(q_f), p_f_target)
    return q_l, q_dp, p_dp


def leo_mean_motion(altitude_m: float = 400e3) -> float:
    a = EARTH_RADIUS + altitude_m
    return math.sqrt(EARTH_MU / a**3)


def default_apollo_scenario() -> ScenarioConfig:
    """The reference scenario with every shipped numerical parameter."""
    vehicle = VehicleModel(
        m=30323.0,
        J=np.array(
            [
                [49249.0, 2862.0, -370.0],
                [2862.0, 108514.0, -3075.0],
                [-370.0, -3075.0, 110772.0],
            ]
        ),
        thrusters=apollo_rcs_thrusters(),
        F_rcs=445.0,
        dt_min=0.112,
        dt_max=1.0,
        dt_db=0.0112,
    )
    orbit = OrbitModel(n_o=leo_mean_motion(400e3))
    x0 = ChaserState(
        p=np.array([100.0, 20.0, -20.0]),
        v=np.zeros(3),
        q=quat.IDENTITY.copy(),
        w=np.zeros(3),
    )
    q_l, q_dp, p_dp = apollo_docking_port()
    r_plume, r_appch = 20.0, 30.0
    envelope = 10.0 * float(np.linalg.norm(x0.p))
    return ScenarioConfig(
        vehicle=vehicle,
        orbit=orbit,
        x0=x0,
        q_l=q_l,
        q_dp=q_dp,
        p_dp=p_dp,
        v_f=np.array([-0.1, 0.0, 0.0]),
        w_f=np.zeros(3),
        tol_pf=0.1,
        tol_vf=0.01,
        tol_qf=math.radians(1.0),
        tol_wf=math.radians(0.01),
        r_plume=r_plume,
        r_appch=r_appch,
        theta_appch=math.radians(10.0),
        t_f_bounds=(100.0, 1000.0),
        N_c=50,
        w_eq=1.0,
        envelope_radius=envelope,
        appch_gate_scale=r_appch**2,
        plume_gate_scale=r_plume**2,
        mib_gate_scale=2.0 * vehicle.dt_min,
    )


def initial_guess(cfg: ScenarioConfig) -> SolutionTrajectory:
    """Straight-line position, slerp attitude, zero pulses, midpoint t_f."""
    N = cfg.N_c
    t_f = 0.5 * (cfg.t_f_bounds[0] + cfg.t_f_bounds[1])
    x_f = cfg.x_f
    tau = np.linspace(0.0, 1.0, N + 1)
    pos = np.outer(1.0 - tau, cfg.x0.p) + np.outer(tau, x_f.p)
    vel = np.tile((x_f.p - cfg.x0.p) / t_f, (N + 1, 1))
    quats = quat.slerp(cfg.x0.q, x_f.q, tau)
    rel = quat.mul(quat.conj(cfg.x0.q), x_f.q if cfg.x0.q @ x_f.q >= 0.0 else -x_f.q)
    angle = 2.0 * math.acos(min(1.0, abs(rel[3])))
    if angle > 1e-12:
        axis = rel[:3] / np.linalg.norm(rel[:3])
        w_const = axis * angle / t_f
    else:
        w_const = np.zeros(3)
    rates = np.tile(w_const, (N + 1, 1))
    states = np.hstack([pos, vel, quats, rates])
    sched = PulseSchedule(
        dt=np.zeros((cfg.vehicle.n_rcs, N)), dt_ref=np.zeros((cfg.vehicle.n_rcs, N))
    )
    return SolutionTrajectory(states=states, schedule=sched, t_f=t_f)
