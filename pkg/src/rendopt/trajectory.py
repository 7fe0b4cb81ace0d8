"""Shared solution data model: pulse schedules, terminal relaxation,
iterate records, and the discrete-node trajectory."""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np


@dataclass
class PulseSchedule:
    """Obtained (dt) and reference (dt_ref) pulse durations, n_rcs x N_c."""

    dt: np.ndarray
    dt_ref: np.ndarray

    def __post_init__(self):
        self.dt = np.asarray(self.dt, dtype=float)
        self.dt_ref = np.asarray(self.dt_ref, dtype=float)
        if self.dt.shape != self.dt_ref.shape or self.dt.ndim != 2:
            raise ValueError("dt and dt_ref must be equal-shape 2-D arrays")

    @property
    def n_rcs(self) -> int:
        return self.dt.shape[0]

    @property
    def n_nodes(self) -> int:
        return self.dt.shape[1]


@dataclass
class TerminalRelaxation:
    """Terminal boundary-condition relaxation, blocked as the state."""

    dp: np.ndarray
    dv: np.ndarray
    dq: np.ndarray
    dw: np.ndarray

    def __post_init__(self):
        self.dp = np.asarray(self.dp, dtype=float)
        self.dv = np.asarray(self.dv, dtype=float)
        self.dq = np.asarray(self.dq, dtype=float)
        self.dw = np.asarray(self.dw, dtype=float)

    @staticmethod
    def zeros() -> "TerminalRelaxation":
        return TerminalRelaxation(np.zeros(3), np.zeros(3), np.zeros(4), np.zeros(3))

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.dp, self.dv, self.dq, self.dw])

    @staticmethod
    def from_vector(x: np.ndarray) -> "TerminalRelaxation":
        x = np.asarray(x, dtype=float)
        return TerminalRelaxation(x[0:3], x[3:6], x[6:10], x[10:13])


@dataclass
class IterateRecord:
    """Per-iteration log entry of the solve loop."""

    iteration: int
    homotopy_updates: int
    beta: float
    cost: float
    fuel_cost: float
    eq_cost: float
    tr_penalty: float
    vc_norm: float
    buffer_norm: float
    max_step: float
    solver_status: str
    solve_time: float
    wall_time: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SolutionTrajectory:
    """Discrete-node trajectory iterate with its pulse schedule."""

    states: np.ndarray  # (N_c + 1) x 13
    schedule: PulseSchedule
    t_f: float
    relax: TerminalRelaxation = field(default_factory=TerminalRelaxation.zeros)
    iterate_log: list[IterateRecord] = field(default_factory=list)
    converged: bool = False
    beta_final: float | None = None

    def __post_init__(self):
        self.states = np.asarray(self.states, dtype=float)
        if self.states.ndim != 2 or self.states.shape[1] != 13:
            raise ValueError("states must be (N_c+1) x 13")
        if self.states.shape[0] != self.schedule.n_nodes + 1:
            raise ValueError("state count must be one more than pulse columns")

    @property
    def n_segments(self) -> int:
        return self.schedule.n_nodes

    @property
    def t_c(self) -> float:
        return self.t_f / self.n_segments

    def node_times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_f, self.n_segments + 1)

    def copy(self) -> "SolutionTrajectory":
        return SolutionTrajectory(
            states=self.states.copy(),
            schedule=PulseSchedule(self.schedule.dt.copy(), self.schedule.dt_ref.copy()),
            t_f=self.t_f,
            relax=TerminalRelaxation.from_vector(self.relax.as_vector()),
            iterate_log=list(self.iterate_log),
            converged=self.converged,
            beta_final=self.beta_final,
        )
