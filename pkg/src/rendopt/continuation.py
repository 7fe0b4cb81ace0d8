"""Numerical continuation schedule for the gate sharpness parameter.

The sigmoid is required to reach 1-epsilon at argument delta (the
interpolation condition); sweeping delta down a geometric progression from
delta0 to delta1 produces a strictly increasing sharpness schedule.  The
embedded scheme advances the schedule between individual solver iterations,
triggered by a relative-cost-decrease test.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ScheduleExhausted(RuntimeError):
    """Raised when an update is requested past the last schedule entry."""


@dataclass(frozen=True)
class HomotopyParams:
    """Continuation schedule definition and update-decision thresholds."""

    epsilon: float = 0.01
    delta0: float = 10.0
    delta1: float = 0.01
    n_updates: int = 10
    beta_worse: float = -1e-3
    beta_trig: float = 0.1

    def __post_init__(self):
        if not (0.0 < self.epsilon < 1.0):
            raise ValueError("epsilon must lie in (0, 1)")
        if not (0.0 < self.delta1 < self.delta0):
            raise ValueError("require 0 < delta1 < delta0")
        if self.n_updates < 2:
            raise ValueError("need at least two schedule updates")
        if not (self.beta_worse < 0.0 < self.beta_trig):
            raise ValueError("require beta_worse < 0 < beta_trig")

    @property
    def gamma(self) -> float:
        return self.delta1 / self.delta0


def delta_at(alpha: float, params: HomotopyParams) -> float:
    """Smoothness delta on the geometric sweep, alpha in [0, 1]."""
    if not (0.0 <= alpha <= 1.0):
        raise ValueError("alpha must lie in [0, 1]")
    return params.gamma**alpha * params.delta0


def homotopy_value(alpha: float, params: HomotopyParams) -> float:
    """Sharpness beta satisfying sigmoid(delta_alpha, beta) = 1 - epsilon."""
    return float(np.log(1.0 / params.epsilon - 1.0) / delta_at(alpha, params))


@dataclass
class ContinuationState:
    """Progress of the embedded continuation through a solve."""

    params: HomotopyParams
    updates_done: int = 0  # L in the schedule formulas
    iteration: int = 0
    beta: float | None = None
    cost_history: list[float] = field(default_factory=list)


def update_rule(state: ContinuationState) -> float:
    """Advance the schedule: return beta at L/(n_updates-1), increment L."""
    p = state.params
    if state.updates_done >= p.n_updates:
        raise ScheduleExhausted("homotopy schedule already at its sharpest value")
    beta = homotopy_value(state.updates_done / (p.n_updates - 1), p)
    state.updates_done += 1
    state.beta = beta
    return beta


def update_decision(state: ContinuationState) -> bool:
    """True when the last relative cost decrease lies in the trigger band.

    Requires two costs in the history; with fewer the decision is False
    (the driver forces the first update unconditionally).  A near-zero
    previous cost counts as zero decrease.
    """
    p = state.params
    if state.updates_done >= p.n_updates:
        return False
    hist = state.cost_history
    if len(hist) < 2:
        return False
    prev, cur = hist[-2], hist[-1]
    if abs(prev) < 1e-12:
        rel = 0.0
    else:
        rel = (prev - cur) / abs(prev)
    return p.beta_worse <= rel <= p.beta_trig
