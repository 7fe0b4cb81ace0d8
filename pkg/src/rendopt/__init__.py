"""Impulsive 6-DOF rendezvous trajectory optimization with smoothed
discrete logic, solved by penalized-trust-region SCP with embedded
numerical continuation."""

from .continuation import HomotopyParams
from .dynamics import ChaserState, OrbitModel, Thruster, VehicleModel
from .ptr import NonConvergence, PTRConfig, solve
from .scenario import ScenarioConfig, default_apollo_scenario, initial_guess
from .trajectory import PulseSchedule, SolutionTrajectory, TerminalRelaxation

__all__ = [
    "ChaserState",
    "HomotopyParams",
    "NonConvergence",
    "OrbitModel",
    "PTRConfig",
    "PulseSchedule",
    "ScenarioConfig",
    "SolutionTrajectory",
    "TerminalRelaxation",
    "Thruster",
    "VehicleModel",
    "default_apollo_scenario",
    "initial_guess",
    "solve",
]
