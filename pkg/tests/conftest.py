import math

import numpy as np
import pytest

from rendopt import quaternion as quat
from rendopt.continuation import HomotopyParams
from rendopt.dynamics import ChaserState, OrbitModel, Thruster, VehicleModel
from rendopt.ptr import PTRConfig
from rendopt.scenario import ScenarioConfig


def make_toy_scenario(N_c: int = 5) -> ScenarioConfig:
    """Small translation-dominated docking problem for fast loop tests.

    Six COM-mounted thrusters (no torque authority, attitude stays
    identity), short horizon, loose tolerances sized well above the
    minimum-impulse-bit quantum.
    """
    dirs = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    thrusters = tuple(
        Thruster(
            r=np.zeros(3),
            f_hat=np.array(d, dtype=float),
            forward_facing=(d == (-1, 0, 0)),
        )
        for d in dirs
    )
    vehicle = VehicleModel(
        m=1000.0,
        J=np.diag([500.0, 600.0, 700.0]),
        thrusters=thrusters,
        F_rcs=100.0,
        dt_min=0.02,
        dt_max=1.0,
        dt_db=0.002,
    )
    x0 = ChaserState(
        p=np.array([20.0, 2.0, -2.0]),
        v=np.zeros(3),
        q=quat.IDENTITY.copy(),
        w=np.zeros(3),
    )
    return ScenarioConfig(
        vehicle=vehicle,
        orbit=OrbitModel(n_o=1.13e-3),
        x0=x0,
        q_l=quat.IDENTITY.copy(),
        q_dp=quat.IDENTITY.copy(),
        p_dp=np.array([-3.0, 0.0, 0.0]),
        v_f=np.array([-0.05, 0.0, 0.0]),
        w_f=np.zeros(3),
        tol_pf=0.2,
        tol_vf=0.02,
        tol_qf=math.radians(1.0),
        tol_wf=math.radians(0.05),
        r_plume=5.0,
        r_appch=10.0,
        theta_appch=math.radians(15.0),
        t_f_bounds=(60.0, 200.0),
        N_c=N_c,
        w_eq=1.0,
        envelope_radius=10.0 * float(np.linalg.norm(x0.p)),
        appch_gate_scale=100.0,
        plume_gate_scale=25.0,
        mib_gate_scale=0.04,
    )


@pytest.fixture
def toy_scenario():
    return make_toy_scenario()


@pytest.fixture
def toy_homotopy():
    return HomotopyParams(n_updates=10)


@pytest.fixture
def toy_ptr_config():
    return PTRConfig(max_iters=60)
