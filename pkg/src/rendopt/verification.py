"""Post-hoc verification of a converged run against the exact problem.

Deliberately independent of the smoothing machinery: the pulse schedule is
re-propagated through the nonlinear dynamics and checked against the
original discrete-logic constraints (MIB membership, plume implication at
nodes, approach-cone implication on dense samples) and the terminal
tolerances.  Tolerances account for the finite sharpness of the converged
smooth model and are recorded in the report.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import quaternion as quat
from .artifacts import (
    RunArtifacts,
    VERIFICATION_FILE,
    SCHEMA_VERSION,
)
from .dynamics import ChaserState, impulse_jump, propagate_coast_dense

MIB_TOL_S = 1e-3
CONE_TOL_RAD = math.radians(0.5)
SHELL_M = 0.5
NODE_POS_TOL_M = 0.1
NODE_VEL_TOL_MPS = 0.01
NODE_ATT_TOL_RAD = math.radians(0.5)
TERMINAL_PX_TOL_M = 1e-3
# converged solutions legitimately ride their relaxation boxes; the
# re-propagated state carries integrator/solver slop of this order
EDGE_PAD = 1e-6


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst_margin: float
    detail: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class VerificationReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "passed": self.passed,
            "tolerances": {
                "mib_s": MIB_TOL_S,
                "cone_rad": CONE_TOL_RAD,
                "shell_m": SHELL_M,
                "node_pos_m": NODE_POS_TOL_M,
                "node_vel_mps": NODE_VEL_TOL_MPS,
                "node_att_rad": NODE_ATT_TOL_RAD,
            },
            "checks": [c.to_dict() for c in self.checks],
        }


def verify_run(artifacts: RunArtifacts, samples_per_segment: int = 10) -> VerificationReport:
    sc = artifacts.cfg.scenario
    sol = artifacts.solution
    veh = sc.vehicle
    N = sol.n_segments
    t_c = sol.t_c
    report = VerificationReport()

    # re-propagate through the exact nonlinear dynamics
    node_states = np.empty((N + 1, 13))
    node_states[0] = sc.x0.as_vector()
    dense_states: list[np.ndarray] = [node_states[0]]
    state = ChaserState.from_vector(node_states[0])
    for k in range(N):
        state = impulse_jump(state, sol.schedule.dt[:, k], veh)
        seg = propagate_coast_dense(state, t_c, veh, sc.orbit, samples_per_segment)
        dense_states.extend(seg[1:])
        state = ChaserState.from_vector(seg[-1])
        node_states[k + 1] = seg[-1]
    dense_arr = np.array(dense_states)

    # dynamic feasibility: solution nodes against re-propagation
    dp = np.linalg.norm(node_states[:, 0:3] - sol.states[:, 0:3], axis=1)
    dv = np.linalg.norm(node_states[:, 3:6] - sol.states[:, 3:6], axis=1)
    dq = np.array(
        [
            quat.angle_between(
                node_states[k, 6:10] / np.linalg.norm(node_states[k, 6:10]),
                sol.states[k, 6:10] / np.linalg.norm(sol.states[k, 6:10]),
            )
            for k in range(N + 1)
        ]
    )
    report.checks.append(
        CheckResult(
            "dynamic_feasibility_position",
            bool(np.max(dp) <= NODE_POS_TOL_M),
            float(NODE_POS_TOL_M - np.max(dp)),
            f"worst node {int(np.argmax(dp))}: {np.max(dp):.3e} m",
        )
    )
    report.checks.append(
        CheckResult(
            "dynamic_feasibility_velocity",
            bool(np.max(dv) <= NODE_VEL_TOL_MPS),
            float(NODE_VEL_TOL_MPS - np.max(dv)),
            f"worst node {int(np.argmax(dv))}: {np.max(dv):.3e} m/s",
        )
    )
    report.checks.append(
        CheckResult(
            "dynamic_feasibility_attitude",
            bool(np.max(dq) <= NODE_ATT_TOL_RAD),
            float(NODE_ATT_TOL_RAD - np.max(dq)),
            f"worst node {int(np.argmax(dq))}: {math.degrees(np.max(dq)):.3e} deg",
        )
    )

    # MIB membership: dt in {0} U [dt_min, dt_max] within tolerance
    dt = sol.schedule.dt
    off = dt <= MIB_TOL_S
    on = (dt >= veh.dt_min - MIB_TOL_S) & (dt <= veh.dt_max + MIB_TOL_S)
    ok = off | on
    viol = np.argwhere(~ok)
    worst = 0.0
    detail = ""
    if viol.size:
        i, k = viol[0]
        worst = float(
            min(dt[i, k] - MIB_TOL_S, veh.dt_min - MIB_TOL_S - dt[i, k])
        )
        detail = f"thruster {i} node {k}: pulse {dt[i, k]:.6f} s in deadband"
    else:
        interior = dt[~off]
        if interior.size:
            worst = float(np.min(np.minimum(
                interior - (veh.dt_min - MIB_TOL_S),
                veh.dt_max + MIB_TOL_S - interior,
            )))
    report.checks.append(
        CheckResult("mib_membership", not viol.size, worst, detail)
    )

    # plume implication at re-propagated node positions
    worst_plume = float("inf")
    plume_ok = True
    detail = ""
    for k in range(N):
        pnorm = float(np.linalg.norm(node_states[k, 0:3]))
        if pnorm <= sc.r_plume - SHELL_M:
            for i in veh.forward_indices:
                margin = MIB_TOL_S - dt[i, k]
                if margin < worst_plume:
                    worst_plume = margin
                if dt[i, k] > MIB_TOL_S:
                    plume_ok = False
                    detail = detail or (
                        f"thruster {i} node {k}: pulse {dt[i, k]:.6f} s at range {pnorm:.2f} m"
                    )
    if worst_plume == float("inf"):
        worst_plume = MIB_TOL_S
    report.checks.append(CheckResult("plume_implication", plume_ok, worst_plume, detail))

    # approach-cone implication on dense samples
    cos_lim = math.cos(sc.theta_appch + CONE_TOL_RAD)
    worst_cone = float("inf")
    cone_ok = True
    detail = ""
    for row in dense_arr:
        p = row[0:3]
        r = float(np.linalg.norm(p))
        if 1e-9 < r <= sc.r_appch - SHELL_M:
            margin = float(p[0] / r - cos_lim)
            if margin < worst_cone:
                worst_cone = margin
            if margin < 0.0 and cone_ok:
                cone_ok = False
                angle = math.degrees(math.acos(max(-1.0, min(1.0, p[0] / r))))
                detail = f"range {r:.2f} m at {angle:.2f} deg off axis"
    if worst_cone == float("inf"):
        worst_cone = 1.0
    report.checks.append(CheckResult("approach_cone", cone_ok, worst_cone, detail))

    # terminal boundary tolerances on the re-propagated terminal state
    x_f = sc.x_f
    err_p = node_states[N, 0:3] - x_f.p
    err_v = node_states[N, 3:6] - x_f.v
    err_w = node_states[N, 10:13] - x_f.w
    qN = node_states[N, 6:10] / np.linalg.norm(node_states[N, 6:10])
    att_err = quat.angle_between(qN, x_f.q)
    report.checks.append(
        CheckResult(
            "terminal_position",
            bool(
                np.max(np.abs(err_p)) <= sc.tol_pf + EDGE_PAD
                and abs(err_p[0]) <= TERMINAL_PX_TOL_M
            ),
            float(sc.tol_pf - np.max(np.abs(err_p))),
            f"|dp|={np.abs(err_p).max():.3e} m, dp_x={err_p[0]:.3e} m",
        )
    )
    report.checks.append(
        CheckResult(
            "terminal_velocity",
            bool(np.max(np.abs(err_v)) <= sc.tol_vf + EDGE_PAD),
            float(sc.tol_vf - np.max(np.abs(err_v))),
            f"|dv|={np.abs(err_v).max():.3e} m/s",
        )
    )
    report.checks.append(
        CheckResult(
            "terminal_attitude",
            bool(att_err <= sc.tol_qf + EDGE_PAD),
            float(sc.tol_qf - att_err),
            f"attitude error {math.degrees(att_err):.4f} deg",
        )
    )
    report.checks.append(
        CheckResult(
            "terminal_rate",
            bool(np.max(np.abs(err_w)) <= sc.tol_wf + EDGE_PAD),
            float(sc.tol_wf - np.max(np.abs(err_w))),
            f"|dw|={np.abs(err_w).max():.3e} rad/s",
        )
    )
    return report


def write_report(report: VerificationReport, run_dir: str | Path) -> Path:
    path = Path(run_dir) / VERIFICATION_FILE
    path.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return path
