"""Run artifact persistence: CSV trajectories/schedules, JSON logs/reports.

All files carry schema_version and are byte-reproducible for identical
inputs: floats are written with round-trip precision and JSON keys are
sorted.  Wall/solve time fields are the only run-to-run varying content.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import RunConfig, dump_config
from .dynamics import ChaserState, propagate_coast_dense, impulse_jump
from .trajectory import IterateRecord, PulseSchedule, SolutionTrajectory, TerminalRelaxation

SCHEMA_VERSION = 1

TRAJECTORY_FILE = "trajectory.csv"
SCHEDULE_FILE = "schedule.csv"
ITERATES_FILE = "iterates.json"
SCENARIO_FILE = "scenario.toml"
VERIFICATION_FILE = "verification.json"
SWEEP_FILE = "sweep.csv"

_STATE_COLS = [
    "px_m", "py_m", "pz_m", "vx_mps", "vy_mps", "vz_mps",
    "qx", "qy", "qz", "qw", "wx_radps", "wy_radps", "wz_radps",
]


class ArtifactError(RuntimeError):
    """Missing or malformed run artifact."""


def _f(x: float) -> str:
    return format(float(x), ".17g")


def dense_samples(
    solution: SolutionTrajectory, cfg: RunConfig, per_segment: int = 10
) -> np.ndarray:
    """Re-propagate the pulse schedule through the nonlinear dynamics.

    Returns rows [t, state...] at per_segment+1 points per segment starting
    from the exact initial state; jumps are applied at segment starts.
    """
    sc = cfg.scenario
    N = solution.n_segments
    t_c = solution.t_c
    rows = []
    state = ChaserState.from_vector(sc.x0.as_vector())
    for k in range(N):
        state = impulse_jump(state, solution.schedule.dt[:, k], sc.vehicle)
        seg = propagate_coast_dense(state, t_c, sc.vehicle, sc.orbit, per_segment)
        t0 = k * t_c
        for j in range(per_segment + 1):
            if k > 0 and j == 0:
                continue  # node already covered by previous segment end
            rows.append(np.concatenate([[t0 + j * t_c / per_segment], seg[j]]))
        state = ChaserState.from_vector(seg[-1])
    return np.array(rows)


def write_run(
    out_dir: str | Path,
    cfg: RunConfig,
    solution: SolutionTrajectory,
    dense: np.ndarray,
) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    (out / SCENARIO_FILE).write_text(dump_config(cfg))

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["schema_version", SCHEMA_VERSION])
    w.writerow(["sample_kind", "node_index", "t_s"] + _STATE_COLS)
    times = solution.node_times()
    for k in range(solution.n_segments + 1):
        w.writerow(
            ["node", k, _f(times[k])] + [_f(v) for v in solution.states[k]]
        )
    for row in dense:
        w.writerow(["dense", "", _f(row[0])] + [_f(v) for v in row[1:]])
    (out / TRAJECTORY_FILE).write_text(buf.getvalue())

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["schema_version", SCHEMA_VERSION])
    w.writerow(["thruster", "node", "t_s", "pulse_s", "pulse_ref_s", "forward_facing"])
    fwd = set(cfg.scenario.vehicle.forward_indices)
    for k in range(solution.n_segments):
        for i in range(cfg.scenario.vehicle.n_rcs):
            w.writerow(
                [
                    i,
                    k,
                    _f(times[k]),
                    _f(solution.schedule.dt[i, k]),
                    _f(solution.schedule.dt_ref[i, k]),
                    int(i in fwd),
                ]
            )
    (out / SCHEDULE_FILE).write_text(buf.getvalue())

    payload = {
        "schema_version": SCHEMA_VERSION,
        "t_f_s": solution.t_f,
        "converged": solution.converged,
        "beta_final": solution.beta_final,
        "relax": list(solution.relax.as_vector()),
        "fuel_proxy_impulse_Ns": float(
            cfg.scenario.vehicle.F_rcs * np.sum(solution.schedule.dt)
        ),
        "iterates": [rec.to_dict() for rec in solution.iterate_log],
    }
    (out / ITERATES_FILE).write_text(json.dumps(payload, indent=2, sort_keys=True))


@dataclass
class RunArtifacts:
    cfg: RunConfig
    solution: SolutionTrajectory
    dense: np.ndarray  # rows [t, 13-state]
    iterates_payload: dict


def read_run(run_dir: str | Path) -> RunArtifacts:
    from .config import load_config

    run = Path(run_dir)
    for name in (TRAJECTORY_FILE, SCHEDULE_FILE, ITERATES_FILE, SCENARIO_FILE):
        if not (run / name).exists():
            raise ArtifactError(f"missing artifact '{name}' in {run}")
    cfg = load_config(run / SCENARIO_FILE)

    with open(run / TRAJECTORY_FILE, newline="") as fh:
        rows = list(csv.reader(fh))
    _check_schema(rows[0], TRAJECTORY_FILE)
    nodes, dense = [], []
    for row in rows[2:]:
        if row[0] == "node":
            nodes.append([float(v) for v in row[3:]])
        else:
            dense.append([float(v) for v in row[2:]])
    states = np.array(nodes)

    with open(run / SCHEDULE_FILE, newline="") as fh:
        rows = list(csv.reader(fh))
    _check_schema(rows[0], SCHEDULE_FILE)
    n_rcs = cfg.scenario.vehicle.n_rcs
    N = states.shape[0] - 1
    dt = np.zeros((n_rcs, N))
    dt_ref = np.zeros((n_rcs, N))
    for row in rows[2:]:
        i, k = int(row[0]), int(row[1])
        dt[i, k] = float(row[3])
        dt_ref[i, k] = float(row[4])

    payload = json.loads((run / ITERATES_FILE).read_text())
    if payload.get("schema_version") != SCHEMA_VERSION:
        raise ArtifactError(f"schema_version mismatch in {ITERATES_FILE}")

    solution = SolutionTrajectory(
        states=states,
        schedule=PulseSchedule(dt=dt, dt_ref=dt_ref),
        t_f=float(payload["t_f_s"]),
        relax=TerminalRelaxation.from_vector(np.array(payload["relax"])),
        iterate_log=[IterateRecord(**rec) for rec in payload["iterates"]],
        converged=bool(payload["converged"]),
        beta_final=payload["beta_final"],
    )
    return RunArtifacts(
        cfg=cfg, solution=solution, dense=np.array(dense), iterates_payload=payload
    )


def _check_schema(header_row: list[str], name: str) -> None:
    if (
        len(header_row) < 2
        or header_row[0] != "schema_version"
        or int(header_row[1]) != SCHEMA_VERSION
    ):
        raise ArtifactError(f"schema_version mismatch in {name}")


def write_sweep(out_dir: str | Path, rows: list[dict]) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["schema_version", SCHEMA_VERSION])
    w.writerow(["beta_trig", "iterations", "fuel_cost", "fuel_proxy_impulse_Ns", "converged"])
    for r in rows:
        w.writerow(
            [
                _f(r["beta_trig"]),
                r["iterations"],
                _f(r["fuel_cost"]),
                _f(r["fuel_proxy_impulse_Ns"]),
                int(r["converged"]),
            ]
        )
    (out / SWEEP_FILE).write_text(buf.getvalue())
