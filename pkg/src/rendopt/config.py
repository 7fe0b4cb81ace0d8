"""TOML scenario/algorithm configuration: strict load, deterministic dump.

Every key is required and unknown keys are rejected, so a config file is a
complete, self-describing record of a run.  Floats are written with 17
significant digits and round-trip exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .continuation import HomotopyParams
from .dynamics import ChaserState, OrbitModel, Thruster, VehicleModel
from .ptr import PTRConfig
from .scenario import ConfigError, ScenarioConfig, default_apollo_scenario

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    scenario: ScenarioConfig
    homotopy: HomotopyParams
    ptr: PTRConfig


def default_run_config() -> RunConfig:
    return RunConfig(
        scenario=default_apollo_scenario(),
        homotopy=HomotopyParams(),
        ptr=PTRConfig(),
    )


class _Table:
    """Wraps a TOML table, tracking key consumption for strict validation."""

    def __init__(self, data: dict, path: str = ""):
        if not isinstance(data, dict):
            raise ConfigError(f"expected a table at '{path or '<root>'}'")
        self.data = data
        self.path = path
        self.seen: set[str] = set()

    def _key(self, name: str) -> str:
        return f"{self.path}.{name}" if self.path else name

    def get(self, name: str):
        if name not in self.data:
            raise ConfigError(f"missing required key '{self._key(name)}'")
        self.seen.add(name)
        return self.data[name]

    def table(self, name: str) -> "_Table":
        return _Table(self.get(name), self._key(name))

    def scalar(self, name: str, kind=float):
        v = self.get(name)
        if kind is float and isinstance(v, (int, float)) and not isinstance(v, bool):
            return float(v)
        if kind is int and isinstance(v, int) and not isinstance(v, bool):
            return v
        if kind is bool and isinstance(v, bool):
            return v
        raise ConfigError(f"key '{self._key(name)}' must be a {kind.__name__}")

    def vector(self, name: str, size: int) -> np.ndarray:
        v = self.get(name)
        if not isinstance(v, list) or len(v) != size:
            raise ConfigError(f"key '{self._key(name)}' must be a list of {size} numbers")
        try:
            return np.array([float(x) for x in v])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"key '{self._key(name)}' must be numeric") from exc

    def matrix(self, name: str, rows: int, cols: int) -> np.ndarray:
        v = self.get(name)
        if not isinstance(v, list) or len(v) != rows:
            raise ConfigError(f"key '{self._key(name)}' must be a {rows}x{cols} matrix")
        return np.array([[float(x) for x in row] for row in v]).reshape(rows, cols)

    def finish(self, extra_ok: tuple[str, ...] = ()):
        unknown = set(self.data) - self.seen - set(extra_ok)
        if unknown:
            name = sorted(unknown)[0]
            raise ConfigError(f"unknown key '{self._key(name)}'")


def load_config(path: str | Path) -> RunConfig:
    try:
        raw = tomllib.loads(Path(path).read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}") from exc
    return parse_config(raw)


def parse_config(raw: dict) -> RunConfig:
    root = _Table(raw)
    version = root.scalar("schema_version", int)
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported schema_version {version} (expected {SCHEMA_VERSION})"
        )

    orbit_t = root.table("orbit")
    orbit = OrbitModel(n_o=orbit_t.scalar("mean_motion_rad_s"))
    orbit_t.finish()

    veh_t = root.table("vehicle")
    thr_list = veh_t.get("thrusters")
    if not isinstance(thr_list, list) or not thr_list:
        raise ConfigError("key 'vehicle.thrusters' must be a non-empty array of tables")
    thrusters = []
    for i, entry in enumerate(thr_list):
        tt = _Table(entry, f"vehicle.thrusters[{i}]")
        thrusters.append(
            Thruster(
                r=tt.vector("position_m", 3),
                f_hat=tt.vector("direction", 3),
                forward_facing=tt.scalar("forward_facing", bool),
            )
        )
        tt.finish()
    vehicle = VehicleModel(
        m=veh_t.scalar("mass_kg"),
        J=veh_t.matrix("inertia_kg_m2", 3, 3),
        thrusters=tuple(thrusters),
        F_rcs=veh_t.scalar("thrust_n"),
        dt_min=veh_t.scalar("pulse_min_s"),
        dt_max=veh_t.scalar("pulse_max_s"),
        dt_db=veh_t.scalar("pulse_buffer_s"),
    )
    veh_t.finish()

    bnd = root.table("boundary")
    x0 = ChaserState(
        p=bnd.vector("p0_m", 3),
        v=bnd.vector("v0_mps", 3),
        q=bnd.vector("q0", 4),
        w=bnd.vector("omega0_radps", 3),
    )
    q_l = bnd.vector("dock_quat", 4)
    q_dp = bnd.vector("port_quat", 4)
    p_dp = bnd.vector("port_position_m", 3)
    v_f = bnd.vector("vf_mps", 3)
    w_f = bnd.vector("omegaf_radps", 3)
    tol_pf = bnd.scalar("tol_position_m")
    tol_vf = bnd.scalar("tol_velocity_mps")
    tol_qf = bnd.scalar("tol_attitude_rad")
    tol_wf = bnd.scalar("tol_rate_radps")
    bnd.finish()

    con = root.table("constraints")
    r_plume = con.scalar("plume_radius_m")
    r_appch = con.scalar("approach_radius_m")
    theta = con.scalar("approach_half_angle_rad")
    envelope = con.scalar("envelope_radius_m")
    appch_scale = con.scalar("approach_gate_scale")
    plume_scale = con.scalar("plume_gate_scale")
    mib_scale = con.scalar("mib_gate_scale")
    con.finish()

    disc = root.table("discretization")
    N_c = disc.scalar("node_count", int)
    t_lo = disc.scalar("tf_min_s")
    t_hi = disc.scalar("tf_max_s")
    disc.finish()

    hom_t = root.table("homotopy")
    homotopy = HomotopyParams(
        epsilon=hom_t.scalar("precision"),
        delta0=hom_t.scalar("delta0"),
        delta1=hom_t.scalar("delta1"),
        n_updates=hom_t.scalar("update_count", int),
        beta_worse=hom_t.scalar("beta_worse"),
        beta_trig=hom_t.scalar("beta_trig"),
    )
    hom_t.finish()

    ptr_t = root.table("ptr")
    w_eq = ptr_t.scalar("w_eq")
    ptr = PTRConfig(
        w_tr=ptr_t.scalar("w_tr"),
        w_vc=ptr_t.scalar("w_vc"),
        eps_stop=ptr_t.scalar("eps_stop"),
        vc_tol=ptr_t.scalar("vc_tol"),
        max_iters=ptr_t.scalar("max_iters", int),
        embedded=ptr_t.scalar("embedded", bool),
    )
    ptr_t.finish()
    root.finish()

    scenario = ScenarioConfig(
        vehicle=vehicle,
        orbit=orbit,
        x0=x0,
        q_l=q_l,
        q_dp=q_dp,
        p_dp=p_dp,
        v_f=v_f,
        w_f=w_f,
        tol_pf=tol_pf,
        tol_vf=tol_vf,
        tol_qf=tol_qf,
        tol_wf=tol_wf,
        r_plume=r_plume,
        r_appch=r_appch,
        theta_appch=theta,
        t_f_bounds=(t_lo, t_hi),
        N_c=N_c,
        w_eq=w_eq,
        envelope_radius=envelope,
        appch_gate_scale=appch_scale,
        plume_gate_scale=plume_scale,
        mib_gate_scale=mib_scale,
    )
    return RunConfig(scenario=scenario, homotopy=homotopy, ptr=ptr)


# --- dumping -------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        s = format(float(v), ".17g")
        if "." not in s and "e" not in s and "n" not in s and "i" not in s:
            s += ".0"
        return s
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    raise TypeError(f"cannot format {type(v)} as TOML")


def dump_config(cfg: RunConfig) -> str:
    sc, hom, ptr = cfg.scenario, cfg.homotopy, cfg.ptr
    veh = sc.vehicle
    lines = [f"schema_version = {SCHEMA_VERSION}", ""]
    lines += ["[orbit]", f"mean_motion_rad_s = {_fmt(sc.orbit.n_o)}", ""]
    lines += [
        "[vehicle]",
        f"mass_kg = {_fmt(veh.m)}",
        f"inertia_kg_m2 = {_fmt([list(row) for row in veh.J])}",
        f"thrust_n = {_fmt(veh.F_rcs)}",
        f"pulse_min_s = {_fmt(veh.dt_min)}",
        f"pulse_max_s = {_fmt(veh.dt_max)}",
        f"pulse_buffer_s = {_fmt(veh.dt_db)}",
        "",
    ]
    lines += [
        "[boundary]",
        f"p0_m = {_fmt(sc.x0.p)}",
        f"v0_mps = {_fmt(sc.x0.v)}",
        f"q0 = {_fmt(sc.x0.q)}",
        f"omega0_radps = {_fmt(sc.x0.w)}",
        f"dock_quat = {_fmt(sc.q_l)}",
        f"port_quat = {_fmt(sc.q_dp)}",
        f"port_position_m = {_fmt(sc.p_dp)}",
        f"vf_mps = {_fmt(sc.v_f)}",
        f"omegaf_radps = {_fmt(sc.w_f)}",
        f"tol_position_m = {_fmt(sc.tol_pf)}",
        f"tol_velocity_mps = {_fmt(sc.tol_vf)}",
        f"tol_attitude_rad = {_fmt(sc.tol_qf)}",
        f"tol_rate_radps = {_fmt(sc.tol_wf)}",
        "",
    ]
    lines += [
        "[constraints]",
        f"plume_radius_m = {_fmt(sc.r_plume)}",
        f"approach_radius_m = {_fmt(sc.r_appch)}",
        f"approach_half_angle_rad = {_fmt(sc.theta_appch)}",
        f"envelope_radius_m = {_fmt(sc.envelope_radius)}",
        f"approach_gate_scale = {_fmt(sc.appch_gate_scale)}",
        f"plume_gate_scale = {_fmt(sc.plume_gate_scale)}",
        f"mib_gate_scale = {_fmt(sc.mib_gate_scale)}",
        "",
    ]
    lines += [
        "[discretization]",
        f"node_count = {_fmt(sc.N_c)}",
        f"tf_min_s = {_fmt(sc.t_f_bounds[0])}",
        f"tf_max_s = {_fmt(sc.t_f_bounds[1])}",
        "",
    ]
    lines += [
        "[homotopy]",
        f"precision = {_fmt(hom.epsilon)}",
        f"delta0 = {_fmt(hom.delta0)}",
        f"delta1 = {_fmt(hom.delta1)}",
        f"update_count = {_fmt(hom.n_updates)}",
        f"beta_worse = {_fmt(hom.beta_worse)}",
        f"beta_trig = {_fmt(hom.beta_trig)}",
        "",
    ]
    lines += [
        "[ptr]",
        f"w_eq = {_fmt(sc.w_eq)}",
        f"w_tr = {_fmt(ptr.w_tr)}",
        f"w_vc = {_fmt(ptr.w_vc)}",
        f"eps_stop = {_fmt(ptr.eps_stop)}",
        f"vc_tol = {_fmt(ptr.vc_tol)}",
        f"max_iters = {_fmt(ptr.max_iters)}",
        f"embedded = {_fmt(ptr.embedded)}",
        "",
    ]
    for phi, thr in enumerate(veh.thrusters):
        lines += [
            "[[vehicle.thrusters]]",
            f"position_m = {_fmt(thr.r)}",
            f"direction = {_fmt(thr.f_hat)}",
            f"forward_facing = {_fmt(thr.forward_facing)}",
            "",
        ]
    return "\n".join(lines)


def save_config(cfg: RunConfig, path: str | Path) -> None:
    Path(path).write_text(dump_config(cfg))
