"""Command-line front end.

Exit codes: 0 success (solve converged / verification passed), 1 config or
usage error, 2 solver non-convergence, 3 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import artifacts as art
from . import ptr
from .config import ConfigError, default_run_config, dump_config, load_config
from .continuation import HomotopyParams, homotopy_value
from .smoothing import csc_and, or_gate, rashs_and, sigmoid, softmax
from .verification import verify_run, write_report

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NO_CONVERGENCE = 2
EXIT_VERIFY_FAIL = 3


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except art.ArtifactError as exc:
        print(f"artifact error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rendopt",
        description="Impulsive rendezvous trajectory optimization with "
        "smoothed discrete logic.",
    )
    sub = parser.add_subparsers(required=True)

    p = sub.add_parser("solve", help="solve a scenario and write run artifacts")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("verify", help="check a run against the exact discrete logic")
    p.add_argument("--run", required=True, type=Path)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("sweep-trig", help="solve per homotopy-trigger value")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--values", required=True, help="comma-separated beta_trig values")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser(
        "compare-smoothing",
        help="tabulate logit/RASHS/CSC gate values over a predicate grid",
    )
    p.add_argument("--out", required=True, type=Path)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("init-config", help="write the default scenario config")
    p.add_argument("--out", required=True, type=Path)
    p.set_defaults(func=_cmd_init_config)
    return parser


def _solve_once(cfg, verbose: bool):
    ptr_cfg = cfg.ptr
    if verbose:
        import dataclasses

        ptr_cfg = dataclasses.replace(ptr_cfg, verbose=True)
    return ptr.solve(cfg.scenario, cfg.homotopy, ptr_cfg)


def _cmd_solve(args) -> int:
    cfg = load_config(args.config)
    try:
        solution = _solve_once(cfg, args.verbose)
    except ptr.NonConvergence as exc:
        print(f"solve did not converge: {exc}", file=sys.stderr)
        partial = _partial_solution(cfg, exc.iterate_log)
        if partial is not None:
            art.write_run(args.out, cfg, partial, np.empty((0, 14)))
        return EXIT_NO_CONVERGENCE
    dense = art.dense_samples(solution, cfg)
    art.write_run(args.out, cfg, solution, dense)
    rec = solution.iterate_log[-1]
    print(
        f"converged in {rec.iteration} iterations "
        f"(beta={rec.beta:.3f}, fuel cost {rec.fuel_cost:.4f}); "
        f"artifacts in {args.out}"
    )
    return EXIT_OK


def _partial_solution(cfg, log):
    """Best-effort artifact dump of a failed run (iterate log only)."""
    from .scenario import initial_guess

    if not log:
        return None
    guess = initial_guess(cfg.scenario)
    guess.iterate_log = log
    return guess


def _cmd_verify(args) -> int:
    run = art.read_run(args.run)
    report = verify_run(run)
    path = write_report(report, args.run)
    for check in report.checks:
        state = "PASS" if check.passed else "FAIL"
        print(f"{state} {check.name}: margin {check.worst_margin:.3e} {check.detail}")
    print(f"report written to {path}")
    return EXIT_OK if report.passed else EXIT_VERIFY_FAIL


def _cmd_sweep(args) -> int:
    import dataclasses

    cfg = load_config(args.config)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        print("sweep values must be numeric", file=sys.stderr)
        return EXIT_CONFIG
    if not values:
        print("no sweep values given", file=sys.stderr)
        return EXIT_CONFIG
    rows = []
    for trig in values:
        hom = dataclasses.replace(cfg.homotopy, beta_trig=trig)
        try:
            sol = ptr.solve(cfg.scenario, hom, cfg.ptr)
            rec = sol.iterate_log[-1]
            rows.append(
                {
                    "beta_trig": trig,
                    "iterations": rec.iteration,
                    "fuel_cost": rec.fuel_cost,
                    "fuel_proxy_impulse_Ns": float(
                        cfg.scenario.vehicle.F_rcs * np.sum(sol.schedule.dt)
                    ),
                    "converged": True,
                }
            )
            print(f"beta_trig={trig}: {rec.iteration} iterations, fuel {rec.fuel_cost:.4f}")
        except ptr.NonConvergence as exc:
            rows.append(
                {
                    "beta_trig": trig,
                    "iterations": len(exc.iterate_log),
                    "fuel_cost": float("nan"),
                    "fuel_proxy_impulse_Ns": float("nan"),
                    "converged": False,
                }
            )
            print(f"beta_trig={trig}: did not converge", file=sys.stderr)
    art.write_sweep(args.out, rows)
    print(f"sweep table written to {Path(args.out) / art.SWEEP_FILE}")
    return EXIT_OK if all(r["converged"] for r in rows) else EXIT_NO_CONVERGENCE


def _cmd_compare(args) -> int:
    """Gate-value comparison table over a normalized predicate grid."""
    import csv
    import io

    hom = HomotopyParams()
    grid = np.linspace(-1.0, 1.0, 201)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["schema_version", art.SCHEMA_VERSION])
    w.writerow(
        ["beta", "g_hat", "logit_shifted", "logit_unshifted", "rashs_or", "csc_or"]
    )
    from .smoothing import SmoothOrGate

    for L in range(hom.n_updates):
        beta = homotopy_value(L / (hom.n_updates - 1), hom)
        gate = SmoothOrGate(g_max=1.0, g_c=np.array([1.0]), beta=beta)
        for g in grid:
            shifted = or_gate(np.array([g]), gate).value
            unshifted = sigmoid(softmax(np.array([g]), beta), beta)
            w.writerow(
                [
                    format(beta, ".17g"),
                    format(g, ".17g"),
                    format(shifted, ".17g"),
                    format(unshifted, ".17g"),
                    format(1.0 - rashs_and(np.array([g]), beta), ".17g"),
                    format(1.0 - csc_and(np.array([g]), beta), ".17g"),
                ]
            )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "smoothing_comparison.csv"
    path.write_text(buf.getvalue())
    print(f"comparison table written to {path}")
    return EXIT_OK


def _cmd_init_config(args) -> int:
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(dump_config(default_run_config()))
    print(f"default config written to {args.out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
