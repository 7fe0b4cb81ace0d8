"""Clarabel binding for the cone-program model.

This is the only module that references a concrete solver.  Clarabel
expects A x + s = b with s in a cone product; a block "A x + b in K" maps
to Clarabel data (-A, b).  Solves are deterministic and reentrant (each
call builds an independent solver instance).
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

import clarabel

from .conic import Cone, ConicProgram, SolverResult, Status, primal_residuals

_RESIDUAL_TOL = 1e-7


def _cones(program: ConicProgram):
    out = []
    for blk in program.blocks:
        if blk.cone is Cone.ZERO:
            out.append(clarabel.ZeroConeT(blk.dim))
        elif blk.cone is Cone.NONNEG:
            out.append(clarabel.NonnegativeConeT(blk.dim))
        else:
            out.append(clarabel.SecondOrderConeT(blk.dim))
    return out


def solve_clarabel(
    program: ConicProgram,
    verbose: bool = False,
    max_iter: int = 200,
) -> SolverResult:
    n = program.n
    if program.blocks:
        A = sp.vstack([-blk.A for blk in program.blocks], format="csc")
        b = np.concatenate([blk.b for blk in program.blocks])
    else:
        A = sp.csc_matrix((0, n))
        b = np.zeros(0)
    P = sp.csc_matrix((n, n))
    settings = clarabel.DefaultSettings()
    settings.verbose = verbose
    settings.max_iter = max_iter
    # the adapter promises raw-unit primal residuals <= 1e-7; run the
    # interior point well past that so unequilibrated rows still comply.
    # The default static regularization (1e-8) caps attainable primal
    # accuracy near 1e-6 on penalty-heavy problems, hence the lower value.
    settings.tol_feas = 1e-10
    settings.tol_gap_abs = 1e-10
    settings.tol_gap_rel = 1e-10
    settings.static_regularization_constant = 1e-10
    solver = clarabel.DefaultSolver(P, program.c, A, b, _cones(program), settings)
    sol = solver.solve()

    status_name = str(sol.status)
    if sol.status in (
        clarabel.SolverStatus.Solved,
        clarabel.SolverStatus.AlmostSolved,
    ):
        x = np.asarray(sol.x, dtype=float)
        objective = float(program.c @ x)
        gap = None
        dual = getattr(sol, "obj_val_dual", None)
        if dual is not None:
            gap = abs(objective - float(dual)) / max(1.0, abs(objective))
        residual = primal_residuals(program, x)
        status = Status.OPTIMAL if residual <= _RESIDUAL_TOL else Status.NUMERICAL_ERROR
        return SolverResult(
            status=status,
            x=x,
            objective=objective,
            solve_time=float(sol.solve_time),
            duality_gap=gap,
            raw_status=status_name,
            primal_residual=residual,
        )
    if sol.status in (
        clarabel.SolverStatus.PrimalInfeasible,
        clarabel.SolverStatus.DualInfeasible,
        clarabel.SolverStatus.AlmostPrimalInfeasible,
        clarabel.SolverStatus.AlmostDualInfeasible,
    ):
        status = Status.INFEASIBLE
    else:
        status = Status.NUMERICAL_ERROR
    return SolverResult(
        status=status,
        x=np.full(n, np.nan),
        objective=float("nan"),
        solve_time=float(sol.solve_time),
        raw_status=status_name,
    )
