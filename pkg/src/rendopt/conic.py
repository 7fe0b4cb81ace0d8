"""Language-neutral cone-program data model.

A program is: minimize c'x subject to A_j x + b_j in K_j for each block,
with K_j one of the zero cone, the nonnegative orthant, or a second-order
cone.  Quadratic costs are expressed by the builder through SOC epigraphs,
so the objective stays linear.  Solving is delegated to exactly one bound
external solver through the adapter in clarabel_adapter.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp


class Cone(enum.Enum):
    ZERO = "zero"
    NONNEG = "nonneg"
    SOC = "soc"


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    NUMERICAL_ERROR = "numerical_error"


@dataclass
class ConeBlock:
    """One constraint block: A x + b in cone (cone dim = row count)."""

    A: sp.csr_matrix
    b: np.ndarray
    cone: Cone

    def __post_init__(self):
        self.A = sp.csr_matrix(self.A)
        self.b = np.asarray(self.b, dtype=float).ravel()

    @property
    def dim(self) -> int:
        return self.b.size


@dataclass
class ConicProgram:
    n: int
    c: np.ndarray
    blocks: list[ConeBlock] = field(default_factory=list)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()

    def total_rows(self) -> int:
        return sum(b.dim for b in self.blocks)


@dataclass
class SolverResult:
    status: Status
    x: np.ndarray
    objective: float
    solve_time: float
    duality_gap: float | None = None
    raw_status: str = ""
    primal_residual: float = float("nan")


def validate(p: ConicProgram) -> list[str]:
    """Return all invariant violations (empty list means valid)."""
    errors: list[str] = []
    if p.n < 0:
        errors.append("variable count must be nonnegative")
    if p.c.size != p.n:
        errors.append(f"cost vector length {p.c.size} != variable count {p.n}")
    if not np.all(np.isfinite(p.c)):
        errors.append("cost vector has non-finite entries")
    for j, blk in enumerate(p.blocks):
        if blk.A.shape != (blk.dim, p.n):
            errors.append(
                f"block {j}: matrix shape {blk.A.shape} != ({blk.dim}, {p.n})"
            )
        if blk.cone is Cone.SOC and blk.dim < 2:
            errors.append(f"block {j}: SOC dimension must be >= 2, got {blk.dim}")
        if blk.A.nnz and not np.all(np.isfinite(blk.A.data)):
            errors.append(f"block {j}: matrix has non-finite entries")
        if not np.all(np.isfinite(blk.b)):
            errors.append(f"block {j}: offset has non-finite entries")
    return errors


def solve(p: ConicProgram, **solver_options) -> SolverResult:
    """Solve through the bound adapter; validates first."""
    errors = validate(p)
    if errors:
        raise ValueError("invalid conic program: " + "; ".join(errors))
    from .clarabel_adapter import solve_clarabel

    return solve_clarabel(p, **solver_options)


def primal_residuals(p: ConicProgram, x: np.ndarray) -> float:
    """Worst-case primal constraint violation of x across all blocks."""
    worst = 0.0
    for blk in p.blocks:
        s = blk.A @ x + blk.b
        if blk.cone is Cone.ZERO:
            worst = max(worst, float(np.max(np.abs(s))) if s.size else 0.0)
        elif blk.cone is Cone.NONNEG:
            worst = max(worst, float(max(0.0, -np.min(s))) if s.size else 0.0)
        else:
            worst = max(worst, float(np.linalg.norm(s[1:]) - s[0]))
    return worst


# --- debug text serialization -------------------------------------------------
#
# Line-oriented format:
#   conicprogram v1
#   n <nvar>
#   c <n floats>
#   block <cone-tag> <rows> <nnz>
#   <nnz lines: row col value>
#   b <rows floats>
#
# Floats are written with 17 significant digits, which round-trips IEEE
# doubles exactly.


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def serialize(p: ConicProgram) -> str:
    out = io.StringIO()
    out.write("conicprogram v1\n")
    out.write(f"n {p.n}\n")
    out.write("c " + " ".join(_fmt(v) for v in p.c) + "\n")
    for blk in p.blocks:
        coo = blk.A.tocoo()
        out.write(f"block {blk.cone.value} {blk.dim} {coo.nnz}\n")
        for r, c_, v in zip(coo.row, coo.col, coo.data):
            out.write(f"{r} {c_} {_fmt(v)}\n")
        out.write("b " + " ".join(_fmt(v) for v in blk.b) + "\n")
    return out.getvalue()


def parse(text: str) -> ConicProgram:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != "conicprogram v1":
        raise ValueError("not a conicprogram v1 document")
    if not lines[1].startswith("n "):
        raise ValueError("missing variable count")
    n = int(lines[1].split()[1])
    c_parts = lines[2].split()
    if c_parts[0] != "c" or len(c_parts) - 1 != n:
        raise ValueError("malformed cost vector")
    c = np.array([float(v) for v in c_parts[1:]])
    blocks: list[ConeBlock] = []
    i = 3
    while i < len(lines):
        head = lines[i].split()
        if head[0] != "block" or len(head) != 4:
            raise ValueError(f"malformed block header at line {i + 1}")
        cone = Cone(head[1])
        rows, nnz = int(head[2]), int(head[3])
        data, rr, cc = [], [], []
        for k in range(nnz):
            r, c_, v = lines[i + 1 + k].split()
            rr.append(int(r))
            cc.append(int(c_))
            data.append(float(v))
        b_parts = lines[i + 1 + nnz].split()
        if b_parts[0] != "b" or len(b_parts) - 1 != rows:
            raise ValueError(f"malformed offset vector for block at line {i + 1}")
        b = np.array([float(v) for v in b_parts[1:]])
        A = sp.csr_matrix((data, (rr, cc)), shape=(rows, n))
        blocks.append(ConeBlock(A=A, b=b, cone=cone))
        i += 2 + nnz
    return ConicProgram(n=n, c=c, blocks=blocks)
