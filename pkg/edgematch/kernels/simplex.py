import typing as t

import numpy as np

from edgematch.exceptions import ContractViolationError
from edgematch.kernels.model import LinearProgram, SolveReport, SolveStatus
from edgematch.log import get_logger

logger = get_logger(__name__)

PIVOT_TOL = 1e-9
PIVOT_RULES = ("dantzig", "bland")


class _RevisedSimplex:
    """Revised simplex on a dense explicit basis inverse with product-form updates."""

    def __init__(
            self,
            A: np.ndarray,
            b: np.ndarray,
            c: np.ndarray,
            basis: t.Sequence[int],
            tol: float,
            pivot_rule: str,
            refactor_every: int,
            degenerate_run: int,
    ):
        self.A, self.b, self.c = A, b, c
        self.basis = list(basis)
        self.tol = tol
        self.pivot_rule = pivot_rule
        self.refactor_every = refactor_every
        self.degenerate_run = degenerate_run
        self.pivots = 0
        self.refactor()

    def refactor(self):
        self.B_inv = np.linalg.inv(self.A[:, self.basis])
        self.x_B = self.B_inv @ self.b
        self._since_refactor = 0

    def duals(self) -> np.ndarray:
        return self.c[self.basis] @ self.B_inv

    def solution(self) -> np.ndarray:
        x = np.zeros(self.A.shape[1])
        x[self.basis] = np.maximum(self.x_B, 0.0)
        return x

    def pivot(self, r: int, q: int, u: np.ndarray):
        row = self.B_inv[r] / u[r]
        theta = max(self.x_B[r], 0.0) / u[r]
        self.B_inv -= np.outer(u, row)
        self.B_inv[r] = row
        self.x_B -= theta * u
        self.x_B[r] = theta
        self.basis[r] = q
        self.pivots += 1
        self._since_refactor += 1
        if self._since_refactor >= self.refactor_every:
            self.refactor()

    def run(self, max_pivots: int) -> str:
        degenerate = 0
        bland = self.pivot_rule == "bland"
        while self.pivots < max_pivots:
            reduced = self.c - self.duals() @ self.A
            reduced[self.basis] = 0.0
            candidates = np.flatnonzero(reduced < -self.tol)
            if not candidates.size:
                return "optimal"
            q = int(candidates[0] if bland else candidates[np.argmin(reduced[candidates])])

            u = self.B_inv @ self.A[:, q]
            eligible = np.flatnonzero(u > PIVOT_TOL)
            if not eligible.size:
                return "unbounded"
            ratios = np.maximum(self.x_B[eligible], 0.0) / u[eligible]
            theta = float(ratios.min())
            ties = eligible[ratios <= theta + 1e-12]
            if bland:
                r = int(ties[np.argmin(np.asarray(self.basis)[ties])])
            else:
                r = int(ties[np.argmax(u[ties])])
            self.pivot(r, q, u)

            degenerate = degenerate + 1 if theta <= self.tol else 0
            if self.pivot_rule == "dantzig":
                bland = degenerate >= self.degenerate_run
            logger.debug("pivot %d: enter %d leave row %d step %.3g", self.pivots, q, r, theta)
        return "max_iter"


def solve_lp(
        lp: LinearProgram,
        tol: float = 1e-8,
        pivot_rule: str = "dantzig",
        refactor_every: int = 50,
        degenerate_run: int = 25,
        max_pivots: int = 200000,
) -> SolveReport:
    """Two-phase simplex for minimize c @ x s.t. A @ x = b, x >= 0."""
    if tol <= 0:
        raise ContractViolationError("tolerance must be positive", {"tol": tol})
    if pivot_rule not in PIVOT_RULES:
        raise ContractViolationError("unknown pivot rule", {"pivot_rule": pivot_rule, "known": PIVOT_RULES})

    A = np.asarray(lp.equality_matrix, dtype=float)
    b = np.asarray(lp.equality_rhs, dtype=float)
    c = np.asarray(lp.objective, dtype=float)
    m, n = A.shape
    options = dict(tol=tol, pivot_rule=pivot_rule, refactor_every=refactor_every, degenerate_run=degenerate_run)

    if m == 0:
        if (c < -tol).any():
            return SolveReport(status=SolveStatus.NUMERICAL_FAILURE, objective=-np.inf,
                               message="unbounded: no constraints and a negative cost")
        return _report(SolveStatus.OPTIMAL, lp, np.zeros(n), np.zeros(0), 0, "")

    flip = np.where(b < 0, -1.0, 1.0)
    A_flip, b_flip = A * flip[:, None], b * flip

    # phase 1: artificial basis
    phase1 = _RevisedSimplex(
        np.hstack([A_flip, np.eye(m)]), b_flip,
        np.concatenate([np.zeros(n), np.ones(m)]),
        basis=range(n, n + m), **options,
    )
    outcome = phase1.run(max_pivots)
    if outcome == "max_iter":
        return SolveReport(status=SolveStatus.MAX_ITER, objective=np.nan, primal=phase1.solution()[:n],
                           iterations=phase1.pivots, message="pivot limit reached in phase 1")
    infeasibility = float(phase1.solution()[n:].sum())
    if infeasibility > tol * (1.0 + float(np.abs(b).max())):
        logger.debug("phase 1 ends with infeasibility %.3g", infeasibility)
        return SolveReport(status=SolveStatus.INFEASIBLE, objective=np.nan, primal=phase1.solution()[:n],
                           residuals=(infeasibility, np.nan, np.nan), iterations=phase1.pivots,
                           message=f"equalities are inconsistent (phase 1 objective {infeasibility:.3g})")

    redundant = []
    for r in range(m):
        if phase1.basis[r] < n:
            continue
        row = phase1.B_inv[r] @ A_flip
        row[[j for j in phase1.basis if j < n]] = 0.0
        j = int(np.argmax(np.abs(row)))
        if abs(row[j]) > PIVOT_TOL:
            phase1.pivot(r, j, phase1.B_inv @ A_flip[:, j])
        else:
            redundant.append(phase1.basis[r] - n)
    if redundant:
        logger.debug("dropping %d redundant equality rows", len(redundant))
    keep = np.array([i for i in range(m) if i not in set(redundant)], dtype=int)
    basis = [j for j in phase1.basis if j < n]

    if not keep.size:
        x = np.zeros(n)
        return _report(SolveStatus.OPTIMAL, lp, x, np.zeros(m), phase1.pivots, "")

    phase2 = _RevisedSimplex(A_flip[keep], b_flip[keep], c, basis=basis, **options)
    phase2.pivots = phase1.pivots
    outcome = phase2.run(max_pivots)
    x = phase2.solution()
    y = np.zeros(m)
    y[keep] = phase2.duals() * flip[keep]
    if outcome == "unbounded":
        return SolveReport(status=SolveStatus.NUMERICAL_FAILURE, objective=-np.inf, primal=x,
                           iterations=phase2.pivots, message="unbounded objective")
    status = SolveStatus.OPTIMAL if outcome == "optimal" else SolveStatus.MAX_ITER
    return _report(status, lp, x, y, phase2.pivots, "" if outcome == "optimal" else "pivot limit reached")


def _report(status: SolveStatus, lp: LinearProgram, x: np.ndarray, y: np.ndarray, pivots: int,
            message: str) -> SolveReport:
    A, b, c = lp.equality_matrix, lp.equality_rhs, lp.objective
    objective = float(c @ x)
    dual_objective = float(b @ y) if len(b) else 0.0
    primal_residual = float(np.abs(A @ x - b).max(initial=0.0))
    dual_residual = float(max(0.0, -(c - A.T @ y).min(initial=0.0)))
    gap = abs(objective - dual_objective)
    logger.debug("simplex %s after %d pivots, objective %.10g", status.value, pivots, objective)
    return SolveReport(
        status=status,
        objective=objective,
        primal=x,
        dual=y,
        dual_objective=dual_objective,
        residuals=(primal_residual, dual_residual, gap),
        iterations=pivots,
        message=message,
    )
