import typing as t

import numpy as np
import scipy.linalg

from edgematch.exceptions import ContractViolationError
from edgematch.kernels.model import BlockKind, BlockSDP, SolveReport, SolveStatus
from edgematch.log import get_logger

logger = get_logger(__name__)

RANK_TOL = 1e-10


class _Operators:
    """Dense per-block constraint data with the A(X) and A*(y) maps."""

    def __init__(self, sdp: BlockSDP, rows: t.Sequence[int]):
        self.kinds = [block.kind for block in sdp.blocks]
        self.costs = [np.asarray(block.cost, dtype=float) for block in sdp.blocks]
        self.rhs = np.array([sdp.constraints[k].rhs for k in rows], dtype=float)
        self.coefficients = []
        for b, block in enumerate(sdp.blocks):
            shape = (len(rows),) + self.costs[b].shape
            dense = np.zeros(shape)
            for row, k in enumerate(rows):
                matrix = sdp.constraints[k].coefficients.get(b)
                if matrix is not None:
                    dense[row] = matrix
            self.coefficients.append(dense)

    @property
    def m(self) -> int:
        return len(self.rhs)

    def apply(self, X: t.Sequence[np.ndarray]) -> np.ndarray:
        total = np.zeros(self.m)
        for A_b, X_b in zip(self.coefficients, X):
            total += _flat(A_b) @ X_b.reshape(-1)
        return total

    def adjoint(self, y: np.ndarray) -> t.List[np.ndarray]:
        return [np.tensordot(y, A_b, axes=(0, 0)) for A_b in self.coefficients]


def independent_rows(sdp: BlockSDP) -> t.Tuple[t.List[int], bool]:
    """Indices of a maximal independent constraint subset and whether the rest is consistent."""
    m = sdp.n_constraints
    if m == 0:
        return [], True
    rows = []
    for k, constraint in enumerate(sdp.constraints):
        parts = []
        for b, block in enumerate(sdp.blocks):
            matrix = constraint.coefficients.get(b)
            size = block.dimension ** 2 if block.kind == BlockKind.SEMIDEFINITE else block.dimension
            parts.append(np.zeros(size) if matrix is None else np.asarray(matrix, dtype=float).reshape(-1))
        rows.append(np.concatenate(parts))
    matrix = np.vstack(rows)
    rhs = np.array([constraint.rhs for constraint in sdp.constraints])

    _, R, pivots = scipy.linalg.qr(matrix.T, mode="economic", pivoting=True)
    diagonal = np.abs(np.diag(R))
    if not diagonal.size or diagonal[0] == 0.0:
        return [], bool(np.abs(rhs).max() <= 1e-8)
    rank = int((diagonal > RANK_TOL * diagonal[0]).sum())
    keep = sorted(int(p) for p in pivots[:rank])
    dropped = sorted(int(p) for p in pivots[rank:])
    if not dropped:
        return keep, True
    combination = np.linalg.lstsq(matrix[keep].T, matrix[dropped].T, rcond=None)[0].T
    mismatch = np.abs(rhs[dropped] - combination @ rhs[keep])
    return keep, bool(mismatch.max() <= 1e-8 * (1.0 + np.abs(rhs).max()))


def _flat(A_b: np.ndarray) -> np.ndarray:
    return A_b.reshape(A_b.shape[0], int(np.prod(A_b.shape[1:])))


def _max_step(X: np.ndarray, dX: np.ndarray, kind: BlockKind) -> float:
    """Largest alpha keeping X + alpha dX in the cone."""
    if kind == BlockKind.NONNEGATIVE:
        shrinking = dX < 0
        return float((-X[shrinking] / dX[shrinking]).min()) if shrinking.any() else np.inf
    L = np.linalg.cholesky(X)
    L_inv = scipy.linalg.solve_triangular(L, np.eye(len(X)), lower=True)
    smallest = float(np.linalg.eigvalsh(L_inv @ dX @ L_inv.T).min())
    return np.inf if smallest >= 0 else -1.0 / smallest


def _nt_scaling(X: np.ndarray, S: np.ndarray) -> np.ndarray:
    """W with W S W = X."""
    L_x = np.linalg.cholesky(X)
    L_s = np.linalg.cholesky(S)
    _, sigma, Vt = np.linalg.svd(L_s.T @ L_x)
    G = L_x @ Vt.T / np.sqrt(sigma)
    return G @ G.T


def _symmetrize(M: np.ndarray) -> np.ndarray:
    return (M + M.T) / 2.0


def solve_block_sdp(
        sdp: BlockSDP,
        tol: float = 1e-6,
        max_iter: int = 200,
        step_fraction: float = 0.95,
) -> SolveReport:
    """Infeasible primal-dual interior point with Nesterov-Todd scaling and a Mehrotra-style centring."""
    if tol <= 0 or not 0 < step_fraction < 1:
        raise ContractViolationError("bad SDP options", {"tol": tol, "step_fraction": step_fraction})

    rows, consistent = independent_rows(sdp)
    if not consistent:
        return SolveReport(status=SolveStatus.INFEASIBLE, objective=np.nan,
                           message="linearly dependent constraints have inconsistent right-hand sides")
    ops = _Operators(sdp, rows)
    kinds, costs, b, m = ops.kinds, ops.costs, ops.rhs, ops.m
    n_total = sum(block.dimension for block in sdp.blocks)

    norm_b = float(np.linalg.norm(b))
    norm_c = float(np.sqrt(sum(np.sum(C ** 2) for C in costs)))
    norm_a = max([float(np.linalg.norm(_flat(A_b), axis=1).max(initial=0.0)) for A_b in ops.coefficients] + [0.0])
    xi = max(10.0, np.sqrt(n_total), n_total * float(((1.0 + np.abs(b)) / (1.0 + norm_a)).max(initial=0.0)))
    eta = max(10.0, np.sqrt(n_total), norm_a, norm_c)

    def identity(kind, cost, scale):
        return scale * (np.eye(len(cost)) if kind == BlockKind.SEMIDEFINITE else np.ones(len(cost)))

    X = [identity(k, C, xi) for k, C in zip(kinds, costs)]
    S = [identity(k, C, eta) for k, C in zip(kinds, costs)]
    y = np.zeros(m)

    best: t.Optional[t.Tuple[float, list, np.ndarray, t.Tuple[float, float, float], float, float]] = None
    status, message, iteration = SolveStatus.MAX_ITER, "iteration limit reached", 0

    for iteration in range(max_iter + 1):
        r_p = b - ops.apply(X)
        ATy = ops.adjoint(y)
        R_d = [C - S_b - a for C, S_b, a in zip(costs, S, ATy)]
        primal_obj = float(sum(np.sum(C * X_b) for C, X_b in zip(costs, X)))
        dual_obj = float(b @ y)
        complementarity = float(sum(np.sum(X_b * S_b) for X_b, S_b in zip(X, S)))
        mu = complementarity / n_total

        rel_p = float(np.linalg.norm(r_p)) / (1.0 + norm_b)
        rel_d = float(np.sqrt(sum(np.sum(R ** 2) for R in R_d))) / (1.0 + norm_c)
        rel_gap = max(abs(primal_obj - dual_obj), complementarity) / (1.0 + abs(primal_obj) + abs(dual_obj))
        residuals = (rel_p, rel_d, rel_gap)
        score = max(residuals)
        if best is None or score < best[0]:
            best = (score, [X_b.copy() for X_b in X], y.copy(), residuals, primal_obj, dual_obj)
        logger.debug("ipm %d: pobj %.8g dobj %.8g rel_p %.2e rel_d %.2e gap %.2e",
                     iteration, primal_obj, dual_obj, rel_p, rel_d, rel_gap)
        if score <= tol:
            status, message = SolveStatus.OPTIMAL, ""
            break
        if iteration == max_iter:
            break

        try:
            scalings = [
                _nt_scaling(X_b, S_b) if kind == BlockKind.SEMIDEFINITE else X_b / S_b
                for kind, X_b, S_b in zip(kinds, X, S)
            ]
            schur = np.zeros((m, m))
            for kind, A_b, W in zip(kinds, ops.coefficients, scalings):
                if kind == BlockKind.SEMIDEFINITE:
                    scaled = np.einsum("ij,kjl,lm->kim", W, A_b, W, optimize=True)
                    schur += _flat(A_b) @ _flat(scaled).T
                else:
                    schur += (A_b * W) @ A_b.T
            factor = scipy.linalg.cho_factor(schur) if m else None
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
            status, message = SolveStatus.NUMERICAL_FAILURE, f"factorization failed: {e}"
            break

        def direction(R):
            H = [
                R_b - W @ Rd_b @ W if kind == BlockKind.SEMIDEFINITE else R_b - W * Rd_b
                for kind, R_b, W, Rd_b in zip(kinds, R, scalings, R_d)
            ]
            dy = scipy.linalg.cho_solve(factor, r_p - ops.apply(H)) if m else np.zeros(0)
            ATdy = ops.adjoint(dy)
            dS = [Rd_b - a for Rd_b, a in zip(R_d, ATdy)]
            dX = [
                _symmetrize(R_b - W @ dS_b @ W) if kind == BlockKind.SEMIDEFINITE else R_b - W * dS_b
                for kind, R_b, W, dS_b in zip(kinds, R, scalings, dS)
            ]
            return dX, dy, [_symmetrize(d) if kind == BlockKind.SEMIDEFINITE else d for kind, d in zip(kinds, dS)]

        def steps(dX, dS):
            alpha_p = min(_max_step(X_b, d, kind) for kind, X_b, d in zip(kinds, X, dX))
            alpha_d = min(_max_step(S_b, d, kind) for kind, S_b, d in zip(kinds, S, dS))
            return min(1.0, step_fraction * alpha_p), min(1.0, step_fraction * alpha_d)

        try:
            dX, dy, dS = direction([-X_b for X_b in X])
            alpha_p, alpha_d = steps(dX, dS)
            mu_aff = sum(
                np.sum((X_b + alpha_p * dX_b) * (S_b + alpha_d * dS_b)) for X_b, dX_b, S_b, dS_b in zip(X, dX, S, dS)
            ) / n_total
            sigma = float(np.clip((mu_aff / mu) ** 3, 0.0, 1.0)) if mu > 0 else 0.0

            centring = [
                sigma * mu * np.linalg.inv(S_b) - X_b if kind == BlockKind.SEMIDEFINITE else sigma * mu / S_b - X_b
                for kind, X_b, S_b in zip(kinds, X, S)
            ]
            dX, dy, dS = direction(centring)
            alpha_p, alpha_d = steps(dX, dS)
        except np.linalg.LinAlgError as e:
            status, message = SolveStatus.NUMERICAL_FAILURE, f"step computation failed: {e}"
            break

        X = [X_b + alpha_p * d for X_b, d in zip(X, dX)]
        S = [S_b + alpha_d * d for S_b, d in zip(S, dS)]
        y = y + alpha_d * dy

    _, X_best, y_best, residuals, primal_obj, dual_obj = best
    if status != SolveStatus.OPTIMAL:
        logger.debug("ipm stopped: %s (%s)", status.value, message)
    dual = np.zeros(sdp.n_constraints)
    dual[rows] = y_best
    return SolveReport(
        status=status,
        objective=primal_obj,
        primal=X_best,
        dual=dual,
        dual_objective=dual_obj,
        residuals=residuals,
        iterations=iteration,
        message=message,
    )
