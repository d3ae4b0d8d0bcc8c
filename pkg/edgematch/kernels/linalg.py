import typing as t

import numpy as np
from scipy.optimize import linear_sum_assignment

from edgematch.exceptions import ContractViolationError

CLUSTER_TOL = 1e-9
SIGN_TOL = 1e-8


def sym_eig(matrix: np.ndarray) -> t.Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in descending order with a deterministic eigenvector basis.

    Within a cluster of equal eigenvalues the basis is Gram-Schmidt over the projections of the
    unit vectors; every column has its first significant entry positive.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ContractViolationError("sym_eig needs a square matrix", {"shape": list(matrix.shape)})
    symmetric = (matrix + matrix.T) / 2.0
    values, vectors = np.linalg.eigh(symmetric)
    values, vectors = values[::-1].copy(), vectors[:, ::-1].copy()

    n = len(values)
    scale = max(1.0, float(np.abs(values).max(initial=0.0)))
    start = 0
    while start < n:
        end = start + 1
        while end < n and values[start] - values[end] <= CLUSTER_TOL * scale:
            end += 1
        if end - start > 1:
            vectors[:, start:end] = _canonical_basis(vectors[:, start:end])
        start = end

    for j in range(n):
        column = vectors[:, j]
        significant = np.flatnonzero(np.abs(column) > SIGN_TOL)
        if significant.size and column[significant[0]] < 0:
            vectors[:, j] = -column
    return values, vectors


def _canonical_basis(block: np.ndarray) -> np.ndarray:
    dimension = block.shape[1]
    projector = block @ block.T
    basis: t.List[np.ndarray] = []
    for j in range(projector.shape[0]):
        v = projector[:, j].copy()
        for b in basis:
            v -= (b @ v) * b
        norm = float(np.linalg.norm(v))
        if norm > 1e-6:
            basis.append(v / norm)
        if len(basis) == dimension:
            break
    return np.stack(basis, axis=1)


def max_assignment(weights: np.ndarray) -> np.ndarray:
    """Column per row maximizing the total weight; rows must not outnumber columns."""
    weights = np.asarray(weights, dtype=float)
    if weights.ndim != 2 or weights.shape[0] > weights.shape[1]:
        raise ContractViolationError("max_assignment needs an n x m matrix with n <= m",
                                     {"shape": list(weights.shape)})
    if not np.isfinite(weights).all():
        raise ContractViolationError("max_assignment needs finite weights", {})
    rows, cols = linear_sum_assignment(weights, maximize=True)
    assignment = np.empty(weights.shape[0], dtype=int)
    assignment[rows] = cols
    return assignment
