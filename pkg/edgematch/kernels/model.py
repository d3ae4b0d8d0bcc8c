import typing as t

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from edgematch.types import StrEnum

SYMMETRY_TOL = 1e-12


class SolveStatus(StrEnum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    MAX_ITER = "max_iter"
    NUMERICAL_FAILURE = "numerical_failure"


class BlockKind(StrEnum):
    SEMIDEFINITE = "s"
    NONNEGATIVE = "l"


class LinearProgram(BaseModel):
    """minimize c @ x subject to A @ x = b, x >= 0."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    objective: np.ndarray
    equality_matrix: np.ndarray
    equality_rhs: np.ndarray

    @model_validator(mode="after")
    def check_shapes(self):
        n = self.objective.shape[0]
        if self.equality_matrix.ndim != 2 or self.equality_matrix.shape[1] != n:
            raise ValueError(f"equality matrix must have {n} columns")
        if self.equality_rhs.shape != (self.equality_matrix.shape[0],):
            raise ValueError("rhs length must equal the number of rows")
        if not (np.isfinite(self.objective).all() and np.isfinite(self.equality_matrix).all()
                and np.isfinite(self.equality_rhs).all()):
            raise ValueError("linear program data must be finite")
        return self

    @property
    def n_variables(self) -> int:
        return self.objective.shape[0]

    @property
    def n_constraints(self) -> int:
        return self.equality_matrix.shape[0]


class SDPBlock(BaseModel):
    """A semidefinite block (cost is d x d) or a non-negative orthant block (cost is a d-vector)."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: BlockKind = BlockKind.SEMIDEFINITE
    dimension: int = Field(..., ge=1)
    cost: np.ndarray

    @model_validator(mode="after")
    def check_cost(self):
        _check_block_array(self.kind, self.dimension, self.cost, "cost")
        return self


class SDPConstraint(BaseModel):
    """sum over listed blocks of <coefficients[b], X_b> = rhs."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    coefficients: t.Dict[int, np.ndarray]
    rhs: float


class BlockSDP(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    blocks: t.Tuple[SDPBlock, ...]
    constraints: t.Tuple[SDPConstraint, ...] = ()

    @model_validator(mode="after")
    def check_constraints(self):
        for k, constraint in enumerate(self.constraints):
            for b, matrix in constraint.coefficients.items():
                if not 0 <= b < len(self.blocks):
                    raise ValueError(f"constraint {k} refers to missing block {b}")
                block = self.blocks[b]
                _check_block_array(block.kind, block.dimension, matrix, f"constraint {k}")
        return self

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)


def _check_block_array(kind: BlockKind, dimension: int, array: np.ndarray, what: str):
    if kind == BlockKind.SEMIDEFINITE:
        if array.shape != (dimension, dimension):
            raise ValueError(f"{what}: expected a {dimension}x{dimension} matrix")
        if np.abs(array - array.T).max(initial=0.0) > SYMMETRY_TOL * max(1.0, np.abs(array).max(initial=0.0)):
            raise ValueError(f"{what}: matrix is not symmetric")
    elif array.shape != (dimension,):
        raise ValueError(f"{what}: expected a vector of length {dimension}")


class SolveReport(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    status: SolveStatus
    objective: float
    primal: t.Any = None
    dual: t.Optional[np.ndarray] = None
    dual_objective: float = float("nan")
    residuals: t.Tuple[float, float, float] = (float("nan"), float("nan"), float("nan"))
    iterations: int = 0
    message: str = ""

    @property
    def is_optimal(self) -> bool:
        return self.status == SolveStatus.OPTIMAL
