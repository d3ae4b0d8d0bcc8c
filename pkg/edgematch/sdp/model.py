import io
import typing as t

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from edgematch.algebra.model import EvalMode
from edgematch.types import StrEnum

Exponent = t.Tuple[int, ...]


class SDPStatus(StrEnum):
    RUNNING = "running"
    CONVERGED = "converged"
    MAX_ITER = "max_iter"
    EXTRACTION_FAILED = "extraction_failed"
    INVALID = "invalid"


class MomentStructure(BaseModel):
    """Moment matrix of the vector (1, Tx..Tx^K) or (1, Tx..Tx^K, Ty..Ty^K); entry (a, b) carries basis[a] + basis[b]."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    K: int = Field(..., ge=1)
    dimension: int = Field(..., ge=1, le=2)
    basis: t.Tuple[Exponent, ...]
    index_map: np.ndarray = Field(..., description="(n, n) monomial index of every position")
    monomials: t.Tuple[Exponent, ...]
    groups: t.Tuple[t.Tuple[t.Tuple[int, int], ...], ...] = Field(
        ..., description="full-matrix positions per monomial, upper triangle first"
    )

    @property
    def size(self) -> int:
        return len(self.basis)

    def position(self, exponent: Exponent) -> t.Tuple[int, int]:
        return self.groups[self.monomials.index(tuple(exponent))][0]

    def equalities(self) -> t.List[t.Tuple[t.Tuple[int, int], t.Tuple[int, int]]]:
        """Upper-triangle position pairs that must hold equal values."""
        pairs = []
        for group in self.groups:
            upper = [(a, b) for a, b in group if a <= b]
            pairs.extend((upper[0], other) for other in upper[1:])
        return pairs

    def embed(self, point: t.Sequence[float]) -> np.ndarray:
        """Exact rank-one moment matrix of T = e^point."""
        point = np.asarray(point, dtype=float)[: self.dimension]
        v = np.exp(np.asarray(self.basis, dtype=float) @ point)
        return np.outer(v, v)


class MomentOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    degree: int = Field(3, ge=1)
    max_iter: int = Field(60, ge=1)
    epsilon_per_piece: float = Field(1e-6, gt=0)
    position_tolerance: float = Field(1e-3, gt=0)
    rank_gap: float = Field(1e-4, gt=0)
    mode: EvalMode = EvalMode.PATH
    solver_tol: float = Field(1e-8, gt=0)
    solver_max_iter: int = Field(200, ge=1)
    step_fraction: float = Field(0.95, gt=0, lt=1)

    @classmethod
    def from_config(cls, config, **overrides) -> "MomentOptions":
        values = dict(
            degree=config.SDP.DEGREE,
            max_iter=config.SDP.MAX_ITER,
            epsilon_per_piece=config.SDP.EPSILON_PER_PIECE,
            position_tolerance=config.SDP.POSITION_TOLERANCE,
            rank_gap=config.SDP.RANK_GAP,
            mode=config.SDP.MODE,
            solver_tol=config.SDP.SOLVER_TOL,
            solver_max_iter=config.SDP.SOLVER_MAX_ITER,
            step_fraction=config.KERNELS.SDP.STEP_FRACTION,
        )
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def kernel_options(self) -> t.Dict[str, t.Any]:
        return dict(tol=self.solver_tol, max_iter=self.solver_max_iter, step_fraction=self.step_fraction)


class RelaxSDPState(BaseModel):
    """Append-only trace of one moment pipeline run."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    n_pieces: int
    K: int
    iteration: int = 0
    Z: t.List[np.ndarray] = []
    W: t.List[np.ndarray] = []
    objective_history: t.List[float] = []
    sdp_objectives: t.List[float] = []
    eigenvalues: t.List[t.List[np.ndarray]] = []
    placements: t.List[t.List[t.Tuple[float, float]]] = []
    rank_gaps: t.List[float] = []
    status: SDPStatus = SDPStatus.RUNNING

    def record(self, Z, W, objective: float, sdp_objective: float, eigenvalues, translations):
        self.Z, self.W = list(Z), list(W)
        self.objective_history.append(float(objective))
        self.sdp_objectives.append(float(sdp_objective))
        self.eigenvalues.append(list(eigenvalues))
        self.placements.append(list(translations))
        self.rank_gaps = [
            float(values[1] / values[0]) if len(values) > 1 and values[0] > 0 else 0.0
            for values in eigenvalues
        ]
        self.iteration = len(self.objective_history)

    def export_text(self) -> str:
        out = io.StringIO()
        out.write(f"# pieces={self.n_pieces} K={self.K} status={self.status.value}\n")
        for k, objective in enumerate(self.objective_history):
            out.write(f"iteration {k} objective {objective:.12g} sdp {self.sdp_objectives[k]:.12g}\n")
            for i, values in enumerate(self.eigenvalues[k]):
                out.write(f"  block {i}: " + " ".join(f"{v:.6e}" for v in values) + "\n")
        return out.getvalue()
