import io
import typing as t

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from edgematch.algebra.model import EvalMode, Monomial, MonomialFamily
from edgematch.types import StrEnum


class LPStatus(StrEnum):
    RUNNING = "running"
    PERMUTATION_FOUND = "permutation_found"
    STALLED = "stalled"
    MAX_ITER = "max_iter"


class PresetVandermonde(BaseModel):
    """Monomial values at every candidate location; row kappa * N + c is R(kappa / copies) s_c."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    locations: np.ndarray = Field(..., description="(copies * N, 2) normalized candidate locations")
    family: MonomialFamily
    monomials: t.Tuple[Monomial, ...]
    matrix: np.ndarray = Field(..., description="(copies * N, E) complex monomial values")
    copies: int = 1

    @property
    def n_cells(self) -> int:
        return self.matrix.shape[0] // self.copies

    def column(self, monomial: Monomial) -> int:
        return self.monomials.index(monomial)


class PresetOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_iter: int = Field(100, ge=1)
    tol_round: float = Field(1e-6, gt=0)
    degree_cap: int = Field(12, ge=1)
    seed: int = 0
    stall_window: int = Field(3, ge=1)
    stall_improvement: float = 1e-9
    perturbation: float = 1e-3
    family: MonomialFamily = MonomialFamily.COMPLEX
    mode: EvalMode = EvalMode.POINT
    validation_tol: float = Field(1e-6, gt=0)
    lp_tol: float = Field(1e-8, gt=0)
    pivot_rule: str = "dantzig"
    refactor_every: int = 50
    degenerate_run: int = 25
    max_pivots: int = 200000

    @classmethod
    def from_config(cls, config, **overrides) -> "PresetOptions":
        values = dict(
            max_iter=config.LP.MAX_ITER,
            tol_round=config.LP.TOL_ROUND,
            degree_cap=config.ALGEBRA.DEGREE_CAP,
            seed=config.LP.SEED,
            stall_window=config.LP.STALL_WINDOW,
            stall_improvement=config.LP.STALL_IMPROVEMENT,
            perturbation=config.LP.PERTURBATION,
            family=config.ALGEBRA.FAMILY,
            mode=config.ALGEBRA.MODE,
            validation_tol=config.GEOMETRY.TOLERANCE,
            lp_tol=config.KERNELS.LP.TOL,
            pivot_rule=config.KERNELS.LP.PIVOT_RULE,
            refactor_every=config.KERNELS.LP.REFACTOR_EVERY,
            degenerate_run=config.KERNELS.LP.DEGENERATE_RUN,
            max_pivots=config.KERNELS.LP.MAX_PIVOTS,
        )
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def kernel_options(self) -> t.Dict[str, t.Any]:
        return dict(
            tol=self.lp_tol,
            pivot_rule=self.pivot_rule,
            refactor_every=self.refactor_every,
            degenerate_run=self.degenerate_run,
            max_pivots=self.max_pivots,
        )


class RelaxLPState(BaseModel):
    """Append-only trace of one preset-location solve."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    n_pieces: int
    copies: int = 1
    iteration: int = 0
    matrices: t.List[np.ndarray] = []
    objective_history: t.List[float] = []
    perturbations: t.List[int] = []
    status: LPStatus = LPStatus.RUNNING
    selection: t.Optional[t.Tuple[int, ...]] = None
    n_equations: int = 0
    degree_capped: bool = False

    @property
    def P(self) -> t.Optional[np.ndarray]:
        return self.matrices[-1] if self.matrices else None

    def record(self, P: np.ndarray, objective: float):
        self.matrices.append(P)
        self.objective_history.append(float(objective))
        self.iteration = len(self.matrices)

    def segments(self) -> t.List[t.List[float]]:
        """Objective runs between perturbations; each perturbation changes the objective being maximized."""
        bounds = [0] + [k + 1 for k in self.perturbations] + [len(self.objective_history)]
        return [self.objective_history[a:b] for a, b in zip(bounds, bounds[1:]) if b > a]

    def is_monotone(self, tol: float = 1e-9) -> bool:
        return all(
            later >= earlier - tol
            for segment in self.segments()
            for earlier, later in zip(segment, segment[1:])
        )

    def export_text(self) -> str:
        out = io.StringIO()
        out.write(f"# pieces={self.n_pieces} copies={self.copies} status={self.status.value}\n")
        for k, (P, objective) in enumerate(zip(self.matrices, self.objective_history)):
            marker = " perturbed" if k in self.perturbations else ""
            out.write(f"iteration {k} objective {objective:.12g}{marker}\n")
            np.savetxt(out, P, fmt="%.9f")
        return out.getvalue()
