import typing as t

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from edgematch.geometry.model import AffineTransform, TypeKey
from edgematch.types import StrEnum


class MonomialFamily(StrEnum):
    COMPLEX = "complex"
    REAL = "real"


class EvalMode(StrEnum):
    POINT = "point"
    PATH = "path"


class Monomial(BaseModel):
    model_config = ConfigDict(frozen=True)

    family: MonomialFamily
    degree: t.Tuple[int, ...]

    @model_validator(mode="after")
    def check_degree(self):
        if self.family == MonomialFamily.COMPLEX:
            if len(self.degree) != 1 or self.degree[0] < 1:
                raise ValueError("complex-power degree must be a single k >= 1")
        else:
            if len(self.degree) != 2 or min(self.degree) < 0 or sum(self.degree) < 1:
                raise ValueError("real multi-index must be (kx, ky) >= 0 with total degree >= 1")
        return self

    @property
    def total_degree(self) -> int:
        return sum(self.degree)

    def label(self) -> str:
        return ",".join(str(k) for k in self.degree)


class PolyEquation(BaseModel):
    """sum_i sum_rho coeffs[i, rho] * m(R(rho/r) t_i) + constant = 0, rescaled so the largest coefficient is 1."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    type_key: TypeKey
    monomial: Monomial
    coeffs: np.ndarray
    constant: complex
    scale: float = 1.0


class PolySystem(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    equations: t.Tuple[PolyEquation, ...]
    normalization: AffineTransform
    degrees: t.Dict[TypeKey, int]
    family: MonomialFamily
    mode: EvalMode
    n_pieces: int
    copies: int = 1
    capped: bool = False

    @property
    def max_degree(self) -> int:
        return max(self.degrees.values(), default=0)

    def coefficient_tensor(self) -> np.ndarray:
        """(equations, pieces, copies) coefficient array."""
        if not self.equations:
            return np.zeros((0, self.n_pieces, self.copies), dtype=complex)
        return np.stack([equation.coeffs for equation in self.equations])

    def constants(self) -> np.ndarray:
        return np.array([equation.constant for equation in self.equations], dtype=complex)


class LinearEquation(BaseModel):
    """sum_i coeffs[i] @ t_i + constant = 0 for one edge type."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    type_key: TypeKey
    coeffs: np.ndarray = Field(..., description="(N, 2, 2) matrices")
    constant: np.ndarray = Field(..., description="2-vector")

    def evaluate(self, translations: t.Sequence[t.Sequence[float]]) -> np.ndarray:
        points = np.asarray(translations, dtype=float).reshape(-1, 2)
        return np.einsum("iab,ib->a", self.coeffs, points) + self.constant
