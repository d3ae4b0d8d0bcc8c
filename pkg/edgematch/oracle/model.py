import typing as t

from pydantic import BaseModel, ConfigDict, Field

from edgematch.geometry.model import Placement
from edgematch.types import StrEnum


class SearchMode(StrEnum):
    PRESET = "preset"
    ANCHORING = "anchoring"


class SolutionSet(BaseModel):
    model_config = ConfigDict(frozen=True)

    placements: t.Tuple[Placement, ...] = ()
    exhausted: bool = Field(..., description="search space fully explored")
    nodes: int = 0
    mode: SearchMode = SearchMode.PRESET

    def __len__(self) -> int:
        return len(self.placements)

    @property
    def first(self) -> t.Optional[Placement]:
        return self.placements[0] if self.placements else None

    def to_document(self) -> t.Dict[str, t.Any]:
        return {
            "exhausted": self.exhausted,
            "nodes": self.nodes,
            "mode": self.mode.value,
            "placements": [placement.model_dump(mode="json", exclude_none=True) for placement in self.placements],
        }


class WitnessReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    K: int
    permutations: int
    permutation_violation: float = Field(..., description="worst power-sum violation over permutations of v")
    trials: int
    min_witness_violation: float = Field(..., description="smallest violation over random non-permutations")
    resampled: int = 0
    passed: bool
