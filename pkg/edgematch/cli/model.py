import argparse
import typing as t
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, model_validator

from edgematch.types import StrEnum

SCHEMA_VERSION = 1


class CommandName(StrEnum):
    GENERATE = "generate"
    SOLVE = "solve"
    VERIFY = "verify"
    RENDER = "render"
    BENCH = "bench"


class Method(StrEnum):
    LP = "lp"
    SDP = "sdp"
    BRUTE = "brute"


class PuzzleKind(StrEnum):
    GRID = "grid"
    TWO_SOLUTION = "two-solution"
    BUNDLED = "bundled"


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    command: CommandName
    method: Method = Method.LP
    puzzle: t.Optional[Path] = None
    placement: t.Optional[Path] = None
    out: t.Optional[Path] = None
    report: t.Optional[Path] = None
    trace: t.Optional[Path] = None
    max_iter: t.Optional[int] = Field(None, ge=1)
    tol: t.Optional[float] = Field(None, gt=0)
    degree_cap: t.Optional[int] = Field(None, ge=1)
    seed: t.Optional[int] = None
    rotations: t.Optional[int] = Field(None, ge=1)
    kind: PuzzleKind = PuzzleKind.GRID
    rows: t.Optional[int] = Field(None, ge=1)
    cols: t.Optional[int] = Field(None, ge=1)
    colors: t.Optional[int] = Field(None, ge=1)
    name: t.Optional[str] = None
    runs: t.Optional[int] = Field(None, ge=1)
    scrambled: bool = False

    @model_validator(mode="after")
    def check_combination(self):
        needs_puzzle = (CommandName.SOLVE, CommandName.VERIFY, CommandName.RENDER)
        if self.command in needs_puzzle and self.puzzle is None:
            raise ValueError(f"{self.command.value} needs a puzzle file")
        if self.command == CommandName.GENERATE and self.kind == PuzzleKind.BUNDLED and not self.name:
            raise ValueError("--kind bundled needs --name")
        if self.command == CommandName.BENCH and self.method == Method.SDP:
            raise ValueError("bench runs grid puzzles with --method lp or brute")
        return self

    @classmethod
    def from_namespace(cls, args: argparse.Namespace) -> "RunConfig":
        values = {key: value for key, value in vars(args).items() if key in cls.model_fields and value is not None}
        return cls(**values)
