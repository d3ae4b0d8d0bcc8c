import typing as t
from pathlib import Path

import orjson
from pydantic import ValidationError

from edgematch.exceptions import PuzzleFormatError
from edgematch.geometry.model import Placement, Puzzle
from edgematch.utils import ensure_parent

PathLike = t.Union[str, Path]


JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY


def dump_json(data: t.Any) -> str:
    return orjson.dumps(data, option=JSON_OPTIONS).decode()


def write_json(path: PathLike, data: t.Any):
    ensure_parent(path).write_bytes(orjson.dumps(data, option=JSON_OPTIONS))


def read_json(path: PathLike) -> t.Any:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise PuzzleFormatError(f"cannot read {path}", {"path": str(path), "error": str(e)})
    try:
        return orjson.loads(raw)
    except orjson.JSONDecodeError as e:
        raise PuzzleFormatError(
            f"malformed JSON in {path} at line {e.lineno}, column {e.colno}",
            {"path": str(path), "line": e.lineno, "column": e.colno, "error": e.msg}
        )


def _format_errors(error: ValidationError) -> t.List[t.Dict[str, str]]:
    return [
        {"field": ".".join(str(part) for part in item["loc"]) or "<root>", "message": item["msg"]}
        for item in error.errors()
    ]


def _invalid(path: PathLike, what: str, error: ValidationError) -> PuzzleFormatError:
    errors = _format_errors(error)
    first = errors[0]
    return PuzzleFormatError(
        f"invalid {what} in {path}: {first['field']}: {first['message']}",
        {"path": str(path), "errors": errors}
    )


def puzzle_document(puzzle: Puzzle, planted: t.Optional[Placement] = None) -> t.Dict[str, t.Any]:
    data = puzzle.model_dump(mode="json", exclude_none=True, exclude_defaults=True)
    if planted is not None:
        data["planted"] = placement_document(planted)
    return data


def placement_document(placement: Placement) -> t.Dict[str, t.Any]:
    return placement.model_dump(mode="json", exclude_none=True)


def save_puzzle(path: PathLike, puzzle: Puzzle, planted: t.Optional[Placement] = None):
    write_json(path, puzzle_document(puzzle, planted))


def parse_puzzle(data: t.Any, path: PathLike = "<memory>") -> t.Tuple[Puzzle, t.Optional[Placement]]:
    if not isinstance(data, dict):
        raise PuzzleFormatError(f"puzzle document in {path} must be a JSON object", {"path": str(path)})
    data = dict(data)
    planted_data = data.pop("planted", None)
    try:
        puzzle = Puzzle.model_validate(data)
    except ValidationError as e:
        raise _invalid(path, "puzzle", e)

    planted = None
    if planted_data is not None:
        planted = parse_placement(planted_data, path)
        if len(planted) != puzzle.n_pieces:
            raise PuzzleFormatError(
                f"planted placement in {path} has {len(planted)} entries for {puzzle.n_pieces} pieces",
                {"path": str(path)}
            )
    return puzzle, planted


def load_puzzle(path: PathLike) -> t.Tuple[Puzzle, t.Optional[Placement]]:
    return parse_puzzle(read_json(path), path)


def parse_placement(data: t.Any, path: PathLike = "<memory>") -> Placement:
    try:
        return Placement.model_validate(data)
    except ValidationError as e:
        raise _invalid(path, "placement", e)


def save_placement(path: PathLike, placement: Placement):
    write_json(path, placement_document(placement))


def load_placement(path: PathLike) -> Placement:
    data = read_json(path)
    if isinstance(data, dict) and "placement" in data:
        data = data["placement"]
    return parse_placement(data, path)
