import math
import typing as t
from fractions import Fraction
from pathlib import Path

import numpy as np


def get_path_from_root(path: t.Union[str, Path]) -> Path:
    base_path = Path(__file__).resolve().parent
    return base_path / path


def ensure_parent(path: t.Union[str, Path]) -> Path:
    path = Path(path)
    if not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    return path


def as_turn(value: t.Any) -> Fraction:
    """Coerces `[num, den]`, ints, strings and Fractions into a turn in [0, 1)."""
    if isinstance(value, Fraction):
        turn = value
    elif isinstance(value, bool):
        raise ValueError("orientation must be a rational turn")
    elif isinstance(value, int):
        turn = Fraction(value)
    elif isinstance(value, str):
        turn = Fraction(value)
    elif isinstance(value, (list, tuple)) and len(value) == 2:
        num, den = value
        if not isinstance(num, int) or not isinstance(den, int) or isinstance(num, bool) or isinstance(den, bool):
            raise ValueError("orientation must be a pair of integers [num, den]")
        if den == 0:
            raise ValueError("orientation denominator must be nonzero")
        turn = Fraction(num, den)
    else:
        raise ValueError(f"cannot read orientation from {value!r}")
    return turn % 1


def rotation_matrix(turn: t.Union[Fraction, float]) -> np.ndarray:
    """Counter-clockwise rotation by `turn` full turns; quarter turns are exact."""
    quarter = Fraction(turn) * 4 if isinstance(turn, (Fraction, int)) else None
    if quarter is not None and quarter.denominator == 1:
        cos, sin = [(1, 0), (0, 1), (-1, 0), (0, -1)][int(quarter) % 4]
        return np.array([[cos, -sin], [sin, cos]], dtype=float)
    angle = 2.0 * math.pi * float(turn)
    cos, sin = math.cos(angle), math.sin(angle)
    return np.array([[cos, -sin], [sin, cos]])


def rotate_vector(vector: t.Sequence[float], turn: t.Union[Fraction, float]) -> t.Tuple[float, float]:
    x, y = rotation_matrix(turn) @ np.asarray(vector, dtype=float)
    return float(x), float(y)
