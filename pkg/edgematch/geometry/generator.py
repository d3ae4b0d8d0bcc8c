import typing as t
from fractions import Fraction

import numpy as np

from edgematch.exceptions import ContractViolationError, RotationPreconditionError
from edgematch.geometry.model import EdgeElement, Frame, Piece, Placement, Puzzle, Vector
from edgematch.geometry.schema import load_puzzle
from edgematch.utils import get_path_from_root

UNIT_SQUARE = ((-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5))
# outward normals of bottom, right, top, left
SQUARE_NORMALS = (Fraction(3, 4), Fraction(0), Fraction(1, 4), Fraction(1, 2))

INSTANCES_DIR = "instances"


def square_piece(piece_id: int, colors: t.Sequence[int]) -> Piece:
    """Unit square with edge colors given as (bottom, right, top, left)."""
    edges = tuple(
        EdgeElement(
            endpoints=(UNIT_SQUARE[side], UNIT_SQUARE[(side + 1) % 4]),
            color=int(colors[side]),
            orientation=SQUARE_NORMALS[side],
        )
        for side in range(4)
    )
    return Piece(id=piece_id, vertices=UNIT_SQUARE, edges=edges)


def grid_frame(rows: int, cols: int, vcol: np.ndarray, hcol: np.ndarray, origin: Vector) -> Frame:
    ox, oy = float(origin[0]), float(origin[1])
    edges = []
    for c in range(cols):
        edges.append(((ox + c, oy), (ox + c + 1, oy), hcol[0][c], Fraction(1, 4)))
    for r in range(rows):
        edges.append(((ox + cols, oy + r), (ox + cols, oy + r + 1), vcol[r][cols], Fraction(1, 2)))
    for c in reversed(range(cols)):
        edges.append(((ox + c + 1, oy + rows), (ox + c, oy + rows), hcol[rows][c], Fraction(3, 4)))
    for r in reversed(range(rows)):
        edges.append(((ox, oy + r + 1), (ox, oy + r), vcol[r][0], Fraction(0)))
    return Frame(
        region=((ox, oy), (ox + cols, oy), (ox + cols, oy + rows), (ox, oy + rows)),
        edges=tuple(
            EdgeElement(endpoints=(a, b), color=int(color), orientation=turn)
            for a, b, color, turn in edges
        ),
    )


def cell_centres(rows: int, cols: int, origin: Vector = (0.0, 0.0)) -> t.Tuple[Vector, ...]:
    return tuple(
        (float(origin[0]) + c + 0.5, float(origin[1]) + r + 0.5)
        for r in range(rows)
        for c in range(cols)
    )


def grid_puzzle_from_colors(
        vcol: np.ndarray,
        hcol: np.ndarray,
        order: t.Sequence[int],
        origin: Vector = (0.0, 0.0)
) -> t.Tuple[Puzzle, Placement]:
    """
    vcol[r][c] colors the vertical boundary left of cell (r, c), hcol[r][c] the horizontal
    boundary below it; row 0 is the bottom row. Piece i occupies cell order[i] (row-major).
    """
    rows, cols = len(vcol), len(hcol[0])
    pieces = []
    for i, cell in enumerate(order):
        r, c = divmod(int(cell), cols)
        colors = (hcol[r][c], vcol[r][c + 1], hcol[r + 1][c], vcol[r][c])
        pieces.append(square_piece(i + 1, colors))

    presets = cell_centres(rows, cols, origin)
    puzzle = Puzzle(
        frame=grid_frame(rows, cols, vcol, hcol, origin),
        pieces=tuple(pieces),
        preset_locations=presets,
    )
    planted = Placement(
        translations=tuple(presets[int(cell)] for cell in order),
        assignment=tuple(int(cell) for cell in order),
    )
    return puzzle, planted


def generate_grid_puzzle(
        rows: int,
        cols: int,
        num_colors: int,
        seed: int,
        origin: Vector = (0.0, 0.0)
) -> t.Tuple[Puzzle, Placement]:
    if rows < 1 or cols < 1 or num_colors < 1:
        raise ContractViolationError(
            "rows, cols and num_colors must be positive",
            {"rows": rows, "cols": cols, "num_colors": num_colors}
        )
    rng = np.random.default_rng(seed)
    vcol = rng.integers(0, num_colors, size=(rows, cols + 1)).tolist()
    hcol = rng.integers(0, num_colors, size=(rows + 1, cols)).tolist()
    order = rng.permutation(rows * cols).tolist()
    return grid_puzzle_from_colors(vcol, hcol, order, origin)


def two_solution_grid_puzzle(origin: Vector = (0.0, 0.0)) -> t.Tuple[Puzzle, Placement]:
    """2x2 instance whose bottom-left and top-right pieces are identical, so swapping them is the only other solution."""
    vcol = [[1, 2, 7], [4, 1, 2]]
    hcol = [[0, 6], [3, 0], [5, 3]]
    return grid_puzzle_from_colors(vcol, hcol, order=[0, 1, 2, 3], origin=origin)


def scramble_orientations(
        puzzle: Puzzle,
        placement: Placement,
        r: int,
        seed: int
) -> t.Tuple[Puzzle, Placement]:
    """Turns every piece by a seeded multiple of 1/r; the returned placement turns them back."""
    if r < 1:
        raise ContractViolationError("rotation order must be positive", {"r": r})
    for piece in puzzle.pieces:
        for edge in piece.edges:
            if (edge.orientation * r).denominator != 1:
                raise RotationPreconditionError(
                    "edge orientations are not multiples of the rotation step",
                    {"piece": piece.id, "orientation": str(edge.orientation), "r": r}
                )
    rng = np.random.default_rng(seed)
    steps = rng.integers(0, r, size=puzzle.n_pieces).tolist()
    pieces = tuple(piece.rotated(Fraction(-k, r)) for piece, k in zip(puzzle.pieces, steps))
    scrambled = puzzle.model_copy(update={"pieces": pieces, "rotation_order": r})
    planted = placement.model_copy(update={
        "orientations": tuple((orientation + Fraction(k, r)) % 1 for orientation, k in zip(placement.orientations, steps))
    })
    return scrambled, planted


def list_bundled() -> t.List[str]:
    return sorted(path.stem for path in get_path_from_root(INSTANCES_DIR).glob("*.json"))


def load_bundled(name: str) -> t.Tuple[Puzzle, t.Optional[Placement]]:
    path = get_path_from_root(INSTANCES_DIR) / f"{name}.json"
    if not path.exists():
        raise ContractViolationError(f"unknown bundled instance {name!r}", {"available": list_bundled()})
    return load_puzzle(path)
