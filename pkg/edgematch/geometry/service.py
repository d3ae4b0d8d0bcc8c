import typing as t
from fractions import Fraction

import numpy as np
from scipy.optimize import linear_sum_assignment

from edgematch.exceptions import ContractViolationError, DegenerateFrameError, UnsolvablePuzzleError
from edgematch.geometry.model import (
    AffineTransform,
    EdgeElement,
    Placement,
    Puzzle,
    TypeKey,
    UnmatchedEdge,
    ValidityReport,
)
from edgematch.log import get_logger
from edgematch.utils import rotation_matrix

logger = get_logger(__name__)

FRAME_OWNER = -1
UNPAIRABLE = 1e12


class WorldEdge(t.NamedTuple):
    owner: int
    piece_id: int
    edge_index: int
    midpoint: np.ndarray
    length: float
    color: int
    orientation: Fraction


def canonical_edge_type(edge: EdgeElement) -> t.Tuple[TypeKey, int]:
    return canonical_type(edge.color, edge.orientation)


def canonical_type(color: int, orientation: Fraction) -> t.Tuple[TypeKey, int]:
    turn = Fraction(orientation) % 1
    if turn < Fraction(1, 2):
        return TypeKey(color, turn), 1
    return TypeKey(color, turn - Fraction(1, 2)), -1


def signed_indicator(edge: EdgeElement, key: TypeKey) -> int:
    edge_key, sign = canonical_edge_type(edge)
    return sign if edge_key == key else 0


def world_edges(puzzle: Puzzle, placement: t.Optional[Placement] = None) -> t.List[WorldEdge]:
    """Frame edges followed by every piece edge moved by its placement."""
    edges = [
        WorldEdge(FRAME_OWNER, 0, j, np.asarray(edge.offset, dtype=float), edge.length, edge.color,
                  edge.orientation)
        for j, edge in enumerate(puzzle.frame.edges)
    ]
    if placement is None:
        return edges
    copies = puzzle.copies
    for i, piece in enumerate(puzzle.pieces):
        translation = np.asarray(placement.translations[i], dtype=float)
        turn = placement.orientations[i]
        spin = rotation_matrix(turn)
        bases = [rotation_matrix(Fraction(rho, copies)) @ translation for rho in range(copies)]
        for j, edge in enumerate(piece.edges):
            midpoint = bases[edge.copy_index] + spin @ np.asarray(edge.offset, dtype=float)
            edges.append(WorldEdge(i, piece.id, j, midpoint, edge.length, edge.color,
                                   (edge.orientation + turn) % 1))
    return edges


def validate_solution(puzzle: Puzzle, placement: Placement, tol: float = 1e-6) -> ValidityReport:
    if len(placement) != puzzle.n_pieces:
        raise ContractViolationError(
            "placement size does not match the puzzle",
            {"pieces": puzzle.n_pieces, "placement": len(placement)}
        )
    if tol <= 0:
        raise ContractViolationError("tolerance must be positive", {"tol": tol})

    groups: t.Dict[TypeKey, t.Tuple[t.List[WorldEdge], t.List[WorldEdge]]] = {}
    for edge in world_edges(puzzle, placement):
        key, sign = canonical_type(edge.color, edge.orientation)
        plus, minus = groups.setdefault(key, ([], []))
        (plus if sign > 0 else minus).append(edge)

    unmatched: t.List[UnmatchedEdge] = []
    max_error = 0.0
    for key in sorted(groups):
        plus, minus = groups[key]
        paired = set()
        if plus and minus:
            cost = np.array([
                [
                    UNPAIRABLE if a.owner == b.owner else float(np.linalg.norm(a.midpoint - b.midpoint))
                    for b in minus
                ]
                for a in plus
            ])
            rows, cols = linear_sum_assignment(cost)
            for r, c in zip(rows, cols):
                a, b = plus[r], minus[c]
                distance = cost[r, c]
                if distance >= UNPAIRABLE:
                    continue
                max_error = max(max_error, distance)
                reason = None
                if distance > tol:
                    reason = f"position error {distance:.3g}"
                elif abs(a.length - b.length) > tol:
                    reason = f"length mismatch {a.length:.6g} vs {b.length:.6g}"
                if reason is None:
                    paired.update((id(a), id(b)))
                    continue
                unmatched.append(UnmatchedEdge(piece_id=a.piece_id, edge_index=a.edge_index, reason=reason))
                unmatched.append(UnmatchedEdge(piece_id=b.piece_id, edge_index=b.edge_index, reason=reason))
                paired.update((id(a), id(b)))
        for edge in plus + minus:
            if id(edge) not in paired:
                unmatched.append(UnmatchedEdge(
                    piece_id=edge.piece_id,
                    edge_index=edge.edge_index,
                    reason=f"no opposite edge of type ({key.color}, {key.orientation})",
                ))

    unmatched.sort(key=lambda u: (u.piece_id, u.edge_index))
    return ValidityReport(
        is_valid=not unmatched and max_error <= tol,
        unmatched_edges=tuple(unmatched),
        max_position_error=max_error,
        tolerance=tol,
    )


def edge_type_counts(puzzle: Puzzle) -> t.Dict[TypeKey, t.Tuple[int, int]]:
    """(canonical, opposite) edge counts per type over pieces and frame."""
    counts: t.Dict[TypeKey, t.List[int]] = {}
    edges = list(puzzle.frame.edges) + [edge for piece in puzzle.pieces for edge in piece.edges]
    for edge in edges:
        key, sign = canonical_edge_type(edge)
        counts.setdefault(key, [0, 0])[0 if sign > 0 else 1] += 1
    return {key: (plus, minus) for key, (plus, minus) in sorted(counts.items())}


def is_balanced(puzzle: Puzzle) -> bool:
    return all(plus == minus for plus, minus in edge_type_counts(puzzle).values())


def check_solvable(puzzle: Puzzle, area_rtol: float = 1e-9):
    unbalanced = {
        f"{key.color}:{key.orientation}": [plus, minus]
        for key, (plus, minus) in edge_type_counts(puzzle).items()
        if plus != minus
    }
    if unbalanced:
        raise UnsolvablePuzzleError("edge-type counts are unbalanced", {"types": unbalanced})
    piece_area = sum(piece.area for piece in puzzle.pieces) * puzzle.copies
    frame_area = puzzle.frame.area
    if abs(piece_area - frame_area) > area_rtol * max(frame_area, piece_area, 1e-300):
        raise UnsolvablePuzzleError(
            "piece area differs from frame area",
            {"piece_area": piece_area, "frame_area": frame_area}
        )


def normalize_coordinates(puzzle: Puzzle) -> t.Tuple[Puzzle, AffineTransform]:
    """Rescales the frame into [-1/2, 1/2]^2.

    Linked-copy puzzles are only scaled about the origin so the copy rotations survive.
    """
    if puzzle.frame.polygon.area <= 0.0:
        raise DegenerateFrameError("frame region has zero area", {"region": list(puzzle.frame.region)})

    points = np.vstack([np.asarray(polygon.exterior.coords) for polygon in puzzle.frame.polygons()])
    if puzzle.is_linked:
        transform = AffineTransform(scale=1.0 / (2.0 * float(np.abs(points).max())))
    else:
        low, high = points.min(axis=0), points.max(axis=0)
        scale = 1.0 / float((high - low).max())
        centre = (low + high) / 2.0
        transform = AffineTransform(scale=scale, shift=(float(-scale * centre[0]), float(-scale * centre[1])))
    return transform_puzzle(puzzle, transform), transform


def transform_puzzle(puzzle: Puzzle, transform: AffineTransform) -> Puzzle:
    scale, shift = transform.scale, transform.shift
    frame = puzzle.frame.model_copy(update={
        "region": tuple(transform.apply(p) for p in puzzle.frame.region),
        "edges": tuple(edge.scaled(scale, shift) for edge in puzzle.frame.edges),
    })
    pieces = tuple(
        piece.model_copy(update={
            "vertices": tuple(transform.apply_vector(v) for v in piece.vertices),
            "edges": tuple(edge.scaled(scale) for edge in piece.edges),
        })
        for piece in puzzle.pieces
    )
    presets = None
    if puzzle.preset_locations is not None:
        presets = tuple(transform.apply(p) for p in puzzle.preset_locations)
    return puzzle.model_copy(update={"frame": frame, "pieces": pieces, "preset_locations": presets})


def transform_placement(placement: Placement, transform: AffineTransform) -> Placement:
    return placement.model_copy(update={
        "translations": tuple(transform.apply(p) for p in placement.translations)
    })
