import itertools
import typing as t
from fractions import Fraction

from shapely.geometry import Point

from edgematch.exceptions import ContractViolationError, OrientationRecoveryError, RotationPreconditionError
from edgematch.geometry.model import Frame, Piece, Puzzle, Vector, rotated_polygon
from edgematch.log import get_logger
from edgematch.utils import rotate_vector

logger = get_logger(__name__)


def _check_rotation_group(puzzle: Puzzle, r: int):
    owners = [("frame", puzzle.frame.edges)] + [(f"piece {p.id}", p.edges) for p in puzzle.pieces]
    for owner, edges in owners:
        for j, edge in enumerate(edges):
            if (edge.orientation * r).denominator != 1:
                raise RotationPreconditionError(
                    f"{owner}: edge {j} orientation {edge.orientation} is not a multiple of 1/{r} turn",
                    {"owner": owner, "edge": j, "r": r}
                )


def _check_disjoint_copies(frame: Frame, r: int):
    shapes = [rotated_polygon(frame.region, Fraction(rho, r)) for rho in range(r)]
    for (a, first), (b, second) in itertools.combinations(enumerate(shapes), 2):
        if first.intersects(second):
            raise RotationPreconditionError(
                "rotated frame copies overlap; translate the frame away from the origin",
                {"copies": [a, b], "r": r}
            )


def augment_rotations(puzzle: Puzzle, r: int) -> Puzzle:
    """Links r rotated copies of every piece and of the frame into one translation-only puzzle."""
    if r < 1:
        raise ContractViolationError("rotation order must be positive", {"r": r})
    if r == 1:
        return puzzle
    if puzzle.is_linked:
        raise ContractViolationError("puzzle is already augmented", {"copies": puzzle.copies})
    _check_rotation_group(puzzle, r)
    _check_disjoint_copies(puzzle.frame, r)

    def linked(edges):
        return tuple(
            edge.rotated(Fraction(rho, r), copy_index=rho)
            for rho in range(r)
            for edge in edges
        )

    frame = Frame(region=puzzle.frame.region, edges=linked(puzzle.frame.edges), copies=r)
    pieces = tuple(
        Piece(id=piece.id, vertices=piece.vertices, edges=linked(piece.edges), copies=r)
        for piece in puzzle.pieces
    )
    logger.debug("augmented %d pieces with %d rotated copies", len(pieces), r)
    return Puzzle(frame=frame, pieces=pieces, rotation_order=1, preset_locations=puzzle.preset_locations)


def recover_orientation(t_linked: t.Sequence[float], frame: Frame, r: int, tol: float = 1e-6) -> t.Tuple[Fraction, Vector]:
    """Finds the copy whose rotation brings t into the original frame: returns (phi, R(phi) t)."""
    region = frame.polygon.buffer(tol)
    for rho in range(r):
        turn = Fraction(rho, r)
        point = rotate_vector(t_linked, turn)
        if region.covers(Point(point)):
            return turn, point
    raise OrientationRecoveryError(
        "no rotated frame copy contains the location",
        {"t": list(t_linked), "r": r}
    )
