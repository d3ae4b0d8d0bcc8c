from fractions import Fraction

import pytest

from edgematch.algebra.rotation import augment_rotations, recover_orientation
from edgematch.algebra.service import assemble_system, residual
from edgematch.exceptions import ContractViolationError, OrientationRecoveryError, RotationPreconditionError
from edgematch.geometry.model import Placement
from edgematch.geometry.service import validate_solution
from edgematch.lp.service import preset_solver
from edgematch.utils import rotate_vector
from tests.factories import PuzzleTestDataFactory

QUARTER = Fraction(1, 4)


@pytest.fixture
def far_cell():
    """Single cell centred at (10, 10)."""
    return PuzzleTestDataFactory.single(origin=(9.5, 9.5))


def test_augment_with_one_rotation_is_identity(far_cell):
    puzzle, _ = far_cell
    assert augment_rotations(puzzle, 1) is puzzle


def test_augment_counts_linked_edges(far_cell):
    # Given
    puzzle, _ = far_cell

    # When
    augmented = augment_rotations(puzzle, 4)

    # Then
    assert augmented.copies == 4
    assert len(augmented.frame.edges) == 16
    assert len(augmented.pieces[0].edges) == 16
    assert sorted({edge.copy_index for edge in augmented.pieces[0].edges}) == [0, 1, 2, 3]


def test_augment_rejects_overlapping_copies():
    puzzle, _ = PuzzleTestDataFactory.single(origin=(-0.5, -0.5))
    with pytest.raises(RotationPreconditionError):
        augment_rotations(puzzle, 4)


def test_augment_rejects_orientations_outside_the_group(far_cell):
    puzzle, _ = far_cell
    with pytest.raises(RotationPreconditionError):
        augment_rotations(puzzle, 3)


def test_augment_twice_is_rejected(far_cell):
    puzzle, _ = far_cell
    with pytest.raises(ContractViolationError):
        augment_rotations(augment_rotations(puzzle, 4), 4)


def test_rotated_planted_solution_solves_the_augmented_system(far_cell):
    # Given
    puzzle, planted = far_cell
    turned = puzzle.model_copy(update={"pieces": (puzzle.pieces[0].rotated(-QUARTER),)})
    target = planted.translations[0]

    # When
    augmented = augment_rotations(turned, 4)
    linked = Placement(translations=(rotate_vector(target, -QUARTER),))

    # Then
    assert residual(assemble_system(augmented), linked) <= 1e-9
    assert validate_solution(augmented, linked).is_valid


def test_recover_orientation_inside_frame(far_cell):
    puzzle, _ = far_cell
    turn, point = recover_orientation((10.0, 10.0), puzzle.frame, 4)
    assert turn == 0
    assert point == pytest.approx((10.0, 10.0))


def test_recover_orientation_after_quarter_turn(far_cell):
    # Given
    puzzle, _ = far_cell
    linked = rotate_vector((10.2, 9.8), -QUARTER)

    # When
    turn, point = recover_orientation(linked, puzzle.frame, 4)

    # Then
    assert turn == QUARTER
    assert point == pytest.approx((10.2, 9.8))


def test_recover_orientation_outside_every_copy(far_cell):
    puzzle, _ = far_cell
    with pytest.raises(OrientationRecoveryError):
        recover_orientation((0.0, 0.0), puzzle.frame, 4)


def test_rotated_single_piece_is_solved(far_cell):
    # Given
    puzzle, planted = far_cell
    turned = puzzle.model_copy(update={
        "pieces": (puzzle.pieces[0].rotated(-QUARTER),),
        "rotation_order": 4,
    })

    # When
    placement, state = preset_solver.solve(turned, rotations=4)

    # Then
    assert placement is not None
    assert placement.orientations == (QUARTER,)
    assert placement.translations[0] == pytest.approx(planted.translations[0])
    assert validate_solution(turned, placement).is_valid
