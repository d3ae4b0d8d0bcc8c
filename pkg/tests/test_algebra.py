import math
from fractions import Fraction

import numpy as np
import pytest

from edgematch.algebra.model import EvalMode, Monomial, MonomialFamily, PolySystem
from edgematch.algebra.service import (
    assemble_system,
    completeness_degrees,
    edge_coefficient,
    edge_coefficient_nd,
    export_system,
    linear_matrix,
    linear_representation,
    monomials_for,
    residual,
)
from edgematch.exceptions import ContractViolationError
from edgematch.geometry.model import AffineTransform, EdgeElement, Placement
from edgematch.geometry.generator import generate_grid_puzzle
from edgematch.geometry.service import canonical_edge_type, signed_indicator
from tests.factories import PuzzleTestDataFactory

FIRST_POWER = Monomial(family=MonomialFamily.COMPLEX, degree=(1,))


def test_point_coefficient_at_origin_is_one():
    edge = PuzzleTestDataFactory.vertical_edge(0.0)
    assert edge_coefficient(edge, FIRST_POWER) == pytest.approx(1.0)
    assert edge_coefficient(edge, Monomial(family=MonomialFamily.REAL, degree=(2, 1))) == pytest.approx(1.0)


def test_point_coefficient_off_origin():
    edge = PuzzleTestDataFactory.vertical_edge(0.5)
    assert edge_coefficient(edge, FIRST_POWER) == pytest.approx(1.648721, abs=1e-6)


def test_path_coefficient_of_unit_segment():
    # Given
    edge = EdgeElement(endpoints=((0.0, 0.0), (1.0, 0.0)), color=0, orientation=Fraction(1, 4))

    # When
    value = edge_coefficient(edge, FIRST_POWER, EvalMode.PATH)

    # Then
    assert value == pytest.approx(math.e - 1.0)


def test_path_integral_cancels_for_reversed_segment():
    # Given
    forward = EdgeElement(endpoints=((0.0, 0.0), (1.0, 0.0)), color=0, orientation=Fraction(1, 4))
    backward = EdgeElement(endpoints=((1.0, 0.0), (0.0, 0.0)), color=0, orientation=Fraction(3, 4))
    key, _ = canonical_edge_type(forward)
    monomial = Monomial(family=MonomialFamily.REAL, degree=(1, 2))

    # When
    total = sum(signed_indicator(edge, key) * edge_coefficient(edge, monomial, EvalMode.PATH)
                for edge in (forward, backward))

    # Then
    assert abs(total) < 1e-12


def test_opposite_edges_of_one_piece():
    # Given
    right = PuzzleTestDataFactory.vertical_edge(0.5, color=2, orientation=Fraction(0))
    left = PuzzleTestDataFactory.vertical_edge(-0.5, color=2, orientation=Fraction(1, 2))
    key, _ = canonical_edge_type(right)

    # When
    alpha = sum(signed_indicator(edge, key) * edge_coefficient(edge, FIRST_POWER) for edge in (right, left))

    # Then
    assert alpha == pytest.approx(1.042190, abs=1e-6)


def test_nd_coefficient():
    assert edge_coefficient_nd((0.5, 0.0, 0.25), (1, 3, 2)) == pytest.approx(math.exp(1.0))
    with pytest.raises(ContractViolationError):
        edge_coefficient_nd((0.5, 0.0), (1,))


def test_real_monomial_order():
    degrees = [m.degree for m in monomials_for(MonomialFamily.REAL, 2)]
    assert degrees == [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


def test_single_piece_system():
    # Given
    puzzle, planted = PuzzleTestDataFactory.single()

    # When
    system = assemble_system(puzzle)

    # Then
    assert set(system.degrees.values()) == {1}
    assert len(system.equations) == 4
    assert all(equation.coeffs.shape == (1, 1) for equation in system.equations)
    assert residual(system, planted) <= 1e-9


def test_distinct_grid_degrees_are_one():
    puzzle, _ = PuzzleTestDataFactory.distinct_grid()
    assert set(completeness_degrees(puzzle).values()) == {1}


def test_one_color_grid_degrees_are_capped():
    # Given
    puzzle, _ = PuzzleTestDataFactory.one_color_grid(6, 6)

    # When
    degrees = completeness_degrees(puzzle)
    system = assemble_system(puzzle)

    # Then
    assert sorted(degrees.values()) == [42, 42]
    assert system.capped
    assert system.max_degree == 12


def test_empty_puzzle_has_no_degrees():
    assert completeness_degrees(PuzzleTestDataFactory.empty()) == {}


@pytest.mark.parametrize("family, mode", [
    (MonomialFamily.COMPLEX, EvalMode.POINT),
    (MonomialFamily.REAL, EvalMode.POINT),
    (MonomialFamily.REAL, EvalMode.PATH),
])
def test_planted_grid_has_zero_residual(family, mode):
    # Given
    puzzle, planted = generate_grid_puzzle(3, 3, 3, seed=2)

    # When
    system = assemble_system(puzzle, family=family, mode=mode)

    # Then
    assert residual(system, planted) <= 1e-9


def test_swapped_pair_has_large_residual():
    # Given
    puzzle, planted = PuzzleTestDataFactory.pair()
    system = assemble_system(puzzle)

    # When
    value = residual(system, PuzzleTestDataFactory.swapped(planted, 0, 1))

    # Then
    assert value > 1e-3


def test_empty_system_residual():
    system = PolySystem(equations=(), normalization=AffineTransform(), degrees={},
                        family=MonomialFamily.COMPLEX, mode=EvalMode.POINT, n_pieces=0)
    assert residual(system, Placement(translations=())) == 0.0


def test_residual_rejects_rotated_placement():
    puzzle, planted = PuzzleTestDataFactory.single()
    rotated = planted.model_copy(update={"orientations": (Fraction(1, 4),)})
    with pytest.raises(ContractViolationError):
        residual(assemble_system(puzzle), rotated)


def test_linear_system_holds_at_planted_solution():
    # Given
    puzzle, planted = generate_grid_puzzle(3, 2, 4, seed=8)

    # When
    A, b = linear_matrix(linear_representation(puzzle))

    # Then
    x = np.asarray(planted.translations).reshape(-1)
    assert np.abs(A @ x - b).max() <= 1e-12


def test_linear_system_is_underdetermined_for_one_color():
    puzzle, _ = PuzzleTestDataFactory.one_color_grid(2, 2)
    A, _ = linear_matrix(linear_representation(puzzle))
    assert np.linalg.matrix_rank(A) < 2 * puzzle.n_pieces


def test_linear_system_pins_a_single_piece():
    # Given
    puzzle, _ = PuzzleTestDataFactory.single()
    A, b = linear_matrix(linear_representation(puzzle))

    # When
    x, *_ = np.linalg.lstsq(A, b, rcond=None)

    # Then
    assert np.linalg.matrix_rank(A) == 2
    assert x == pytest.approx([0.5, 0.5])


def test_export_system_lists_every_equation():
    puzzle, _ = PuzzleTestDataFactory.single()
    system = assemble_system(puzzle)
    lines = export_system(system).splitlines()
    assert lines[0].startswith("# family=complex")
    assert len(lines) == 2 + len(system.equations)
