import math

import numpy as np
import pytest

from edgematch.algebra.model import MonomialFamily
from edgematch.algebra.service import assemble_system
from edgematch.exceptions import ContractViolationError, DuplicatePresetError
from edgematch.geometry.generator import generate_grid_puzzle
from edgematch.geometry.service import validate_solution
from edgematch.lp.model import LPStatus, PresetOptions, RelaxLPState
from edgematch.lp.service import (
    build_vandermonde,
    lp_iterate,
    round_to_permutation,
    solve_preset,
)
from edgematch.oracle.service import brute_force_solve
from tests.factories import PuzzleTestDataFactory


def pair_relaxation():
    puzzle, planted = PuzzleTestDataFactory.pair()
    system = assemble_system(puzzle)
    presets = system.normalization.apply_many(np.asarray(puzzle.preset_locations))
    return system, build_vandermonde(presets, system.max_degree)


def test_vandermonde_at_origin():
    Y = build_vandermonde([(0.0, 0.0)], 2)
    assert Y.matrix == pytest.approx(np.array([[1.0, 1.0]]))


def test_vandermonde_of_two_locations():
    Y = build_vandermonde([(-0.25, 0.0), (0.25, 0.0)], 1)
    assert Y.matrix[:, 0] == pytest.approx([math.exp(-0.25), math.exp(0.25)])


def test_vandermonde_real_layout():
    Y = build_vandermonde([(0.1, 0.2)], 2, family=MonomialFamily.REAL)
    assert [m.degree for m in Y.monomials] == [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert Y.matrix[0, 3] == pytest.approx(math.exp(0.3))


def test_vandermonde_with_rotated_copies():
    Y = build_vandermonde([(0.25, 0.0)], 1, copies=4)
    assert Y.n_cells == 1
    assert Y.locations[1] == pytest.approx([0.0, 0.25])


def test_vandermonde_rejects_duplicates():
    with pytest.raises(DuplicatePresetError):
        build_vandermonde([(0.1, 0.1), (0.1, 0.1)], 1)


def test_first_iterate_is_the_unique_permutation():
    # Given
    system, Y = pair_relaxation()

    # When
    P, objective = lp_iterate(system, Y, np.zeros((2, 2)))

    # Then
    assert P == pytest.approx(np.eye(2), abs=1e-8)
    assert objective == pytest.approx(0.0)


def test_feasible_permutation_is_a_fixed_point():
    # Given
    system, Y = pair_relaxation()

    # When
    P, objective = lp_iterate(system, Y, np.eye(2))

    # Then
    assert P == pytest.approx(np.eye(2), abs=1e-8)
    assert objective == pytest.approx(2.0)


def test_lp_iterate_checks_shape():
    system, Y = pair_relaxation()
    with pytest.raises(ContractViolationError):
        lp_iterate(system, Y, np.zeros((3, 3)))


def test_round_exact_and_nearly_exact_permutations():
    assert round_to_permutation(np.eye(3)[[2, 0, 1]]) == (2, 0, 1)
    nearly = np.array([[0.999999, 1e-6], [1e-6, 0.999999]])
    assert round_to_permutation(nearly, tol=1e-5) == (0, 1)


def test_round_fractional_matrix_needs_acceptance():
    half = np.full((2, 2), 0.5)
    assert round_to_permutation(half, accept=lambda selection: False) is None
    assert sorted(round_to_permutation(half, accept=lambda selection: True)) == [0, 1]


def test_round_rotated_selection_picks_best_copy():
    # Given: 2 pieces, 2 copies, columns are kappa * 2 + cell
    P = np.array([
        [0.1, 0.0, 0.6, 0.3],
        [0.0, 0.2, 0.0, 0.8],
    ])

    # When
    selection = round_to_permutation(P, accept=lambda s: True, copies=2)

    # Then
    assert selection == (2, 3)


def test_solve_distinct_grid_matches_the_oracle():
    # Given
    puzzle, planted = PuzzleTestDataFactory.distinct_grid()

    # When
    placement, state = solve_preset(puzzle, PresetOptions())

    # Then
    assert state.status == LPStatus.PERMUTATION_FOUND
    assert state.iteration <= 3
    assert placement.translations == planted.translations
    assert placement.assignment == planted.assignment
    assert brute_force_solve(puzzle).first.assignment == placement.assignment


def test_solve_needs_presets():
    puzzle, _ = PuzzleTestDataFactory.pair()
    with pytest.raises(ContractViolationError):
        solve_preset(puzzle.model_copy(update={"preset_locations": None}), PresetOptions())


def test_solve_empty_puzzle():
    puzzle = PuzzleTestDataFactory.empty().model_copy(update={"preset_locations": ()})
    placement, state = solve_preset(puzzle, PresetOptions())
    assert len(placement) == 0
    assert state.status == LPStatus.PERMUTATION_FOUND


def test_state_segments_and_monotonicity():
    # Given
    state = RelaxLPState(n_pieces=2)
    for objective in (0.0, 1.0, 1.5, 0.7, 1.2):
        state.record(np.eye(2), objective)
    state.perturbations.append(2)

    # Then
    assert state.segments() == [[0.0, 1.0, 1.5], [0.7, 1.2]]
    assert state.is_monotone()
    assert "iteration 2 objective 1.5 perturbed" in state.export_text()


def test_options_from_config(edgematch_config):
    opts = PresetOptions.from_config(edgematch_config, max_iter=5, seed=None)
    assert opts.max_iter == 5
    assert opts.seed == edgematch_config.LP.SEED
    assert opts.stall_window == 3


@pytest.mark.slow
def test_solve_six_by_six():
    # Given
    puzzle, _ = generate_grid_puzzle(6, 6, 6, seed=42)

    # When
    placement, state = solve_preset(puzzle, PresetOptions())

    # Then
    assert state.is_monotone()
    assert placement is not None
    assert validate_solution(puzzle, placement).is_valid


@pytest.mark.slow
def test_two_solution_grid_lands_on_a_solution():
    # Given
    puzzle, _ = PuzzleTestDataFactory.two_solution()
    solutions = brute_force_solve(puzzle)

    # When
    placement, state = solve_preset(puzzle, PresetOptions())

    # Then
    assert len(solutions) == 2
    assert state.is_monotone()
    assert placement is None or placement.assignment in [p.assignment for p in solutions.placements]
