import numpy as np
import pytest

from edgematch.exceptions import ContractViolationError, DegenerateWitnessError, SearchSpaceTooLargeError
from edgematch.geometry.service import validate_solution
from edgematch.oracle.model import SearchMode
from edgematch.oracle.service import (
    brute_force_solve,
    elementary_symmetric,
    estimate_nodes,
    lemma2_witness_test,
    newton_elementary,
    power_sum_check,
)
from tests.factories import PuzzleTestDataFactory


def test_single_piece_has_one_solution():
    # Given
    puzzle, planted = PuzzleTestDataFactory.single()

    # When
    solutions = brute_force_solve(puzzle)

    # Then
    assert len(solutions) == 1
    assert solutions.exhausted
    assert solutions.mode == SearchMode.PRESET
    assert np.asarray(solutions.first.translations) == pytest.approx(np.asarray(planted.translations))


def test_distinct_grid_has_the_planted_solution_only():
    puzzle, planted = PuzzleTestDataFactory.distinct_grid()
    solutions = brute_force_solve(puzzle)
    assert len(solutions) == 1
    assert solutions.first.assignment == planted.assignment


def test_two_solution_grid():
    # Given
    puzzle, planted = PuzzleTestDataFactory.two_solution()

    # When
    solutions = brute_force_solve(puzzle)

    # Then
    assert len(solutions) == 2
    assert planted.assignment in [placement.assignment for placement in solutions.placements]
    assert all(validate_solution(puzzle, placement).is_valid for placement in solutions.placements)


def test_limit_stops_the_search():
    puzzle, _ = PuzzleTestDataFactory.two_solution()
    solutions = brute_force_solve(puzzle, limit=1)
    assert len(solutions) == 1
    assert not solutions.exhausted


def test_anchoring_without_presets():
    # Given
    puzzle, _ = PuzzleTestDataFactory.pair()
    puzzle = puzzle.model_copy(update={"preset_locations": None})

    # When
    solutions = brute_force_solve(puzzle)

    # Then
    assert solutions.mode == SearchMode.ANCHORING
    assert len(solutions) == 1
    assert validate_solution(puzzle, solutions.first).is_valid


def test_search_space_estimate():
    puzzle, _ = PuzzleTestDataFactory.distinct_grid()
    assert estimate_nodes(puzzle) == 24


def test_large_search_is_refused():
    puzzle, _ = PuzzleTestDataFactory.one_color_grid(6, 6)
    with pytest.raises(SearchSpaceTooLargeError):
        brute_force_solve(puzzle)


def test_bad_limit():
    puzzle, _ = PuzzleTestDataFactory.single()
    with pytest.raises(ContractViolationError):
        brute_force_solve(puzzle, limit=0)


@pytest.mark.parametrize(
    "u, v, K, expected",
    [
        ((2, 1), (1, 2), 2, 0.0),
        ((1.5, 1.5), (1, 2), 1, 0.0),
        ((1.5, 1.5), (1, 2), 2, 0.5),
        ((1j, 2), (1j, 2), 3, 0.0),
    ],
)
def test_power_sums(u, v, K, expected):
    assert power_sum_check(u, v, K) == pytest.approx(expected, abs=1e-12)


def test_power_sums_need_equal_lengths():
    with pytest.raises(ContractViolationError):
        power_sum_check((1, 2), (1,), 2)


def test_witness_real():
    # When
    report = lemma2_witness_test((1.0, 2.0, 3.0), trials=200, seed=0)

    # Then
    assert report.passed
    assert report.permutations == 6
    assert report.permutation_violation <= 1e-10
    assert report.min_witness_violation > 1e-6


def test_witness_complex():
    report = lemma2_witness_test((1 + 1j, 2), trials=200, seed=1, K=2)
    assert report.passed
    assert report.K == 2


def test_witness_rejects_repeats():
    with pytest.raises(DegenerateWitnessError):
        lemma2_witness_test((1.0, 1.0, 2.0))


def test_witness_size_limit():
    with pytest.raises(ContractViolationError):
        lemma2_witness_test((1, 2, 3, 4, 5))


def test_newton_identities_match_the_polynomial():
    # Given
    values = np.array([1.0, 2.0, 3.0 + 1j])
    power_sums = [np.sum(values ** k) for k in range(1, 4)]

    # When
    from_powers = newton_elementary(power_sums)

    # Then
    assert elementary_symmetric([1, 2, 3]) == pytest.approx([6, 11, 6])
    assert from_powers == pytest.approx(elementary_symmetric(values))


@pytest.mark.asyncio
async def test_oracle_service_reads_settings(services, get_service):
    # Given
    puzzle, _ = PuzzleTestDataFactory.two_solution()

    # When
    solutions = get_service("OracleService").solve(puzzle, limit=1)

    # Then
    assert len(solutions) == 1
