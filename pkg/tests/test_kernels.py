import itertools

import numpy as np
import pytest
from scipy.optimize import linprog

from edgematch.exceptions import ContractViolationError
from edgematch.kernels import (
    BlockKind,
    BlockSDP,
    LinearProgram,
    SDPBlock,
    SDPConstraint,
    SolveStatus,
    dump_lp,
    dump_sdp,
    max_assignment,
    solve_block_sdp,
    solve_lp,
    sym_eig,
)


def lp(c, A, b) -> LinearProgram:
    return LinearProgram(objective=np.asarray(c, dtype=float), equality_matrix=np.asarray(A, dtype=float),
                         equality_rhs=np.asarray(b, dtype=float))


def single_block(cost, constraints) -> BlockSDP:
    cost = np.asarray(cost, dtype=float)
    return BlockSDP(
        blocks=(SDPBlock(kind=BlockKind.SEMIDEFINITE, dimension=len(cost), cost=cost),),
        constraints=tuple(SDPConstraint(coefficients={0: np.asarray(A, dtype=float)}, rhs=b) for A, b in constraints),
    )


def test_simplex_vertex_optimum():
    # When
    report = solve_lp(lp([-1.0, 0.0], [[1.0, 1.0]], [1.0]))

    # Then
    assert report.status == SolveStatus.OPTIMAL
    assert report.primal == pytest.approx([1.0, 0.0])
    assert report.objective == pytest.approx(-1.0)


@pytest.mark.parametrize("pivot_rule", ["dantzig", "bland"])
def test_simplex_birkhoff_two_by_two(pivot_rule):
    # Given: p11, p12, p21, p22 with all four marginals, one of them redundant
    A = [
        [1, 1, 0, 0],
        [0, 0, 1, 1],
        [1, 0, 1, 0],
        [0, 1, 0, 1],
    ]

    # When
    report = solve_lp(lp([-1, 0, 0, -1], A, [1, 1, 1, 1]), pivot_rule=pivot_rule)

    # Then
    assert report.is_optimal
    assert report.primal == pytest.approx([1.0, 0.0, 0.0, 1.0])
    assert report.objective == pytest.approx(-2.0)
    assert report.residuals[0] <= 1e-9


def test_simplex_detects_contradiction():
    report = solve_lp(lp([0.0], [[1.0], [1.0]], [1.0, 2.0]))
    assert report.status == SolveStatus.INFEASIBLE


def test_simplex_handles_negative_rhs():
    report = solve_lp(lp([1.0, 1.0], [[-1.0, -2.0]], [-4.0]))
    assert report.is_optimal
    assert report.objective == pytest.approx(2.0)


def test_simplex_matches_reference_solver():
    # Given
    rng = np.random.default_rng(3)
    A = rng.uniform(0.1, 1.0, size=(6, 14))
    b = A @ rng.uniform(0.5, 1.5, size=14)
    c = rng.uniform(-1.0, 1.0, size=14)
    # bounded: every variable is capped by the positive rows
    reference = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")

    # When
    report = solve_lp(lp(c, A, b))

    # Then
    assert reference.status == 0
    assert report.is_optimal
    assert report.objective == pytest.approx(reference.fun, rel=1e-7, abs=1e-9)
    assert np.abs(A @ report.primal - b).max() <= 1e-8


def test_simplex_rejects_unknown_pivot_rule():
    with pytest.raises(ContractViolationError):
        solve_lp(lp([1.0], [[1.0]], [1.0]), pivot_rule="steepest")


def test_linear_program_checks_shapes():
    with pytest.raises(ValueError):
        lp([1.0, 2.0], [[1.0]], [1.0])


def test_sdp_trace_with_fixed_corner():
    # When
    report = solve_block_sdp(single_block(np.eye(2), [([[1, 0], [0, 0]], 1.0)]))

    # Then
    assert report.is_optimal
    assert report.objective == pytest.approx(1.0, abs=1e-5)
    assert report.primal[0] == pytest.approx(np.array([[1.0, 0.0], [0.0, 0.0]]), abs=1e-3)
    assert report.primal[0][1, 1] <= 1e-4


def test_sdp_off_diagonal_forces_rank_one():
    # When
    report = solve_block_sdp(single_block(np.eye(2), [
        ([[1, 0], [0, 0]], 1.0),
        ([[0, 0.5], [0.5, 0]], 1.0),
    ]))

    # Then
    assert report.is_optimal
    assert report.objective == pytest.approx(2.0, abs=1e-5)
    assert report.primal[0][1, 1] == pytest.approx(1.0, abs=1e-4)


def test_sdp_without_constraints_reaches_the_apex():
    report = solve_block_sdp(single_block(np.eye(3), []))
    assert report.is_optimal
    assert report.objective == pytest.approx(0.0, abs=1e-5)
    assert np.abs(report.primal[0]).max() <= 1e-4


def test_sdp_with_nonnegative_block():
    # Given: minimize x1 + 2 x2 with x1 + x2 = 1 over the orthant
    sdp = BlockSDP(
        blocks=(SDPBlock(kind=BlockKind.NONNEGATIVE, dimension=2, cost=np.array([1.0, 2.0])),),
        constraints=(SDPConstraint(coefficients={0: np.array([1.0, 1.0])}, rhs=1.0),),
    )

    # When
    report = solve_block_sdp(sdp)

    # Then
    assert report.is_optimal
    assert report.primal[0] == pytest.approx([1.0, 0.0], abs=1e-5)


def test_sdp_rejects_asymmetric_cost():
    with pytest.raises(ValueError):
        SDPBlock(kind=BlockKind.SEMIDEFINITE, dimension=2, cost=np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_sym_eig_of_diagonal():
    # When
    values, vectors = sym_eig(np.diag([3.0, 1.0, 2.0]))

    # Then
    assert values == pytest.approx([3.0, 2.0, 1.0])
    assert vectors == pytest.approx(np.eye(3)[:, [0, 2, 1]])


def test_sym_eig_of_rank_one():
    # Given
    u = np.array([1.0, -2.0, 2.0]) / 3.0

    # When
    values, vectors = sym_eig(np.outer(u, u))

    # Then
    assert values == pytest.approx([1.0, 0.0, 0.0], abs=1e-12)
    assert abs(vectors[:, 0] @ u) == pytest.approx(1.0)
    assert vectors[0, 0] > 0


def test_sym_eig_reconstructs_random_matrix():
    rng = np.random.default_rng(0)
    M = rng.normal(size=(10, 10))
    M = M + M.T
    values, vectors = sym_eig(M)
    assert np.abs(vectors @ np.diag(values) @ vectors.T - M).max() <= 1e-10
    assert np.all(np.diff(values) <= 0)


def test_sym_eig_breaks_ties_deterministically():
    _, vectors = sym_eig(np.diag([1.0, 1.0, 0.0]))
    assert vectors[:, :2] == pytest.approx(np.eye(3)[:, :2])


def test_max_assignment_examples():
    assert max_assignment(np.eye(3)).tolist() == [0, 1, 2]
    assert max_assignment(np.array([[0.9, 0.1], [0.8, 0.2]])).tolist() == [0, 1]


def test_max_assignment_matches_enumeration():
    # Given
    weights = np.random.default_rng(5).uniform(size=(6, 6))

    # When
    assignment = max_assignment(weights)

    # Then
    best = max(itertools.permutations(range(6)), key=lambda p: weights[np.arange(6), list(p)].sum())
    assert weights[np.arange(6), assignment].sum() == pytest.approx(weights[np.arange(6), list(best)].sum())


def test_max_assignment_rejects_tall_matrix():
    with pytest.raises(ContractViolationError):
        max_assignment(np.ones((3, 2)))


def test_dump_lp_layout():
    text = dump_lp(lp([-1.0, 0.0], [[1.0, 1.0]], [1.0]), name="TINY")
    lines = text.splitlines()
    assert lines[0].split() == ["NAME", "TINY"]
    assert " E  R1" in lines
    assert lines[-1] == "ENDATA"
    assert any(line.split()[:2] == ["X1", "COST"] for line in lines)


def test_dump_sdp_layout():
    # Given
    sdp = BlockSDP(
        blocks=(
            SDPBlock(kind=BlockKind.SEMIDEFINITE, dimension=2, cost=np.eye(2)),
            SDPBlock(kind=BlockKind.NONNEGATIVE, dimension=3, cost=np.zeros(3)),
        ),
        constraints=(SDPConstraint(coefficients={0: np.array([[1.0, 0.0], [0.0, 0.0]])}, rhs=1.0),),
    )

    # When
    lines = dump_sdp(sdp).splitlines()

    # Then
    assert lines[0] == "1 = mDIM"
    assert lines[1] == "2 = nBLOCK"
    assert lines[2] == "2 -3 = bLOCKsTRUCT"
    assert lines[3] == "1.0"
    assert "0 1 1 1 -1.0" in lines
    assert "1 1 1 1 1.0" in lines
