import sys
import time
import typing as t

import numpy as np
from edgematch.cli.model import SCHEMA_VERSION, Method, RunConfig
from edgematch.cli.router import CommandRouter, argument
from edgematch.exceptions import ContractViolationError
from edgematch.geometry.model import Placement, Puzzle
from edgematch.geometry.schema import (
    dump_json,
    load_placement,
    load_puzzle,
    placement_document,
    save_placement,
    write_json,
)
from edgematch.geometry.service import validate_solution
from edgematch.log import get_logger
from edgematch.lp.service import preset_solver
from edgematch.oracle.service import oracle_service
from edgematch.sdp.service import moment_solver
from edgematch.status import ExitCode

logger = get_logger(__name__)

router = CommandRouter()


def solve_puzzle(puzzle: Puzzle, config: RunConfig) -> t.Tuple[t.Optional[Placement], t.Dict[str, t.Any]]:
    """Runs one method and returns the placement with a JSON-ready run report."""
    started = time.perf_counter()
    report: t.Dict[str, t.Any] = {"schema_version": SCHEMA_VERSION, "method": config.method.value}

    if config.method == Method.LP:
        if puzzle.preset_locations is None:
            raise ContractViolationError("--method lp needs preset locations", {"pieces": puzzle.n_pieces})
        placement, state = preset_solver.solve(
            puzzle,
            rotations=config.rotations or puzzle.rotation_order,
            max_iter=config.max_iter,
            tol_round=config.tol,
            degree_cap=config.degree_cap,
            seed=config.seed,
        )
        report.update(
            status=state.status.value,
            iterations=state.iteration,
            objective_history=state.objective_history,
            perturbations=state.perturbations,
            degree_capped=state.degree_capped,
            trace={"kind": "lp", "n_pieces": state.n_pieces, "copies": state.copies,
                   "matrices": [np.round(P, 12) for P in state.matrices]},
        )
    elif config.method == Method.SDP:
        if (config.rotations or 1) > 1:
            raise ContractViolationError("--method sdp solves translation-only puzzles", {"rotations": config.rotations})
        placement, state = moment_solver.solve(
            puzzle,
            max_iter=config.max_iter,
            degree=config.degree_cap,
            epsilon_per_piece=config.tol,
        )
        report.update(
            status=state.status.value,
            iterations=state.iteration,
            objective_history=state.objective_history,
            rank_gaps=state.rank_gaps,
            trace={"kind": "sdp", "placements": state.placements},
        )
    else:
        solutions = oracle_service.solve(puzzle, tol=config.tol)
        placement = solutions.first
        report.update(
            status="solved" if placement is not None else "no_solution",
            iterations=solutions.nodes,
            solutions=len(solutions),
            exhausted=solutions.exhausted,
        )

    report["solved"] = placement is not None
    report["wall_time"] = time.perf_counter() - started
    if placement is not None:
        report["placement"] = placement_document(placement)
    return placement, report


@router.command(
    "solve",
    help="solve a puzzle file and write the placement plus a run report",
    arguments=[
        argument("puzzle"),
        argument("--report", help="run report path (default: <out>.report.json)"),
    ],
)
async def solve(config: RunConfig, settings) -> ExitCode:
    puzzle, _ = load_puzzle(config.puzzle)
    placement, report = solve_puzzle(puzzle, config)

    report_path = config.report
    if report_path is None and config.out is not None:
        report_path = config.out.with_suffix(".report.json")
    if report_path is not None:
        write_json(report_path, report)
    if placement is not None:
        if config.out is not None:
            save_placement(config.out, placement)
        else:
            sys.stdout.write(dump_json(placement_document(placement)) + "\n")
    logger.info("%s: %s after %s iterations", config.method.value, report["status"], report["iterations"])
    return ExitCode.OK if placement is not None else ExitCode.UNSOLVED


@router.command(
    "verify",
    help="check a placement against a puzzle; exits 0 only for a valid solution",
    arguments=[
        argument("puzzle"),
        argument("--placement", help="placement file (default: the puzzle's planted solution)"),
    ],
)
async def verify(config: RunConfig, settings) -> ExitCode:
    puzzle, planted = load_puzzle(config.puzzle)
    placement = load_placement(config.placement) if config.placement is not None else planted
    if placement is None:
        raise ContractViolationError("no placement given and the puzzle has no planted solution", {})
    tol = config.tol or settings.GEOMETRY.TOLERANCE
    result = validate_solution(puzzle, placement, tol)
    sys.stdout.write(dump_json(result.model_dump(mode="json")) + "\n")
    return ExitCode.OK if result.is_valid else ExitCode.UNSOLVED
