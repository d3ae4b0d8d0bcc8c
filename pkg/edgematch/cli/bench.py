import asyncio
import statistics
import sys
import time
import typing as t
from concurrent.futures import ThreadPoolExecutor

from edgematch.cli.model import SCHEMA_VERSION, Method, RunConfig
from edgematch.cli.router import CommandRouter, argument
from edgematch.config import worker_count
from edgematch.exceptions import BaseCustomException
from edgematch.geometry.generator import generate_grid_puzzle, scramble_orientations
from edgematch.geometry.schema import write_json
from edgematch.geometry.service import validate_solution
from edgematch.log import get_logger
from edgematch.lp.service import preset_solver
from edgematch.oracle.service import oracle_service
from edgematch.status import ExitCode

logger = get_logger(__name__)

router = CommandRouter()

TABLE_HEADER = f"{'seed':>6} {'solved':>7} {'status':>18} {'iters':>6} {'time[s]':>9}"


def bench_one(config: RunConfig, settings, seed: int) -> t.Dict[str, t.Any]:
    """Generates and solves one seeded grid; wall time is kept out of the reproducible fields."""
    rotations = config.rotations or 1
    origin = (1.0, 1.0) if rotations > 1 else (0.0, 0.0)
    puzzle, planted = generate_grid_puzzle(
        config.rows or settings.BENCH.ROWS,
        config.cols or settings.BENCH.COLS,
        config.colors or settings.BENCH.COLORS,
        seed,
        origin,
    )
    if rotations > 1:
        puzzle, _ = scramble_orientations(puzzle, planted, rotations, seed)

    started = time.perf_counter()
    row: t.Dict[str, t.Any] = {"seed": seed}
    try:
        if config.method == Method.BRUTE:
            solutions = oracle_service.solve(puzzle, limit=1, tol=config.tol)
            placement, status, iterations = solutions.first, "searched", solutions.nodes
        else:
            placement, state = preset_solver.solve(
                puzzle,
                rotations=rotations,
                max_iter=config.max_iter,
                tol_round=config.tol,
                degree_cap=config.degree_cap,
                seed=seed,
            )
            status, iterations = state.status.value, state.iteration
        solved = placement is not None and validate_solution(puzzle, placement, settings.GEOMETRY.TOLERANCE).is_valid
    except BaseCustomException as e:
        logger.warning("seed %d failed: %s", seed, e)
        solved, status, iterations = False, e.error_code.value, 0
    row.update(solved=solved, status=status, iterations=iterations)
    row["wall_time"] = time.perf_counter() - started
    return row


def summary(rows: t.Sequence[t.Dict[str, t.Any]]) -> t.Dict[str, t.Any]:
    if not rows:
        return {"runs": 0, "success_rate": 0.0, "median_iterations": 0.0, "median_wall_time": 0.0}
    return {
        "runs": len(rows),
        "success_rate": sum(row["solved"] for row in rows) / len(rows),
        "median_iterations": float(statistics.median(row["iterations"] for row in rows)),
        "median_wall_time": float(statistics.median(row["wall_time"] for row in rows)),
    }


def format_table(rows: t.Sequence[t.Dict[str, t.Any]], totals: t.Dict[str, t.Any]) -> str:
    lines = [TABLE_HEADER]
    for row in rows:
        lines.append(
            f"{row['seed']:>6} {str(row['solved']).lower():>7} {row['status']:>18} "
            f"{row['iterations']:>6} {row['wall_time']:>9.3f}"
        )
    lines.append(
        f"success {totals['success_rate']:.2%}  median iterations {totals['median_iterations']:g}  "
        f"median time {totals['median_wall_time']:.3f}s"
    )
    return "\n".join(lines)


async def run_batch(config: RunConfig, settings) -> t.List[t.Dict[str, t.Any]]:
    first = settings.LP.SEED if config.seed is None else config.seed
    seeds = range(first, first + (config.runs or settings.BENCH.RUNS))
    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=worker_count(settings)) as pool:
        rows = await asyncio.gather(*[
            loop.run_in_executor(pool, bench_one, config, settings, seed) for seed in seeds
        ])
    return sorted(rows, key=lambda row: row["seed"])


@router.command(
    "bench",
    help="solve a seeded batch of grid puzzles and summarize",
    arguments=[
        argument("--runs", type=int),
        argument("--rows", type=int),
        argument("--cols", type=int),
        argument("--colors", type=int),
        argument("--report", help="JSON report path"),
    ],
)
async def bench(config: RunConfig, settings) -> ExitCode:
    rows = await run_batch(config, settings)
    totals = summary(rows)
    sys.stdout.write(format_table(rows, totals) + "\n")

    report_path = config.report or config.out
    if report_path is not None:
        write_json(report_path, {
            "schema_version": SCHEMA_VERSION,
            "method": config.method.value,
            "runs": [{key: value for key, value in row.items() if key != "wall_time"} for row in rows],
            "success_rate": totals["success_rate"],
            "median_iterations": totals["median_iterations"],
        })
    return ExitCode.OK
