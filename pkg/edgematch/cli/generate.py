import sys

from edgematch.cli.model import PuzzleKind, RunConfig
from edgematch.cli.router import CommandRouter, argument
from edgematch.geometry.generator import (
    generate_grid_puzzle,
    load_bundled,
    scramble_orientations,
    two_solution_grid_puzzle,
)
from edgematch.geometry.schema import dump_json, puzzle_document, save_puzzle
from edgematch.log import get_logger
from edgematch.status import ExitCode

logger = get_logger(__name__)

router = CommandRouter()

# rotated frame copies must stay disjoint, so rotation puzzles move off the origin
ROTATION_ORIGIN = (1.0, 1.0)


@router.command(
    "generate",
    help="write a puzzle file with its planted solution",
    arguments=[
        argument("--kind", choices=[kind.value for kind in PuzzleKind], default=None),
        argument("--rows", type=int),
        argument("--cols", type=int),
        argument("--colors", type=int),
        argument("--name", help="bundled instance name"),
    ],
)
async def generate(config: RunConfig, settings) -> ExitCode:
    seed = settings.LP.SEED if config.seed is None else config.seed
    rotations = config.rotations or 1
    origin = ROTATION_ORIGIN if rotations > 1 else (0.0, 0.0)

    if config.kind == PuzzleKind.BUNDLED:
        puzzle, planted = load_bundled(config.name)
    elif config.kind == PuzzleKind.TWO_SOLUTION:
        puzzle, planted = two_solution_grid_puzzle(origin)
    else:
        puzzle, planted = generate_grid_puzzle(
            config.rows or settings.BENCH.ROWS,
            config.cols or settings.BENCH.COLS,
            config.colors or settings.BENCH.COLORS,
            seed,
            origin,
        )
    if rotations > 1:
        puzzle, planted = scramble_orientations(puzzle, planted, rotations, seed)

    if config.out is None:
        sys.stdout.write(dump_json(puzzle_document(puzzle, planted)) + "\n")
    else:
        save_puzzle(config.out, puzzle, planted)
        logger.info("wrote %d-piece puzzle to %s", puzzle.n_pieces, config.out)
    return ExitCode.OK
