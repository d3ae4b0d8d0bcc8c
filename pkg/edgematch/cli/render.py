import sys

import numpy as np

from edgematch.cli.model import RunConfig
from edgematch.cli.router import CommandRouter, argument
from edgematch.exceptions import PuzzleFormatError
from edgematch.geometry.schema import load_placement, load_puzzle, read_json
from edgematch.lp.model import RelaxLPState
from edgematch.render.svg import (
    render_lp_trace,
    render_puzzle,
    render_rotation_copies,
    render_sdp_trace,
    to_string,
    write_svg,
)
from edgematch.sdp.model import RelaxSDPState
from edgematch.status import ExitCode

router = CommandRouter()


def trace_figure(puzzle, path):
    """SVG strip from the trace stored in a solve run report."""
    trace = read_json(path).get("trace")
    if not isinstance(trace, dict) or trace.get("kind") not in ("lp", "sdp"):
        raise PuzzleFormatError(f"{path} holds no iteration trace", {"path": str(path)})
    if trace["kind"] == "lp":
        state = RelaxLPState(
            n_pieces=trace["n_pieces"],
            copies=trace.get("copies", 1),
            matrices=[np.asarray(P, dtype=float) for P in trace["matrices"]],
        )
        return render_lp_trace(state)
    state = RelaxSDPState(
        n_pieces=puzzle.n_pieces,
        K=0,
        placements=[[tuple(t_) for t_ in translations] for translations in trace["placements"]],
    )
    return render_sdp_trace(puzzle, state)


@router.command(
    "render",
    help="draw a puzzle, a solution or an iteration strip as SVG",
    arguments=[
        argument("puzzle"),
        argument("--placement", help="placement file; defaults to the planted solution"),
        argument("--scrambled", action="store_true", help="draw the unsolved pieces"),
        argument("--trace", help="solve run report whose iterations are drawn as a strip"),
    ],
)
async def render(config: RunConfig, settings) -> ExitCode:
    puzzle, planted = load_puzzle(config.puzzle)
    if config.trace is not None:
        svg = trace_figure(puzzle, config.trace)
    else:
        placement = load_placement(config.placement) if config.placement is not None else planted
        if config.scrambled:
            placement = None
        if placement is not None and puzzle.rotation_order > 1:
            svg = render_rotation_copies(puzzle, placement, puzzle.rotation_order)
        else:
            svg = render_puzzle(puzzle, placement)

    if config.out is None:
        sys.stdout.write(to_string(svg) + "\n")
    else:
        write_svg(svg, config.out)
    return ExitCode.OK
