from edgematch.kernels.dump import dump_lp, dump_sdp
from edgematch.kernels.linalg import max_assignment, sym_eig
from edgematch.kernels.model import (
    BlockKind,
    BlockSDP,
    LinearProgram,
    SDPBlock,
    SDPConstraint,
    SolveReport,
    SolveStatus,
)
from edgematch.kernels.sdp import solve_block_sdp
from edgematch.kernels.simplex import solve_lp

__all__ = [
    "BlockKind", "BlockSDP", "LinearProgram", "SDPBlock", "SDPConstraint", "SolveReport", "SolveStatus",
    "dump_lp", "dump_sdp", "max_assignment", "solve_block_sdp", "solve_lp", "sym_eig",
]
