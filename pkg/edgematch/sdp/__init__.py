from edgematch.sdp.model import MomentOptions, MomentStructure, RelaxSDPState, SDPStatus
from edgematch.sdp.service import (
    build_moment_structure,
    extract_locations,
    moment_constraints,
    moment_solver,
    sdp_iterate,
    solve_sdp_pipeline,
    update_weights,
)

__all__ = [
    "MomentOptions", "MomentStructure", "RelaxSDPState", "SDPStatus", "build_moment_structure",
    "extract_locations", "moment_constraints", "moment_solver", "sdp_iterate", "solve_sdp_pipeline",
    "update_weights",
]
