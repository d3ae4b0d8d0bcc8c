from edgematch.lp.model import LPStatus, PresetOptions, PresetVandermonde, RelaxLPState
from edgematch.lp.service import (
    build_vandermonde,
    contribution_tensor,
    lp_iterate,
    preset_solver,
    relaxation_constraints,
    round_to_permutation,
    solve_preset,
    solve_rotated,
)

__all__ = [
    "LPStatus", "PresetOptions", "PresetVandermonde", "RelaxLPState", "build_vandermonde",
    "contribution_tensor", "lp_iterate", "preset_solver", "relaxation_constraints",
    "round_to_permutation", "solve_preset", "solve_rotated",
]
