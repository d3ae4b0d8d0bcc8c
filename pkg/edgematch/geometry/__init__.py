from edgematch.geometry.model import (
    AffineTransform,
    EdgeElement,
    Frame,
    Piece,
    Placement,
    Puzzle,
    TypeKey,
    UnmatchedEdge,
    ValidityReport,
)
from edgematch.geometry.service import (
    canonical_edge_type,
    check_solvable,
    edge_type_counts,
    is_balanced,
    normalize_coordinates,
    transform_placement,
    transform_puzzle,
    validate_solution,
)
from edgematch.geometry.schema import load_placement, load_puzzle, save_placement, save_puzzle
from edgematch.geometry.generator import (
    generate_grid_puzzle,
    load_bundled,
    scramble_orientations,
    two_solution_grid_puzzle,
)
