from edgematch.algebra.model import EvalMode, LinearEquation, Monomial, MonomialFamily, PolyEquation, PolySystem
from edgematch.algebra.service import (
    assemble_system,
    completeness_degrees,
    edge_coefficient,
    edge_coefficient_nd,
    export_system,
    linear_matrix,
    linear_representation,
    monomial_values,
    monomials_for,
    residual,
)
from edgematch.algebra.rotation import augment_rotations, recover_orientation
