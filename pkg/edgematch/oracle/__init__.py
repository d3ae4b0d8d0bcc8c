from edgematch.oracle.model import SearchMode, SolutionSet, WitnessReport
from edgematch.oracle.service import (
    brute_force_solve,
    elementary_symmetric,
    estimate_nodes,
    lemma2_witness_test,
    newton_elementary,
    oracle_service,
    power_sum_check,
)

__all__ = [
    "SearchMode", "SolutionSet", "WitnessReport", "brute_force_solve", "elementary_symmetric",
    "estimate_nodes", "lemma2_witness_test", "newton_elementary", "oracle_service", "power_sum_check",
]
