"""Axiom checkers and numeric verification of the Sampford lemmas."""

from .axioms import (check_full_support, check_lipschitz, check_pairwise_selection,
                     check_pairwise_threshold, check_selection_monotonicity,
                     check_strengthened_selection, check_threshold_monotonicity,
                     check_two_coordinate_lipschitz, check_vote_count_variants)
from .lemmas import (ShiftWitness, canonical_order, check_house_monotonicity_witness,
                     check_sampford_derivative, construct_shift,
                     sampford_directional_derivative, verify_denominator_identity,
                     verify_derivative_formula, verify_expectation_bound,
                     verify_probability_bound, verify_telescoping_step)
from .verdict import AuditVerdict, Outcome

AXIOMS = {
    "selection": check_selection_monotonicity,
    "pairwise-selection": check_pairwise_selection,
    "strengthened-selection": check_strengthened_selection,
    "threshold": check_threshold_monotonicity,
    "pairwise-threshold": check_pairwise_threshold,
    "vote-count": check_vote_count_variants,
    "lipschitz": check_lipschitz,
    "full-support": check_full_support,
}

__all__ = [
    "AXIOMS", "AuditVerdict", "Outcome", "ShiftWitness", "canonical_order",
    "check_full_support", "check_house_monotonicity_witness", "check_lipschitz",
    "check_pairwise_selection", "check_pairwise_threshold", "check_sampford_derivative",
    "check_selection_monotonicity", "check_strengthened_selection",
    "check_threshold_monotonicity", "check_two_coordinate_lipschitz",
    "check_vote_count_variants", "construct_shift", "sampford_directional_derivative",
    "verify_denominator_identity", "verify_derivative_formula", "verify_expectation_bound",
    "verify_probability_bound", "verify_telescoping_step",
]
