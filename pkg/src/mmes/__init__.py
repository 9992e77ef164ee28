"""Balanced-purity analysis of multi-qubit pure states."""

from .state import (
    QubitSubset,
    StateVector,
    ghz_state,
    make_state,
    product_state,
    random_state,
    read_state,
    write_state,
    zha_nine_qubit_state,
)
from .reductions import average_balanced_purity, purity, purity_spectrum, reduced_density
from .invariants import (
    PauliString,
    aggregate_invariants,
    complement_inversion_sum,
    correlation_invariant,
    inversion_identity_residual,
    inversion_overlap,
    pauli_expectation,
    pi_me_from_invariants,
    pi_me_lower_bound_form,
    purity_from_invariants,
)
from .uniformity import classify_marginals, is_k_uniform, mmes_verdict
from .optimizer import SearchConfig, gradient_check, minimize_pi_me

__version__ = "0.1.0"
