"""k-uniformity checks and purity-spectrum classification."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .reductions import purity_spectrum, reduced_density
from .state import QubitSubset, StateVector

DEFAULT_TOL = 1e-9
DEFAULT_BUCKET_TOL = 1e-6
NINE_QUBIT_FLOOR = 1 / 14


@dataclass(frozen=True)
class UniformityVerdict:
    k: int
    uniform: bool
    worst_subset: QubitSubset
    worst_deviation: float
    worst_matrix_deviation: float
    tol: float


@dataclass(frozen=True)
class MmesVerdict:
    pi_me: float
    gap_to_bound: float
    is_mmes: bool
    is_ame: bool
    spectrum_histogram: dict[float, int]


def is_k_uniform(state: StateVector, k: int, tol: float = DEFAULT_TOL) -> UniformityVerdict:
    """Every k-qubit marginal has purity 2^-k (so equals the identity over 2^k)."""
    if not 1 <= k <= state.n // 2:
        raise ValueError(f"order must be in [1, {state.n // 2}], got {k}")
    spectrum = purity_spectrum(state, k)
    deviations = np.abs(spectrum.values() - 2.0**-k)
    worst = int(np.argmax(deviations))
    subset = spectrum.entries[worst][0]
    rho = reduced_density(state, subset).entries
    matrix_dev = float(np.max(np.abs(rho - np.eye(2**k) / 2**k)))
    return UniformityVerdict(k, bool(deviations[worst] <= tol), subset, float(deviations[worst]), matrix_dev, tol)


def bucket_values(values, bucket_tol: float = DEFAULT_BUCKET_TOL) -> dict[float, int]:
    """Group sorted values into runs whose neighbors sit within bucket_tol."""
    groups: list[list[float]] = []
    for value in sorted(float(v) for v in values):
        if groups and value - groups[-1][-1] <= bucket_tol:
            groups[-1].append(value)
        else:
            groups.append([value])
    return {math.fsum(g) / len(g): len(g) for g in groups}


def classify_marginals(state: StateVector, k: int, bucket_tol: float = DEFAULT_BUCKET_TOL) -> dict[float, int]:
    """Histogram of the size-k marginal purities, value -> count."""
    return bucket_values(purity_spectrum(state, k).values(), bucket_tol)


def mmes_verdict(state: StateVector, tol: float = DEFAULT_TOL) -> MmesVerdict:
    """Compare a nine-qubit state's balanced purity with the 1/14 floor."""
    if state.n != 9:
        raise ValueError(f"the 1/14 criterion is for nine qubits, got n={state.n}")
    values = purity_spectrum(state, 4).values()
    pi_me = math.fsum(values) / len(values)
    gap = pi_me - NINE_QUBIT_FLOOR
    is_ame = bool(np.all(np.abs(values - 1 / 16) <= tol))
    is_mmes = abs(gap) <= tol
    return MmesVerdict(pi_me, gap, bool(is_mmes), is_ame, bucket_values(values))
