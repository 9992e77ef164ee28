"""Pauli correlation invariants and the invariant forms of the balanced purity.

The aggregate formulas here are specific to nine qubits, where the balanced
cut has four qubits on the small side.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .reductions import bipartite_matrix, reduced_density, subsets_of_size
from .state import QubitSubset, StateVector, as_subset

LETTERS = "xyz"
MAX_SUPPORT = 4
IMAG_TOL = 1e-9


@dataclass(frozen=True)
class PauliString:
    """Non-identity Pauli letters on a support; identity elsewhere."""

    support: QubitSubset
    letters: str

    def __post_init__(self):
        support = self.support
        if not isinstance(support, (QubitSubset, str)):
            # letters pair with labels positionally, so never reorder them
            support = QubitSubset(tuple(int(q) for q in support))
        support = as_subset(support)
        letters = self.letters.lower()
        if len(letters) != len(support):
            raise ValueError("need exactly one letter per support qubit")
        if set(letters) - set(LETTERS):
            raise ValueError(f"letters must be drawn from {LETTERS!r}: {self.letters!r}")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "letters", letters)

    def masks(self, n: int) -> tuple[int, int, int]:
        """(flip mask, phase mask, number of y letters) in the index bit layout."""
        flip = phase = 0
        for q, letter in zip(self.support.check(n), self.letters):
            bit = 1 << (n - q)
            if letter in "xy":
                flip |= bit
            if letter in "yz":
                phase |= bit
        return flip, phase, self.letters.count("y")

    def __str__(self) -> str:
        return " ".join(f"{c}{q}" for q, c in zip(self.support, self.letters))


@lru_cache(maxsize=None)
def _indices(n: int) -> np.ndarray:
    return np.arange(2**n, dtype=np.int64)


def _parity_signs(values: np.ndarray) -> np.ndarray:
    """(-1)^popcount(v) as float."""
    return 1.0 - 2.0 * (np.bitwise_count(values) & 1)


def pauli_expectation(state: StateVector, pauli: PauliString) -> float:
    """<psi|P|psi> using P|x> = i^ny (-1)^popcount(x & z) |x ^ flip>."""
    flip, phase, ny = pauli.masks(state.n)
    idx = _indices(state.n)
    psi = state.amplitudes
    signs = _parity_signs(idx & phase)
    value = (1j**ny) * np.vdot(psi[idx ^ flip], signs * psi)
    if abs(value.imag) > IMAG_TOL:
        raise ArithmeticError(f"expectation of {pauli} has imaginary part {value.imag:.3e}")
    return float(value.real)


def pauli_strings(subset) -> list[PauliString]:
    """All 3^|S| strings on exactly the support S, in base-3 (x, y, z) order."""
    subset = as_subset(subset)
    return [PauliString(subset, "".join(w)) for w in itertools.product(LETTERS, repeat=len(subset))]


@lru_cache(maxsize=None)
def _support_tables(n: int, labels: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-string source indices, signs and i^ny phases for one support."""
    masks = [p.masks(n) for p in pauli_strings(QubitSubset(labels))]
    flips, phases, ny = (np.array(col) for col in zip(*masks))
    idx = _indices(n)
    sources = (idx[None, :] ^ flips[:, None]).astype(np.int32)
    signs = _parity_signs(idx[None, :] & phases[:, None]).astype(np.int8)
    return sources, signs, 1j**ny


def expectations_on_support(state: StateVector, subset) -> np.ndarray:
    """Expectations of all full-support strings on S, same order as pauli_strings."""
    subset = as_subset(subset, state.n)
    sources, signs, phases = _support_tables(state.n, subset.labels)
    psi = state.amplitudes
    values = phases * np.einsum("sx,sx->s", psi[sources].conj(), signs * psi)
    if np.max(np.abs(values.imag)) > IMAG_TOL:
        raise ArithmeticError(f"Pauli expectations on {subset} are not real")
    return values.real


def correlation_invariant(state: StateVector, subset) -> float:
    """Sum of squared expectations over every full-support Pauli string on S."""
    subset = as_subset(subset, state.n)
    if len(subset) > MAX_SUPPORT:
        raise ValueError(f"support size {len(subset)} exceeds {MAX_SUPPORT}")
    return math.fsum(expectations_on_support(state, subset) ** 2)


@dataclass(frozen=True)
class InvariantSummary:
    """Per-subset invariants for supports of size 1..4 and their size totals."""

    n: int
    per_subset_F: dict[str, float]
    C1: float
    C2: float
    C3: float
    C4: float

    @property
    def totals(self) -> tuple[float, float, float, float]:
        return (self.C1, self.C2, self.C3, self.C4)


def aggregate_invariants(state: StateVector) -> InvariantSummary:
    """Invariants on all unordered supports of size 1..4, summed by size."""
    per_subset: dict[str, float] = {}
    totals = [0.0] * MAX_SUPPORT
    for size in range(1, min(MAX_SUPPORT, state.n) + 1):
        values = []
        for subset in subsets_of_size(state.n, size):
            value = correlation_invariant(state, subset)
            per_subset[subset.label()] = value
            values.append(value)
        totals[size - 1] = math.fsum(values)
    return InvariantSummary(state.n, per_subset, *totals)


def _require_nine(n: int) -> None:
    if n != 9:
        raise ValueError(f"the aggregate formulas hold for nine qubits, got n={n}")


def purity_from_invariants(state: StateVector, subset, summary: InvariantSummary | None = None) -> float:
    """Four-qubit purity as (1 + sum of F over nonempty sub-supports) / 16."""
    subset = as_subset(subset, state.n)
    if len(subset) != 4:
        raise ValueError("purity_from_invariants takes a four-qubit subset")
    terms = [1.0]
    for size in range(1, 5):
        for sub in itertools.combinations(subset.labels, size):
            sub = QubitSubset(sub)
            if summary is not None:
                terms.append(summary.per_subset_F[sub.label()])
            else:
                terms.append(correlation_invariant(state, sub))
    return math.fsum(terms) / 16


def pi_me_from_invariants(summary: InvariantSummary) -> float:
    """Balanced purity from the size totals: 1/16 + (56 C1 + 21 C2 + 6 C3 + C4)/2016."""
    _require_nine(summary.n)
    c1, c2, c3, c4 = summary.totals
    return 1 / 16 + math.fsum([56 * c1, 21 * c2, 6 * c3, c4]) / 2016


def inversion_overlap(state: StateVector, m: int) -> float:
    """Tr(rho_m rho~_m) for the single-qubit spin flip; equals 2 det(rho_m)."""
    if not 1 <= m <= state.n:
        raise ValueError(f"qubit label must be in [1, {state.n}], got {m}")
    rho = reduced_density(state, (m,)).entries
    return float(2 * (rho[0, 0] * rho[1, 1] - rho[0, 1] * rho[1, 0]).real)


def subset_inversion_overlap(state: StateVector, subset) -> float:
    """Tr(rho_T rho~_T) with rho~_T = Y^t conj(rho_T) Y^t the universal inversion.

    Writing rho_T = M M^dagger, the inverted marginal is N N^dagger with
    N = Y^t conj(M), so the overlap is the squared Frobenius norm of M^dagger N.
    The global phase i^t of Y^t cancels.
    """
    subset = as_subset(subset, state.n)
    mat = bipartite_matrix(state, subset)
    rows = _indices(len(subset))
    signs = _parity_signs(rows)
    flipped = (signs[:, None] * mat.conj())[rows ^ (rows.size - 1)]
    overlap = mat.conj().T @ flipped
    return float(np.vdot(overlap, overlap).real)


def single_inversion_sum(state: StateVector) -> float:
    return math.fsum(inversion_overlap(state, m) for m in range(1, state.n + 1))


def complement_inversion_sum(state: StateVector) -> float:
    """Sum over qubits i of the inversion overlap of the marginal without i."""
    n = state.n
    return math.fsum(
        subset_inversion_overlap(state, [q for q in range(1, n + 1) if q != i])
        for i in range(1, n + 1)
    )


def inversion_identity_residual(state: StateVector, summary: InvariantSummary | None = None) -> float:
    """|16 X - (-18 - 8 C1 - C2 + C4)| with X the complement inversion sum."""
    _require_nine(state.n)
    summary = summary or aggregate_invariants(state)
    c1, c2, _, c4 = summary.totals
    lhs = 16 * complement_inversion_sum(state)
    rhs = math.fsum([-18.0, -8 * c1, -c2, c4])
    return abs(lhs - rhs)


def pi_me_lower_bound_form(state: StateVector, summary: InvariantSummary | None = None) -> float:
    """1/14 plus a nonnegative combination of invariants and inversion overlaps."""
    _require_nine(state.n)
    summary = summary or aggregate_invariants(state)
    c1, c2, c3, _ = summary.totals
    x = complement_inversion_sum(state)
    return 1 / 14 + math.fsum([64 * c1, 22 * c2, 6 * c3, 16 * x]) / 2016
