"""Reduced density matrices, marginal purities and the balanced-purity average."""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .state import QubitSubset, StateVector, as_subset


@dataclass(frozen=True)
class DensityMatrix:
    subset: QubitSubset
    entries: np.ndarray

    @property
    def k(self) -> int:
        return len(self.subset)

    def purity(self) -> float:
        return float(np.vdot(self.entries, self.entries).real)


@dataclass(frozen=True)
class PuritySpectrum:
    """Purities of every size-k marginal, in lexicographic subset order."""

    k: int
    entries: tuple[tuple[QubitSubset, float], ...]

    def values(self) -> np.ndarray:
        return np.array([p for _, p in self.entries])

    def as_dict(self) -> dict[str, float]:
        return {s.label(): p for s, p in self.entries}

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["subset", "purity"])
        for subset, value in self.entries:
            writer.writerow([subset.label(), repr(float(value))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PuritySpectrum":
        rows = list(csv.DictReader(io.StringIO(text)))
        entries = tuple((QubitSubset.parse(r["subset"]), float(r["purity"])) for r in rows)
        return cls(len(entries[0][0]) if entries else 0, entries)


@lru_cache(maxsize=None)
def subsets_of_size(n: int, k: int) -> tuple[QubitSubset, ...]:
    return tuple(QubitSubset(c) for c in itertools.combinations(range(1, n + 1), k))


def _check_marginal(state: StateVector, subset) -> QubitSubset:
    subset = as_subset(subset, state.n)
    if len(subset) >= state.n:
        raise ValueError("subset must leave at least one qubit to trace out")
    return subset


@lru_cache(maxsize=None)
def _order(n: int, labels: tuple[int, ...]) -> tuple[int, ...]:
    kept = [q - 1 for q in labels]
    return tuple(kept + [q for q in range(n) if q not in kept])


def bipartite_matrix(state: StateVector, subset: QubitSubset) -> np.ndarray:
    """Amplitudes as a (2^|A|, 2^(n-|A|)) matrix with rows indexed by A."""
    order = _order(state.n, subset.labels)
    k = len(subset)
    return state.tensor().transpose(order).reshape(2**k, 2 ** (state.n - k))


def reduced_density(state: StateVector, subset) -> DensityMatrix:
    subset = _check_marginal(state, subset)
    mat = bipartite_matrix(state, subset)
    rho = mat @ mat.conj().T
    return DensityMatrix(subset, rho)


def purity(state: StateVector, subset) -> float:
    """Tr(rho_A^2), using whichever side of the cut has the smaller Gram matrix."""
    subset = _check_marginal(state, subset)
    mat = bipartite_matrix(state, subset)
    gram = mat @ mat.conj().T if mat.shape[0] <= mat.shape[1] else mat.T @ mat.conj()
    return float(np.vdot(gram, gram).real)


def purity_spectrum(state: StateVector, k: int) -> PuritySpectrum:
    if not 1 <= k <= state.n - 1:
        raise ValueError(f"marginal size must be in [1, {state.n - 1}], got {k}")
    subsets = subsets_of_size(state.n, k)
    return PuritySpectrum(k, tuple((s, purity(state, s)) for s in subsets))


def balanced_size(n: int) -> int:
    return n // 2


def average_balanced_purity(state: StateVector) -> float:
    """Mean purity over all subsets of size floor(n/2)."""
    values = purity_spectrum(state, balanced_size(state.n)).values()
    return math.fsum(values) / len(values)
