"""Named reference checks replayed by ``mmes verify``."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

from .invariants import (
    aggregate_invariants,
    complement_inversion_sum,
    correlation_invariant,
    inversion_identity_residual,
    pi_me_from_invariants,
    pi_me_lower_bound_form,
    purity_from_invariants,
    single_inversion_sum,
)
from .reductions import average_balanced_purity, purity, purity_spectrum, subsets_of_size
from .state import StateVector, ghz_state, product_state, random_state, zha_nine_qubit_state
from .uniformity import is_k_uniform

TOL = 1e-9
IDENTITY_TOL = 1e-10

# Expected four-qubit spectrum of the nine-qubit reference state.
ZHA_QUARTER_SUBSET = "1234"
ZHA_EIGHTH_SUBSETS = (
    "1278", "1358", "1367", "1379", "1457", "1679", "2368", "2458",
    "2479", "2489", "2689", "3456", "3478", "3679", "4689",
)
ZHA_HISTOGRAM = {1 / 16: 110, 1 / 8: 15, 1 / 4: 1}


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


def _close(name: str, value: float, expected: float, tol: float = TOL) -> Check:
    return Check(name, abs(value - expected) <= tol, f"got {value:.15g}, want {expected:.15g}")


def pi_me_three_ways(state: StateVector) -> tuple[float, float, float]:
    summary = aggregate_invariants(state)
    return (
        average_balanced_purity(state),
        pi_me_from_invariants(summary),
        pi_me_lower_bound_form(state, summary),
    )


def _snap_histogram(values, tol: float = TOL) -> Counter:
    counts: Counter = Counter()
    for v in values:
        label = next((f"1/{round(1 / ref)}" for ref in ZHA_HISTOGRAM if abs(v - ref) <= tol), f"{v:.12g}")
        counts[label] += 1
    return counts


def spectrum_checks(state: StateVector, tol: float = TOL) -> list[Check]:
    """Four-qubit spectrum, location of the 1/4 and 1/8 entries, and uniformity."""
    spectrum = purity_spectrum(state, 4).as_dict()
    got = _snap_histogram(spectrum.values(), tol)
    want = Counter({f"1/{round(1 / k)}": v for k, v in ZHA_HISTOGRAM.items()})
    quarter = sorted(s for s, v in spectrum.items() if abs(v - 1 / 4) <= tol)
    eighth = sorted(s for s, v in spectrum.items() if abs(v - 1 / 8) <= tol)
    pi_me = sum(spectrum.values()) / len(spectrum)
    checks = [
        Check("zha purity spectrum", got == want, f"got {dict(sorted(got.items()))}, want {dict(want)}"),
        Check("zha quarter subset", quarter == [ZHA_QUARTER_SUBSET], f"1/4 on {quarter}"),
        Check("zha eighth subsets", eighth == sorted(ZHA_EIGHTH_SUBSETS), f"1/8 on {eighth}"),
        _close("zha pi_me", pi_me, 1 / 14, tol),
    ]
    for k in (1, 2, 3):
        verdict = is_k_uniform(state, k, tol)
        checks.append(Check(f"zha {k}-uniform", verdict.uniform, f"worst {verdict.worst_subset} off by {verdict.worst_deviation:.3e}"))
    verdict = is_k_uniform(state, 4, tol)
    checks.append(Check("zha not 4-uniform", not verdict.uniform, f"worst {verdict.worst_subset} off by {verdict.worst_deviation:.3e}"))
    return checks


def _reference_checks(zha: StateVector) -> Iterator[Check]:
    zero, ghz = product_state(9), ghz_state(9)
    for label, state, expected in (("product", zero, 1.0), ("ghz", ghz, 0.5)):
        for form, value in zip(("direct", "invariants", "lower-bound form"), pi_me_three_ways(state)):
            yield _close(f"{label} pi_me ({form})", value, expected)
    yield _close("ghz single-qubit inversion sum", single_inversion_sum(ghz), 4.5)
    yield _close("product single-qubit inversion sum", single_inversion_sum(zero), 0.0)
    yield _close("ghz complement inversion sum", complement_inversion_sum(ghz), 4.5)
    yield _close("product complement inversion sum", complement_inversion_sum(zero), 0.0)
    yield Check(
        "ghz single and pair invariants",
        all(abs(correlation_invariant(ghz, s)) <= TOL for s in subsets_of_size(9, 1))
        and all(abs(correlation_invariant(ghz, s) - 1) <= TOL for s in subsets_of_size(9, 2)),
    )
    yield _close("product purity of 1234", purity(zero, "1234"), 1.0)
    yield _close("zha purity of 1234", purity(zha, "1234"), 0.25)
    yield _close("zha purity of 1278", purity(zha, "1278"), 0.125)
    yield _close("zha purity of 1235", purity(zha, "1235"), 1 / 16)
    yield _close("zha invariant purity of 1234", purity_from_invariants(zha, "1234"), 0.25)
    for form, value in zip(("direct", "invariants", "lower-bound form"), pi_me_three_ways(zha)):
        yield _close(f"zha pi_me ({form})", value, 1 / 14)
    yield from spectrum_checks(zha)


def reference_checks(
    zha: StateVector | None = None,
    search: Callable[[int, int, int], float] | None = None,
) -> list[Check]:
    """Reference values for the product, GHZ and nine-qubit states."""
    checks = list(_reference_checks(zha if zha is not None else zha_nine_qubit_state()))
    if search is not None:
        checks.append(Check("search n=5 reaches 0.251", search(5, 10, 1) <= 0.251))
        checks.append(Check("search n=2 reaches a Bell pair", search(2, 1, 1) <= 0.5 + 1e-6))
    return checks


def identity_checks(seeds: int) -> tuple[list[Check], dict[str, float]]:
    """The three balanced-purity forms and the inversion identity on random states."""
    worst = {"invariants": 0.0, "lower_bound_form": 0.0, "inversion_identity": 0.0}
    for seed in range(seeds):
        state = random_state(9, seed)
        summary = aggregate_invariants(state)
        direct = average_balanced_purity(state)
        worst["invariants"] = max(worst["invariants"], abs(direct - pi_me_from_invariants(summary)))
        worst["lower_bound_form"] = max(worst["lower_bound_form"], abs(direct - pi_me_lower_bound_form(state, summary)))
        worst["inversion_identity"] = max(worst["inversion_identity"], inversion_identity_residual(state, summary))
    checks = [
        Check("direct vs invariant form", worst["invariants"] <= IDENTITY_TOL, f"max {worst['invariants']:.3e}"),
        Check("direct vs lower-bound form", worst["lower_bound_form"] <= IDENTITY_TOL, f"max {worst['lower_bound_form']:.3e}"),
        Check("inversion identity", worst["inversion_identity"] <= 1e-9, f"max {worst['inversion_identity']:.3e}"),
    ]
    return checks, worst


def closest_fraction(value: float, tol: float = TOL, max_denominator: int = 4096) -> str | None:
    """Nearest small rational as 'p/q' when within tol."""
    frac = Fraction(value).limit_denominator(max_denominator)
    if math.isfinite(value) and abs(float(frac) - value) <= tol:
        return f"{frac.numerator}/{frac.denominator}" if frac.denominator != 1 else str(frac.numerator)
    return None
