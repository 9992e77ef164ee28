"""Command-line interface: ``mmes analyze | verify | search``."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import Any, Sequence

from . import __version__
from .invariants import (
    aggregate_invariants,
    complement_inversion_sum,
    inversion_identity_residual,
    pi_me_from_invariants,
    pi_me_lower_bound_form,
    single_inversion_sum,
)
from .optimizer import SearchConfig, known_floor, minimize_pi_me
from .reductions import average_balanced_purity, purity_spectrum
from .state import (
    StateFileError,
    StateVector,
    atomic_write,
    builtin_state,
    read_state,
    state_from_signs,
    write_state,
    zha_table,
)
from .uniformity import classify_marginals, is_k_uniform, mmes_verdict
from .verification import closest_fraction, identity_checks, reference_checks

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_UNREADABLE = 2
EXIT_MALFORMED = 3
EXIT_INVALID = 4
THREADS_ENV = "MMES_THREADS"
PER_SUBSET_LIMIT = 512


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _number(value: float) -> dict[str, Any]:
    entry: dict[str, Any] = {"decimal": float(f"{value:.15g}")}
    exact = closest_fraction(value)
    if exact is not None:
        entry["exact"] = exact
    return entry


def _parse_k_list(text: str, n: int) -> list[int]:
    try:
        ks = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise CliError(f"invalid --k value {text!r}", EXIT_INVALID) from exc
    bad = [k for k in ks if not 1 <= k <= n - 1]
    if not ks or bad:
        raise CliError(f"marginal sizes must lie in [1, {n - 1}], got {text!r}", EXIT_INVALID)
    return sorted(set(ks))


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _load(args) -> tuple[StateVector, str]:
    if args.state:
        try:
            return read_state(args.state), f"file:{args.state}"
        except StateFileError as exc:
            raise CliError(f"malformed state file {args.state}: {exc}", EXIT_MALFORMED) from exc
        except OSError as exc:
            raise CliError(f"cannot read {args.state}: {exc.strerror}", EXIT_UNREADABLE) from exc
    try:
        state = builtin_state(args.builtin, args.n)
    except (KeyError, ValueError) as exc:
        raise CliError(str(exc), EXIT_UNREADABLE) from exc
    descriptor = f"builtin:{args.builtin}" + ("" if args.builtin == "zha9" else f" n={args.n}")
    return state, descriptor


def build_report(state: StateVector, descriptor: str, ks: Sequence[int]) -> dict[str, Any]:
    """Analysis document with a stable key order."""
    started = time.perf_counter()
    report: dict[str, Any] = {"state_descriptor": descriptor, "n": state.n, "drifted": state.drifted}
    report["pi_me_direct"] = _number(average_balanced_purity(state))
    spectra = {}
    for k in ks:
        spectrum = purity_spectrum(state, k)
        spectra[str(k)] = {
            "histogram": [
                {"purity": _number(v), "count": c} for v, c in sorted(classify_marginals(state, k).items())
            ],
            "purities": {s.label(): _number(p) for s, p in spectrum.entries},
        }
    report["purity_spectra"] = spectra
    report["uniformity"] = [
        {
            "k": v.k,
            "uniform": v.uniform,
            "worst_subset": v.worst_subset.label(),
            "worst_deviation": v.worst_deviation,
        }
        for v in (is_k_uniform(state, k) for k in range(1, state.n // 2 + 1))
    ]
    if state.n == 9:
        summary = aggregate_invariants(state)
        per_subset = summary.per_subset_F
        report["invariants"] = {
            "C1": _number(summary.C1),
            "C2": _number(summary.C2),
            "C3": _number(summary.C3),
            "C4": _number(summary.C4),
            "per_subset_F": {k: float(f"{v:.15g}") for k, v in per_subset.items()}
            if len(per_subset) <= PER_SUBSET_LIMIT
            else "elided",
        }
        report["pi_me_invariants"] = _number(pi_me_from_invariants(summary))
        report["pi_me_lower_bound_form"] = _number(pi_me_lower_bound_form(state, summary))
        report["inversion_identity_residual"] = inversion_identity_residual(state, summary)
        report["single_qubit_inversion_sum"] = _number(single_inversion_sum(state))
        report["complement_inversion_sum"] = _number(complement_inversion_sum(state))
        verdict = mmes_verdict(state)
        report["mmes_verdict"] = {
            "pi_me": _number(verdict.pi_me),
            "gap_to_bound": verdict.gap_to_bound,
            "is_mmes": verdict.is_mmes,
            "is_ame": verdict.is_ame,
            "spectrum_histogram": [
                {"purity": _number(v), "count": c} for v, c in sorted(verdict.spectrum_histogram.items())
            ],
        }
    report["timing"] = {"seconds": round(time.perf_counter() - started, 6)}
    return report


def _emit(text: str, out: str | None) -> None:
    if out:
        atomic_write(out, text)
        print(out)
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    state, descriptor = _load(args)
    ks = _parse_k_list(args.k, state.n)
    report = build_report(state, descriptor, ks)
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK


def _flipped_zha(index: int) -> StateVector:
    entries = zha_table()
    if not 0 <= index < len(entries):
        raise CliError(f"--flip-sign must be in [0, {len(entries) - 1}]", EXIT_INVALID)
    basis, sign = entries[index]
    entries[index] = (basis, -sign)
    return state_from_signs(9, entries)


def _quick_search(n: int, restarts: int, seed: int) -> float:
    return minimize_pi_me(SearchConfig(n=n, restarts=restarts, seed=seed, max_iters=500)).best_value


def cmd_verify(args) -> int:
    if args.suite == "paper":
        zha = _flipped_zha(args.flip_sign) if args.flip_sign is not None else None
        checks = reference_checks(zha=zha, search=_quick_search)
    else:
        checks, worst = identity_checks(args.seeds)
        print(f"max residuals: {', '.join(f'{k}={v:.3e}' for k, v in worst.items())}")
    for check in checks:
        print(f"{'PASS' if check.passed else 'FAIL'}  {check.name}" + (f"  ({check.detail})" if check.detail else ""))
    failed = [c for c in checks if not c.passed]
    if failed:
        print(f"first failure: {failed[0].name}", file=sys.stderr)
        return EXIT_FAILED
    print(f"all {len(checks)} checks passed")
    return EXIT_OK


def cmd_search(args) -> int:
    if not 2 <= args.n <= 10:
        raise CliError(f"n must be in [2, 10], got {args.n}", EXIT_INVALID)
    try:
        config = SearchConfig(
            n=args.n, restarts=args.restarts, max_iters=args.max_iters, seed=args.seed,
            step_init=args.step_init, step_decay=args.step_decay, target=args.target,
        )
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INVALID) from exc
    trace = minimize_pi_me(config, workers=_threads())
    out = args.out or f"search_n{args.n}_seed{args.seed}.state"
    write_state(trace.best_state, out)
    floor = known_floor(args.n)
    gap = "none" if floor is None else f"{trace.best_value - floor:.3e}"
    print(
        f"n={args.n} restarts={args.restarts} seed={args.seed} best_pi_me={trace.best_value:.15g} "
        f"gap_to_floor={gap} converged={trace.converged} state={out}"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mmes", description="Balanced-purity analysis of qubit states.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="report purities, invariants and verdicts for one state")
    source = analyze.add_mutually_exclusive_group(required=True)
    source.add_argument("--builtin", choices=["zero", "ghz", "zha9"])
    source.add_argument("--state", help="state file path")
    analyze.add_argument("--n", type=int, default=9, help="qubit count for zero/ghz (default 9)")
    analyze.add_argument("--k", default="4", help="comma-separated marginal sizes (default 4)")
    analyze.add_argument("--out", help="write the report here instead of stdout")
    analyze.set_defaults(func=cmd_analyze)

    verify = sub.add_parser("verify", help="replay reference values or identity checks")
    verify.add_argument("suite", choices=["paper", "identities"])
    verify.add_argument("--seeds", type=int, default=100, help="random states for 'identities'")
    verify.add_argument("--flip-sign", type=int, default=None, metavar="ENTRY",
                        help="negate one entry of the nine-qubit table before checking")
    verify.set_defaults(func=cmd_verify)

    search = sub.add_parser("search", help="minimize the balanced purity from random restarts")
    search.add_argument("--n", type=int, required=True)
    search.add_argument("--restarts", type=int, default=20)
    search.add_argument("--seed", type=int, default=0)
    search.add_argument("--max-iters", type=int, default=1000)
    search.add_argument("--step-init", type=float, default=0.1)
    search.add_argument("--step-decay", type=float, default=0.5)
    search.add_argument("--target", type=float, default=None, help="early-stop value (default: known floor)")
    search.add_argument("--out", help="best state file (default search_n<N>_seed<S>.state)")
    search.set_defaults(func=cmd_search)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
