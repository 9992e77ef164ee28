"""Local minimization of the balanced purity over pure states.

Each restart starts from a Haar-random state and runs descent on the unit
sphere: analytic gradient, a limited-memory quasi-Newton direction built from
tangent-space differences, a backtracking step and renormalization.
"""

from __future__ import annotations

import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .reductions import average_balanced_purity, subsets_of_size
from .state import StateVector, make_state, random_state

KNOWN_FLOORS = {2: 1 / 2, 3: 1 / 2, 5: 1 / 4, 6: 1 / 8, 9: 1 / 14}
TARGET_SLACK = 1e-9
ARMIJO = 1e-4
MAX_BACKTRACKS = 60


def known_floor(n: int) -> float | None:
    """Smallest attainable balanced purity where it is known."""
    return KNOWN_FLOORS.get(n)


@dataclass(frozen=True)
class SearchConfig:
    n: int
    restarts: int = 20
    max_iters: int = 1000
    step_init: float = 0.1
    step_decay: float = 0.5
    seed: int = 0
    target: float | None = None
    memory: int = 10
    grad_tol: float = 1e-10

    def __post_init__(self):
        if not 2 <= self.n <= 10:
            raise ValueError(f"n must be in [2, 10], got {self.n}")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0 < self.step_decay <= 1:
            raise ValueError("step_decay must be in (0, 1]")
        if not self.step_init > 0:
            raise ValueError("step_init must be positive")
        if self.memory < 0:
            raise ValueError("memory must be >= 0")

    def resolved_target(self) -> float | None:
        return self.target if self.target is not None else known_floor(self.n)


@dataclass
class RestartResult:
    index: int
    state: np.ndarray
    value: float
    initial_value: float
    curve: list[tuple[int, float]]
    grad_norm: float


@dataclass
class SearchTrace:
    best_state: StateVector
    best_value: float
    per_restart_curve: list[list[tuple[int, float]]]
    converged: bool
    best_restart: int = 0
    restart_values: list[float] = field(default_factory=list)


class BalancedPurityObjective:
    """Mean balanced purity and its gradient on raw amplitude vectors."""

    def __init__(self, n: int):
        self.n = n
        k = n // 2
        self.shape = (2**k, 2 ** (n - k))
        idx = np.arange(2**n).reshape((2,) * n)
        gathers = []
        for subset in subsets_of_size(n, k):
            kept = subset.axes()
            order = kept + [q for q in range(n) if q not in kept]
            gathers.append(idx.transpose(order).reshape(-1))
        self.gather = np.array(gathers)
        self.count = len(gathers)
        offsets = (np.arange(self.count) * 2**n)[:, None]
        self.scatter = (np.argsort(self.gather, axis=1) + offsets).reshape(-1)

    def _blocks(self, psi: np.ndarray) -> np.ndarray:
        return psi[self.gather].reshape(self.count, *self.shape)

    def value(self, psi: np.ndarray) -> float:
        blocks = self._blocks(psi)
        rho = blocks @ blocks.conj().swapaxes(1, 2)
        return float(np.sum(np.abs(rho) ** 2)) / self.count

    def value_and_gradient(self, psi: np.ndarray) -> tuple[float, np.ndarray]:
        """Value and gradient in the real sense: df = Re<grad, dpsi>."""
        blocks = self._blocks(psi)
        rho = blocks @ blocks.conj().swapaxes(1, 2)
        value = float(np.sum(np.abs(rho) ** 2)) / self.count
        partial = (4.0 / self.count) * (rho @ blocks).reshape(self.count, -1)
        grad = partial.reshape(-1)[self.scatter].reshape(self.count, -1).sum(axis=0)
        return value, grad


@lru_cache(maxsize=None)
def objective_for(n: int) -> BalancedPurityObjective:
    return BalancedPurityObjective(n)


def _inner(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.vdot(a, b).real)


def _tangent(psi: np.ndarray, v: np.ndarray) -> np.ndarray:
    return v - _inner(psi, v) * psi


def pi_me_gradient(state: StateVector) -> np.ndarray:
    """Riemannian gradient of the balanced purity at a unit state."""
    _, grad = objective_for(state.n).value_and_gradient(state.amplitudes)
    return _tangent(state.amplitudes, grad)


def _direction(grad: np.ndarray, pairs: deque) -> np.ndarray:
    """Two-loop recursion on stored (s, y) tangent pairs."""
    q = grad.copy()
    alphas = []
    for s, y, rho in reversed(pairs):
        a = rho * _inner(s, q)
        q -= a * y
        alphas.append(a)
    if pairs:
        s, y, _ = pairs[-1]
        q *= _inner(s, y) / _inner(y, y)
    for (s, y, rho), a in zip(pairs, reversed(alphas)):
        b = rho * _inner(y, q)
        q += (a - b) * s
    return -q


def _run_restart(config: SearchConfig, index: int, seed_seq: np.random.SeedSequence) -> RestartResult:
    objective = objective_for(config.n)
    target = config.resolved_target()
    stop_at = None if target is None else target + TARGET_SLACK
    psi = random_state(config.n, np.random.default_rng(seed_seq)).amplitudes.copy()
    value, raw = objective.value_and_gradient(psi)
    grad = _tangent(psi, raw)
    initial = value
    curve = [(0, value)]
    pairs: deque = deque(maxlen=config.memory or 1)
    for it in range(1, config.max_iters + 1):
        if stop_at is not None and value <= stop_at:
            break
        if math.sqrt(_inner(grad, grad)) <= config.grad_tol:
            break
        direction = _direction(grad, pairs) if config.memory else -grad
        slope = _inner(grad, direction)
        if slope >= 0:
            pairs.clear()
            direction, slope = -grad, -_inner(grad, grad)
        step = 1.0 if pairs else config.step_init / float(np.linalg.norm(direction))
        for _ in range(MAX_BACKTRACKS):
            trial = psi + step * direction
            trial /= np.linalg.norm(trial)
            trial_value, trial_raw = objective.value_and_gradient(trial)
            if trial_value <= value + ARMIJO * step * slope:
                break
            step *= config.step_decay
        else:
            break
        trial_grad = _tangent(trial, trial_raw)
        s = _tangent(trial, trial - psi)
        y = trial_grad - _tangent(trial, grad)
        sy = _inner(s, y)
        if config.memory and sy > 1e-18:
            pairs.append((s, y, 1.0 / sy))
        psi, value, grad = trial, trial_value, trial_grad
        curve.append((it, value))
    return RestartResult(index, psi, value, initial, curve, math.sqrt(_inner(grad, grad)))


def minimize_pi_me(config: SearchConfig, workers: int = 1) -> SearchTrace:
    """Best balanced purity over independent Haar-random restarts."""
    seeds = np.random.SeedSequence(config.seed).spawn(config.restarts)
    jobs = list(enumerate(seeds))
    if workers > 1 and config.restarts > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: _run_restart(config, *job), jobs))
    else:
        results = [_run_restart(config, i, s) for i, s in jobs]
    best = min(results, key=lambda r: (r.value, r.index))
    best_state = make_state(config.n, best.state)
    best_value = average_balanced_purity(best_state)
    target = config.resolved_target()
    if target is not None:
        converged = best_value <= target + TARGET_SLACK
    else:
        converged = best.grad_norm <= config.grad_tol
    return SearchTrace(
        best_state=best_state,
        best_value=best_value,
        per_restart_curve=[r.curve for r in results],
        converged=converged,
        best_restart=best.index,
        restart_values=[r.value for r in results],
    )


def _unit_tangent(psi: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    d = rng.standard_normal(psi.size) + 1j * rng.standard_normal(psi.size)
    d = _tangent(psi, d)
    return d / np.linalg.norm(d)


def gradient_check(state: StateVector, directions: int = 10, h: float = 1e-5, seed: int = 0) -> float:
    """Worst relative gap between analytic and central-difference slopes.

    Each direction is a random unit tangent vector d; the finite difference
    uses the retraction psi -> (psi + t d)/|psi + t d| at t = +h and -h.
    """
    if not 1e-7 <= h <= 1e-3:
        raise ValueError(f"h must be in [1e-7, 1e-3], got {h}")
    if directions < 1:
        raise ValueError("directions must be >= 1")
    objective = objective_for(state.n)
    psi = state.amplitudes
    grad = pi_me_gradient(state)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(directions):
        d = _unit_tangent(psi, rng)
        plus, minus = psi + h * d, psi - h * d
        fd = (objective.value(plus / np.linalg.norm(plus)) - objective.value(minus / np.linalg.norm(minus))) / (2 * h)
        analytic = _inner(grad, d)
        scale = max(abs(analytic), abs(fd), 1e-300)
        worst = max(worst, abs(fd - analytic) / scale)
    return worst
