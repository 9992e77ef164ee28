import numpy as np
import pytest

from mmes.optimizer import (
    BalancedPurityObjective,
    SearchConfig,
    gradient_check,
    known_floor,
    minimize_pi_me,
    pi_me_gradient,
)
from mmes.reductions import average_balanced_purity
from mmes.state import ghz_state, random_state


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n=1),
        dict(n=11),
        dict(n=4, restarts=0),
        dict(n=4, max_iters=0),
        dict(n=4, step_decay=0.0),
        dict(n=4, step_decay=1.5),
        dict(n=4, step_init=0.0),
        dict(n=4, memory=-1),
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SearchConfig(**kwargs)


def test_known_floors():
    assert known_floor(9) == pytest.approx(1 / 14)
    assert known_floor(5) == 0.25 and known_floor(6) == 0.125
    assert known_floor(7) is None
    assert SearchConfig(n=4).resolved_target() is None
    assert SearchConfig(n=5, target=0.3).resolved_target() == 0.3


@pytest.mark.parametrize("n", [2, 3, 4, 7, 9])
def test_objective_matches_direct(n):
    s = random_state(n, 3)
    obj = BalancedPurityObjective(n)
    assert obj.value(s.amplitudes) == pytest.approx(average_balanced_purity(s), abs=1e-13)
    value, _ = obj.value_and_gradient(s.amplitudes)
    assert value == pytest.approx(average_balanced_purity(s), abs=1e-13)


def test_gradient_is_tangent():
    s = random_state(6, 0)
    g = pi_me_gradient(s)
    assert abs(np.vdot(s.amplitudes, g).real) <= 1e-14


def test_gradient_vanishes_at_ghz_four():
    # GHZ is a critical point: perturbations are symmetric.
    g = pi_me_gradient(ghz_state(4))
    assert np.linalg.norm(g) <= 1e-12


@pytest.mark.parametrize("n", [4, 6, 9])
def test_gradient_check(n):
    for seed in range(3):
        assert gradient_check(random_state(n, seed), directions=5, h=1e-5) <= 1e-5


@pytest.mark.parametrize("h", [1e-8, 1e-2])
def test_gradient_check_step_range(h):
    with pytest.raises(ValueError):
        gradient_check(random_state(3, 0), directions=2, h=h)


def test_bell_pair():
    trace = minimize_pi_me(SearchConfig(n=2, restarts=1, seed=1))
    assert trace.best_value <= 0.5 + 1e-6
    assert trace.converged


@pytest.mark.parametrize("memory", [0, 10])
def test_small_search_reaches_ame_five(memory):
    trace = minimize_pi_me(SearchConfig(n=5, restarts=4, seed=1, max_iters=2000, memory=memory))
    assert trace.best_value <= 0.25 + 1e-3


def test_trace_invariants():
    config = SearchConfig(n=4, restarts=3, max_iters=60, seed=5)
    trace = minimize_pi_me(config)
    assert len(trace.per_restart_curve) == 3
    assert trace.best_value == pytest.approx(average_balanced_purity(trace.best_state), abs=1e-9)
    for curve in trace.per_restart_curve:
        values = [v for _, v in curve]
        assert all(b <= a + 1e-15 for a, b in zip(values, values[1:]))
        assert [i for i, _ in curve] == list(range(len(curve)))
    best_curve = trace.per_restart_curve[trace.best_restart]
    assert trace.best_value <= best_curve[0][1] + 1e-12


def test_search_is_deterministic():
    config = SearchConfig(n=4, restarts=2, max_iters=40, seed=11)
    a, b = minimize_pi_me(config), minimize_pi_me(config)
    assert a.per_restart_curve == b.per_restart_curve
    np.testing.assert_array_equal(a.best_state.amplitudes, b.best_state.amplitudes)


def test_parallel_matches_serial():
    config = SearchConfig(n=4, restarts=3, max_iters=30, seed=2)
    assert minimize_pi_me(config, workers=3).per_restart_curve == minimize_pi_me(config).per_restart_curve


def test_nine_qubit_iterates_respect_floor():
    trace = minimize_pi_me(SearchConfig(n=9, restarts=1, max_iters=40, seed=3))
    assert min(v for c in trace.per_restart_curve for _, v in c) >= 1 / 14 - 1e-10
    assert not trace.converged
