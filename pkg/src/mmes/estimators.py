"""scikit-learn style wrappers around the analysis and search functions."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .invariants import aggregate_invariants
from .optimizer import SearchConfig, minimize_pi_me
from .reductions import average_balanced_purity, purity_spectrum
from .state import make_state


def _as_amplitude_rows(X) -> np.ndarray:
    """Accept complex rows of length 2^n, or real rows [real parts | imag parts]."""
    X = np.asarray(X)
    if np.iscomplexobj(X):
        X = np.concatenate([X.real, X.imag], axis=-1 if X.ndim > 1 else 0)
    X = check_array(X, dtype=np.float64)
    width = X.shape[1]
    if width < 8 or width & (width - 1):
        raise ValueError(f"expected 2 * 2^n columns for n >= 2 qubits, got {width}")
    half = width // 2
    return X[:, :half] + 1j * X[:, half:]


class EntanglementProfile(TransformerMixin, BaseEstimator):
    """Map states to [balanced purity, mean k-marginal purity for each k, C1..C4].

    Rows are pure states (normalized on the fly). The invariant totals are
    appended only for nine-qubit inputs when ``invariants`` is true.
    """

    def __init__(self, orders=None, invariants=True):
        self.orders = orders
        self.invariants = invariants

    def fit(self, X, y=None):
        rows = _as_amplitude_rows(X)
        self.n_qubits_ = int(np.log2(rows.shape[1]))
        orders = self.orders if self.orders is not None else range(1, self.n_qubits_ // 2 + 1)
        self.orders_ = [int(k) for k in orders]
        if any(not 1 <= k <= self.n_qubits_ - 1 for k in self.orders_):
            raise ValueError(f"orders must lie in [1, {self.n_qubits_ - 1}]")
        self.n_features_in_ = 2 * rows.shape[1]
        return self

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self)
        names = ["pi_me"] + [f"mean_purity_k{k}" for k in self.orders_]
        if self._with_invariants():
            names += ["C1", "C2", "C3", "C4"]
        return np.array(names, dtype=object)

    def _with_invariants(self) -> bool:
        return bool(self.invariants) and self.n_qubits_ == 9

    def transform(self, X):
        check_is_fitted(self)
        rows = _as_amplitude_rows(X)
        if 2 * rows.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} columns, got {2 * rows.shape[1]}")
        out = []
        for amps in rows:
            state = make_state(self.n_qubits_, amps)
            feats = [average_balanced_purity(state)]
            feats += [float(purity_spectrum(state, k).values().mean()) for k in self.orders_]
            if self._with_invariants():
                feats += list(aggregate_invariants(state).totals)
            out.append(feats)
        return np.array(out)


class PiMEMinimizer(BaseEstimator):
    """Random-restart search for low balanced purity; ``fit`` ignores X."""

    def __init__(self, n=5, restarts=20, max_iters=1000, step_init=0.1, step_decay=0.5, seed=0, target=None):
        self.n = n
        self.restarts = restarts
        self.max_iters = max_iters
        self.step_init = step_init
        self.step_decay = step_decay
        self.seed = seed
        self.target = target

    def fit(self, X=None, y=None):
        config = SearchConfig(**self.get_params())
        self.trace_ = minimize_pi_me(config)
        self.best_state_ = self.trace_.best_state
        self.best_value_ = self.trace_.best_value
        self.converged_ = self.trace_.converged
        return self

    def score(self, X=None, y=None) -> float:
        """Negative best balanced purity, so larger is better."""
        check_is_fitted(self)
        return -self.best_value_
