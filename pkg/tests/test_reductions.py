import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import dense_reduced
from mmes.reductions import (
    PuritySpectrum,
    average_balanced_purity,
    purity,
    purity_spectrum,
    reduced_density,
    subsets_of_size,
)
from mmes.state import ghz_state, product_state, random_state


def test_ghz_single_marginal_is_half_identity(ghz9):
    rho = reduced_density(ghz9, [1]).entries
    np.testing.assert_allclose(rho, np.eye(2) / 2, atol=1e-15)
    np.testing.assert_allclose(rho, dense_reduced(ghz9.amplitudes, 9, [1]), atol=1e-15)


def test_product_marginal_is_pure(zero9):
    rho = reduced_density(zero9, "247").entries
    expected = np.zeros((8, 8))
    expected[0, 0] = 1
    np.testing.assert_array_equal(rho, expected)


def test_zha_qubit_five_maximally_mixed(zha):
    np.testing.assert_allclose(reduced_density(zha, [5]).entries, np.eye(2) / 2, atol=1e-15)


@pytest.mark.parametrize("subset", ["1", "13", "258", "1234", "24689", "12345678"])
def test_reduced_density_matches_dense_oracle(subset):
    s = random_state(9, 4)
    got = reduced_density(s, subset).entries
    want = dense_reduced(s.amplitudes, 9, [int(c) for c in subset])
    np.testing.assert_allclose(got, want, atol=1e-13)


def test_reduced_density_matrix_properties():
    rng = np.random.default_rng(8)
    s = random_state(7, rng)
    rho = reduced_density(s, "136").entries
    np.testing.assert_allclose(rho, rho.conj().T, atol=1e-12)
    assert np.trace(rho).real == pytest.approx(1, abs=1e-12)
    assert np.linalg.eigvalsh(rho).min() >= -1e-10


def test_reduced_density_rejects_full_system():
    with pytest.raises(ValueError):
        reduced_density(ghz_state(3), "123")
    with pytest.raises(ValueError):
        purity(ghz_state(3), "14")


@pytest.mark.parametrize("subset", list(subsets_of_size(9, 4))[::17])
def test_ghz_four_subset_purity(ghz9, subset):
    rho = dense_reduced(ghz9.amplitudes, 9, subset.labels)
    assert purity(ghz9, subset) == pytest.approx(np.vdot(rho, rho).real, abs=1e-15)
    assert purity(ghz9, subset) == pytest.approx(0.5, abs=1e-15)


def test_product_purity(zero9):
    assert purity(zero9, "2357") == 1


@pytest.mark.parametrize("subset, value", [("1235", 1 / 16), ("1234", 1 / 4), ("5", 1 / 2)])
def test_zha_purity_values(zha, subset, value):
    assert purity(zha, subset) == pytest.approx(value, abs=1e-12)


def test_spectrum_order_and_size(zero9):
    spectrum = purity_spectrum(zero9, 4)
    assert len(spectrum.entries) == 126
    labels = [s.labels for s, _ in spectrum.entries]
    assert labels == sorted(labels) == list(itertools.combinations(range(1, 10), 4))
    assert np.all(spectrum.values() == 1)


def test_zha_three_spectrum_flat(zha):
    np.testing.assert_allclose(purity_spectrum(zha, 3).values(), 1 / 8, atol=1e-12)


@pytest.mark.parametrize("k", [0, 9])
def test_spectrum_rejects_k(zero9, k):
    with pytest.raises(ValueError):
        purity_spectrum(zero9, k)


def test_spectrum_csv_round_trip():
    spectrum = purity_spectrum(random_state(5, 0), 2)
    text = spectrum.to_csv()
    assert text.splitlines()[0] == "subset,purity"
    assert text.splitlines()[1].startswith("12,")
    back = PuritySpectrum.from_csv(text)
    assert back.k == 2
    assert back.as_dict() == spectrum.as_dict()


@pytest.mark.parametrize(
    "state, value",
    [(ghz_state(9), 0.5), (product_state(9), 1.0), (ghz_state(4), 0.5), (ghz_state(2), 0.5)],
)
def test_average_balanced_purity_reference(state, value):
    assert average_balanced_purity(state) == pytest.approx(value, abs=1e-12)


def test_zha_average_balanced_purity(zha):
    assert average_balanced_purity(zha) == pytest.approx(1 / 14, abs=1e-12)


def test_balanced_purity_lower_bound_random():
    for seed in range(200):
        assert average_balanced_purity(random_state(9, seed)) >= 1 / 14 - 1e-10


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 8), seed=st.integers(0, 2**32 - 1), data=st.data())
def test_complementarity_and_range(n, seed, data):
    s = random_state(n, seed)
    k = data.draw(st.integers(1, n - 1))
    labels = data.draw(st.lists(st.integers(1, n), min_size=k, max_size=k, unique=True))
    rest = [q for q in range(1, n + 1) if q not in labels]
    p = purity(s, labels)
    assert p == pytest.approx(purity(s, rest), abs=1e-12)
    assert 2.0 ** -len(labels) - 1e-12 <= p <= 1 + 1e-12
    rho = reduced_density(s, labels)
    assert rho.purity() == pytest.approx(p, abs=1e-12)


def test_purity_range_many_states():
    rng = np.random.default_rng(2024)
    for _ in range(10_000):
        n = int(rng.integers(2, 7))
        s = random_state(n, rng)
        k = int(rng.integers(1, n))
        subset = sorted(rng.choice(np.arange(1, n + 1), size=k, replace=False))
        p = purity(s, subset)
        assert 2.0**-k - 1e-12 <= p <= 1 + 1e-12
