import functools
import itertools

import numpy as np
import pytest

from mmes.state import ghz_state, product_state, zha_nine_qubit_state

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]]),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

ACCEPTANCE_LINES: dict[int, str] = {}


def dense_reduced(psi, n, keep):
    """Partial trace by contracting |psi><psi| as a 2n-index tensor."""
    keep = sorted(q - 1 for q in keep)
    t = psi.reshape((2,) * n)
    letters = "abcdefghijklmnopqrstuvwxyz"
    ket = list(letters[:n])
    bra = [ket[q] if q not in keep else letters[n + q].upper() for q in range(n)]
    out = "".join(ket[q] for q in keep) + "".join(bra[q] for q in keep)
    rho = np.einsum(f"{''.join(ket)},{''.join(bra)}->{out}", t, t.conj())
    d = 2 ** len(keep)
    return rho.reshape(d, d)


def dense_pauli(n, support, letters):
    ops = [np.eye(2, dtype=complex)] * n
    for q, c in zip(support, letters):
        ops = ops[: q - 1] + [PAULI[c]] + ops[q:]
    return functools.reduce(np.kron, ops)


def dense_invariant(psi, n, support):
    total = 0.0
    for letters in itertools.product("xyz", repeat=len(support)):
        total += np.vdot(psi, dense_pauli(n, support, letters) @ psi).real ** 2
    return total


@pytest.fixture(scope="session")
def zha():
    return zha_nine_qubit_state()


@pytest.fixture(scope="session")
def ghz9():
    return ghz_state(9)


@pytest.fixture(scope="session")
def zero9():
    return product_state(9)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
