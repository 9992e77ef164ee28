"""Pure n-qubit states: construction, named reference states and file I/O.

Qubit 1 is the most significant bit of the basis index, so the binary
string of an index reads qubit 1 leftmost.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-12
DRIFT_TOL = 1e-9
MIN_QUBITS = 1
MAX_QUBITS = 14


class StateFileError(ValueError):
    """Raised when a state file cannot be parsed."""


@dataclass(frozen=True)
class StateVector:
    """Immutable normalized pure state on ``n`` qubits."""

    n: int
    amplitudes: np.ndarray = field(repr=False)
    drifted: bool = False

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != 2**self.n:
            raise ValueError(f"expected {2**self.n} amplitudes, got {amps.size}")
        norm = math.fsum(np.abs(amps) ** 2)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per qubit (axis 0 is qubit 1)."""
        return self.amplitudes.reshape((2,) * self.n)


@dataclass(frozen=True)
class QubitSubset:
    """Strictly increasing 1-based qubit labels."""

    labels: tuple[int, ...]

    def __post_init__(self):
        labels = tuple(int(q) for q in self.labels)
        if not labels:
            raise ValueError("qubit subset must be nonempty")
        if any(b <= a for a, b in zip(labels, labels[1:])):
            raise ValueError(f"labels must be strictly increasing: {labels}")
        if labels[0] < 1:
            raise ValueError(f"labels start at 1: {labels}")
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __str__(self) -> str:
        return self.label()

    def label(self) -> str:
        """Compact label such as ``1278`` (comma separated when n >= 10)."""
        if self.labels[-1] >= 10:
            return "-".join(str(q) for q in self.labels)
        return "".join(str(q) for q in self.labels)

    def axes(self) -> list[int]:
        return [q - 1 for q in self.labels]

    def check(self, n: int) -> "QubitSubset":
        if self.labels[-1] > n:
            raise ValueError(f"label {self.labels[-1]} exceeds qubit count {n}")
        return self

    def complement(self, n: int) -> "QubitSubset":
        rest = tuple(q for q in range(1, n + 1) if q not in self.labels)
        return QubitSubset(rest)

    @classmethod
    def parse(cls, text: str) -> "QubitSubset":
        text = text.strip()
        if any(sep in text for sep in ",- "):
            parts = [p for p in text.replace(",", " ").replace("-", " ").split()]
            return cls(tuple(sorted(int(p) for p in parts)))
        return cls(tuple(sorted(int(ch) for ch in text)))


def as_subset(subset, n: int | None = None) -> QubitSubset:
    """Coerce a QubitSubset, label string or iterable of labels."""
    if isinstance(subset, QubitSubset):
        out = subset
    elif isinstance(subset, str):
        out = QubitSubset.parse(subset)
    elif isinstance(subset, (int, np.integer)):
        out = QubitSubset((int(subset),))
    else:
        labels = tuple(int(q) for q in subset)
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate qubit labels: {labels}")
        out = QubitSubset(tuple(sorted(labels)))
    return out.check(n) if n is not None else out


def _check_n(n: int, low: int = 2) -> int:
    if int(n) != n or not low <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count must be in [{low}, {MAX_QUBITS}], got {n}")
    return int(n)


def make_state(n: int, amplitudes: Sequence[complex] | np.ndarray) -> StateVector:
    """Normalize ``amplitudes`` into a state, flagging noticeable drift."""
    n = _check_n(n, MIN_QUBITS)
    amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    if amps.size != 2**n:
        raise ValueError(f"expected {2**n} amplitudes for n={n}, got {amps.size}")
    if not np.all(np.isfinite(amps)):
        raise ValueError("amplitudes must be finite")
    norm = math.sqrt(math.fsum(np.abs(amps) ** 2))
    if norm == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return StateVector(n, amps / norm, drifted=abs(norm - 1.0) > DRIFT_TOL)


def basis_state(n: int, index: int) -> StateVector:
    amps = np.zeros(2**n, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(_check_n(n, MIN_QUBITS), amps)


def product_state(n: int) -> StateVector:
    """|0...0> on n qubits."""
    return basis_state(_check_n(n), 0)


def ghz_state(n: int) -> StateVector:
    """(|0...0> + |1...1>)/sqrt(2)."""
    n = _check_n(n)
    amps = np.zeros(2**n, dtype=np.complex128)
    amps[0] = amps[-1] = 1 / math.sqrt(2)
    return StateVector(n, amps)


def random_state(n: int, seed: int | np.random.Generator | None = None) -> StateVector:
    """Haar-random state from a normalized complex Gaussian vector."""
    n = _check_n(n)
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return StateVector(n, raw / np.linalg.norm(raw))


# Nine-qubit state with maximally mixed 1-, 2- and 3-qubit marginals and
# balanced-purity average 1/14. Each entry is "<qubits 1-4>_<qubits 5-9><sign>";
# every listed amplitude has magnitude 1/(8*sqrt(2)). One row per 4-qubit
# basis ket, so each row is that ket's 8-term factor on qubits 5-9.
ZHA_TABLE = """
0000_00011+ 0000_00110+ 0000_01010+ 0000_01111- 0000_10000+ 0000_10101+ 0000_11001- 0000_11100+
0001_00001+ 0001_00100+ 0001_01000- 0001_01101+ 0001_10010- 0001_10111- 0001_11011- 0001_11110+
0010_00001- 0010_00100+ 0010_01000+ 0010_01101+ 0010_10010+ 0010_10111- 0010_11011+ 0010_11110+
0011_00011+ 0011_00110- 0011_01010+ 0011_01111+ 0011_10000+ 0011_10101- 0011_11001- 0011_11100-
0100_00001+ 0100_00100+ 0100_01000- 0100_01101+ 0100_10010- 0100_10111- 0100_11011- 0100_11110+
0101_00011+ 0101_00110+ 0101_01010+ 0101_01111- 0101_10000+ 0101_10101+ 0101_11001- 0101_11100+
0110_00011- 0110_00110+ 0110_01010- 0110_01111- 0110_10000- 0110_10101+ 0110_11001+ 0110_11100+
0111_00001+ 0111_00100- 0111_01000- 0111_01101- 0111_10010- 0111_10111+ 0111_11011- 0111_11110-
1000_00001- 1000_00100+ 1000_01000+ 1000_01101+ 1000_10010+ 1000_10111- 1000_11011+ 1000_11110+
1001_00011- 1001_00110+ 1001_01010- 1001_01111- 1001_10000- 1001_10101+ 1001_11001+ 1001_11100+
1010_00011- 1010_00110- 1010_01010- 1010_01111+ 1010_10000- 1010_10101- 1010_11001+ 1010_11100-
1011_00001+ 1011_00100+ 1011_01000- 1011_01101+ 1011_10010- 1011_10111- 1011_11011- 1011_11110+
1100_00011+ 1100_00110- 1100_01010+ 1100_01111+ 1100_10000+ 1100_10101- 1100_11001- 1100_11100-
1101_00001+ 1101_00100- 1101_01000- 1101_01101- 1101_10010- 1101_10111+ 1101_11011- 1101_11110-
1110_00001+ 1110_00100+ 1110_01000- 1110_01101+ 1110_10010- 1110_10111- 1110_11011- 1110_11110+
1111_00011- 1111_00110- 1111_01010- 1111_01111+ 1111_10000- 1111_10101- 1111_11001+ 1111_11100-
"""


def zha_table() -> list[tuple[int, int]]:
    """The (basis index, sign) pairs of the nine-qubit table."""
    entries = []
    for token in ZHA_TABLE.split():
        bits, sign = token[:-1].replace("_", ""), token[-1]
        entries.append((int(bits, 2), 1 if sign == "+" else -1))
    return entries


def state_from_signs(n: int, entries: Iterable[tuple[int, int]]) -> StateVector:
    """Equal-weight superposition with the given (index, sign) support."""
    amps = np.zeros(2**n, dtype=np.complex128)
    entries = list(entries)
    for index, sign in entries:
        if amps[index] != 0:
            raise ValueError(f"index {index} listed twice")
        amps[index] = sign
    return make_state(n, amps / math.sqrt(len(entries)))


def zha_nine_qubit_state() -> StateVector:
    return state_from_signs(9, zha_table())


BUILTINS = {
    "zero": product_state,
    "ghz": ghz_state,
    "zha9": lambda n=9: zha_nine_qubit_state(),
}


def builtin_state(name: str, n: int = 9) -> StateVector:
    if name not in BUILTINS:
        raise KeyError(f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}")
    if name == "zha9" and n != 9:
        raise ValueError("zha9 is a nine-qubit state")
    return BUILTINS[name](n)


def format_state(state: StateVector, cutoff: float = 0.0) -> str:
    """Text form: ``nqubits=<n>`` then ``<binary index> <real> <imag>`` lines."""
    lines = [f"nqubits={state.n}"]
    for index in np.flatnonzero(np.abs(state.amplitudes) > cutoff):
        amp = state.amplitudes[index]
        lines.append(f"{int(index):0{state.n}b} {float(amp.real)!r} {float(amp.imag)!r}")
    return "\n".join(lines) + "\n"


def parse_state(text: str) -> StateVector:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("nqubits="):
        raise StateFileError("missing 'nqubits=<n>' header")
    try:
        n = int(lines[0].split("=", 1)[1])
    except ValueError as exc:
        raise StateFileError(f"bad header {lines[0]!r}") from exc
    if not MIN_QUBITS <= n <= MAX_QUBITS:
        raise StateFileError(f"qubit count {n} out of range")
    amps = np.zeros(2**n, dtype=np.complex128)
    seen = set()
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 3 or len(parts[0]) != n or set(parts[0]) - {"0", "1"}:
            raise StateFileError(f"line {lineno}: expected '<{n}-bit index> <real> <imag>'")
        index = int(parts[0], 2)
        if index in seen:
            raise StateFileError(f"line {lineno}: index {parts[0]} repeated")
        seen.add(index)
        try:
            amps[index] = complex(float(parts[1]), float(parts[2]))
        except ValueError as exc:
            raise StateFileError(f"line {lineno}: {exc}") from exc
    try:
        return make_state(n, amps)
    except ValueError as exc:
        raise StateFileError(str(exc)) from exc


def read_state(path: str | os.PathLike) -> StateVector:
    with open(path, encoding="utf-8") as fh:
        return parse_state(fh.read())


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_state(state: StateVector, path: str | os.PathLike) -> None:
    atomic_write(path, format_state(state))
