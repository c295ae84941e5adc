import numpy as np
import pytest

from thirring import LatticeParams

# pass/fail ledger filled by the acceptance tests, echoed in the run summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

# Pauli letters as dense matrices, the oracle side of the algebra tests.
I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
LETTER_MATS = {"I": I2, "X": X, "Y": Y, "Z": Z}


def kron_letters(letters: str) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for letter in letters:
        out = np.kron(out, LETTER_MATS[letter])
    return out


def dense_of_sum(s) -> np.ndarray:
    """Independent dense realization of a PauliSum (qubit 0 = MSB)."""
    dim = 1 << s.qubit_count
    out = np.zeros((dim, dim), dtype=complex)
    for string, coeff in s.items():
        out += coeff * kron_letters(string.letters)
    return out


def basis_index(bits: str) -> int:
    return int(bits, 2)


@pytest.fixture
def reference_params() -> LatticeParams:
    """The N=3 configuration used throughout: m0=10, xi=0.7."""
    return LatticeParams(N=3, m0=10.0, g2=1.0, xi=0.7)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


def random_params(rng: np.random.Generator, N: int, with_cutoff: bool = False) -> LatticeParams:
    return LatticeParams(
        N=N,
        m0=float(rng.uniform(0.5, 12.0)),
        g2=float(rng.uniform(0.0, 5.0)),
        xi=float(rng.uniform(0.1, 0.9)),
        ir_cutoff=with_cutoff,
    )
