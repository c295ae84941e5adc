"""Bit-packed Pauli-string and Pauli-sum arithmetic.

A string is stored as an (x, z) bitmask pair plus a power-of-i phase; the
operator is i^phase * tensor of letters, where qubit q carries X when bit q of
x is set, Z when bit q of z is set, and Y when both are.  Sums map phase-free
strings to complex coefficients.

Also here: the ladder-operator map of fermionic modes onto strings, reduction
of a sum modulo the signed stabilizers of prepared branch states, and greedy
grouping of strings into shared measurement bases.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .circuits import Circuit, Gate, run

PRUNE_TOL = 1e-12

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}
_PHASES = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def _mul_keys(x1: int, z1: int, x2: int, z2: int) -> tuple[int, int, int]:
    """Product of two phase-free strings: (x, z, power-of-i)."""
    x, z = x1 ^ x2, z1 ^ z2
    ph = (
        (x1 & z1).bit_count()
        + (x2 & z2).bit_count()
        + 2 * (z1 & x2).bit_count()
        - (x & z).bit_count()
    ) % 4
    return x, z, ph


def _reverse_bits(mask: int, n: int) -> int:
    out = 0
    for q in range(n):
        if mask >> q & 1:
            out |= 1 << (n - 1 - q)
    return out


@dataclass(frozen=True)
class PauliString:
    qubit_count: int
    x: int
    z: int
    phase: int = 0  # power of i

    def __post_init__(self) -> None:
        mask = (1 << self.qubit_count) - 1
        if self.x & ~mask or self.z & ~mask:
            raise ValueError("mask exceeds register size")
        object.__setattr__(self, "phase", self.phase % 4)

    @staticmethod
    def identity(qubit_count: int) -> "PauliString":
        return PauliString(qubit_count, 0, 0)

    @staticmethod
    def from_letters(letters: str, phase: int = 0) -> "PauliString":
        x = z = 0
        for q, letter in enumerate(letters):
            xb, zb = _LETTER_BITS[letter]
            x |= xb << q
            z |= zb << q
        return PauliString(len(letters), x, z, phase)

    @property
    def letters(self) -> str:
        return "".join(
            _BITS_LETTER[(self.x >> q & 1, self.z >> q & 1)] for q in range(self.qubit_count)
        )

    @property
    def phase_factor(self) -> complex:
        return _PHASES[self.phase]

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q in range(self.qubit_count) if (self.x | self.z) >> q & 1)

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def letter(self, q: int) -> str:
        return _BITS_LETTER[(self.x >> q & 1, self.z >> q & 1)]

    def phase_free(self) -> "PauliString":
        return PauliString(self.qubit_count, self.x, self.z)

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.qubit_count != other.qubit_count:
            raise ValueError("register size mismatch")
        x, z, ph = _mul_keys(self.x, self.z, other.x, other.z)
        return PauliString(self.qubit_count, x, z, (ph + self.phase + other.phase) % 4)

    def dagger(self) -> "PauliString":
        return PauliString(self.qubit_count, self.x, self.z, (-self.phase) % 4)

    def commutes_with(self, other: "PauliString") -> bool:
        return ((self.x & other.z).bit_count() + (self.z & other.x).bit_count()) % 2 == 0

    def apply(self, state: np.ndarray) -> np.ndarray:
        """Apply to a statevector (qubit 0 = most significant index bit)."""
        n = self.qubit_count
        xs = _reverse_bits(self.x, n)
        zs = _reverse_bits(self.z, n)
        idx = np.arange(state.size)
        signs = 1.0 - 2.0 * (np.bitwise_count(idx & zs) & 1).astype(float)
        base = _PHASES[(self.phase + (self.x & self.z).bit_count()) % 4]
        out = np.empty_like(state, dtype=complex)
        out[idx ^ xs] = base * signs * state
        return out

    def __repr__(self) -> str:
        pre = {0: "", 1: "i*", 2: "-", 3: "-i*"}[self.phase]
        return f"{pre}{self.letters}"


class PauliSum:
    """Linear combination of phase-free Pauli strings with complex weights."""

    __slots__ = ("qubit_count", "_terms")

    def __init__(self, qubit_count: int, terms: dict[tuple[int, int], complex] | None = None):
        self.qubit_count = qubit_count
        self._terms: dict[tuple[int, int], complex] = dict(terms) if terms else {}

    # ---- constructors ----
    @staticmethod
    def zero(qubit_count: int) -> "PauliSum":
        return PauliSum(qubit_count)

    @staticmethod
    def identity(qubit_count: int, coeff: complex = 1.0) -> "PauliSum":
        return PauliSum(qubit_count, {(0, 0): complex(coeff)})

    @staticmethod
    def from_string(string: PauliString, coeff: complex = 1.0) -> "PauliSum":
        return PauliSum(
            string.qubit_count, {(string.x, string.z): complex(coeff) * string.phase_factor}
        )

    @staticmethod
    def from_terms(items: Iterable[tuple[PauliString, complex]], qubit_count: int) -> "PauliSum":
        out = PauliSum(qubit_count)
        for s, c in items:
            out._add_key(s.x, s.z, complex(c) * s.phase_factor)
        return out

    def copy(self) -> "PauliSum":
        return PauliSum(self.qubit_count, self._terms)

    # ---- inspection ----
    def __len__(self) -> int:
        return len(self._terms)

    def items(self) -> Iterator[tuple[PauliString, complex]]:
        for (x, z), c in self._terms.items():
            yield PauliString(self.qubit_count, x, z), c

    def coefficient(self, string: PauliString) -> complex:
        return self._terms.get((string.x, string.z), 0.0j) * np.conj(string.phase_factor)

    @property
    def identity_coefficient(self) -> complex:
        return self._terms.get((0, 0), 0.0j)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return all(abs(c.imag) < tol for c in self._terms.values())

    # ---- algebra ----
    def _add_key(self, x: int, z: int, c: complex) -> None:
        key = (x, z)
        new = self._terms.get(key, 0.0j) + c
        if new == 0:
            self._terms.pop(key, None)
        else:
            self._terms[key] = new

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if self.qubit_count != other.qubit_count:
            raise ValueError("register size mismatch")
        out = self.copy()
        for key, c in other._terms.items():
            out._add_key(*key, c)
        return out

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (other * -1.0)

    def __mul__(self, scalar: complex) -> "PauliSum":
        if scalar == 0:
            return PauliSum(self.qubit_count)
        return PauliSum(self.qubit_count, {k: c * scalar for k, c in self._terms.items()})

    __rmul__ = __mul__

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        if self.qubit_count != other.qubit_count:
            raise ValueError("register size mismatch")
        out = PauliSum(self.qubit_count)
        for (x1, z1), c1 in self._terms.items():
            for (x2, z2), c2 in other._terms.items():
                x, z, ph = _mul_keys(x1, z1, x2, z2)
                out._add_key(x, z, c1 * c2 * _PHASES[ph])
        return out

    def dagger(self) -> "PauliSum":
        return PauliSum(self.qubit_count, {k: np.conj(c) for k, c in self._terms.items()})

    def simplify(self, tol: float = PRUNE_TOL) -> "PauliSum":
        """Drop terms with |coefficient| below tol (merging is maintained
        incrementally by construction). Idempotent."""
        return PauliSum(
            self.qubit_count, {k: c for k, c in self._terms.items() if abs(c) > tol}
        )

    # ---- action on states ----
    def apply(self, state: np.ndarray) -> np.ndarray:
        n = self.qubit_count
        idx = np.arange(state.size)
        out = np.zeros(state.size, dtype=complex)
        for (x, z), c in self._terms.items():
            xs = _reverse_bits(x, n)
            zs = _reverse_bits(z, n)
            signs = 1.0 - 2.0 * (np.bitwise_count(idx & zs) & 1).astype(float)
            base = c * _PHASES[(x & z).bit_count() % 4]
            np.add.at(out, idx ^ xs, base * signs * state)
        return out

    def expectation(self, state: np.ndarray) -> complex:
        return complex(np.vdot(state, self.apply(state)))


# ---------------------------------------------------------------------------
# fermionic ladder map
# ---------------------------------------------------------------------------

def jw_mode(species: str, k: int, dagger: bool, n_modes: int) -> PauliSum:
    """Ladder operator of mode (species, k) as a two-string sum on 2*n_modes
    qubits.

    Fermion modes sit on even qubits (2k), antifermion modes on odd (2k+1);
    annihilators are prefix * (X + iY)/2 with a product of (-Z) factors on all
    preceding qubits, so every annihilator kills |0...0>.
    """
    if species not in ("b", "c"):
        raise ValueError("species must be 'b' (fermion) or 'c' (antifermion)")
    if not (0 <= k < n_modes):
        raise IndexError(f"mode index {k} outside [0, {n_modes})")
    n = 2 * n_modes
    q = 2 * k if species == "b" else 2 * k + 1
    prefix = (1 << q) - 1  # Z on every qubit below q
    sign = 1.0 if q % 2 == 0 else -1.0  # parity of the (-1) factors in the prefix
    ladder_sign = 1.0j if not dagger else -1.0j
    out = PauliSum(n)
    out._add_key(1 << q, prefix, 0.5 * sign)  # prefix * X_q
    out._add_key(1 << q, prefix | (1 << q), 0.5 * sign * ladder_sign)  # prefix * Y_q
    return out


def mode_qubit(species: str, k: int) -> int:
    return 2 * k if species == "b" else 2 * k + 1


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def serialize_sum(s: PauliSum) -> str:
    """One term per line: 're+imi letterstring' with a trailing 'i' on the
    imaginary part, e.g. '+0.25-0i IXYZII'."""
    lines = []
    for string, coeff in sorted(s.items(), key=lambda it: (it[0].x, it[0].z)):
        lines.append(f"{coeff.real:+.15g}{coeff.imag:+.15g}i {string.letters}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_sum(text: str, qubit_count: int) -> PauliSum:
    out = PauliSum(qubit_count)
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        value, letters = line.rsplit(" ", 1)
        if not value.endswith("i"):
            raise ValueError(f"malformed coefficient {value!r}")
        coeff = complex(value[:-1].replace("i", "j") + "j")
        string = PauliString.from_letters(letters)
        out._add_key(string.x, string.z, coeff)
    return out


# ---------------------------------------------------------------------------
# measurement grouping
# ---------------------------------------------------------------------------

@dataclass
class MeasurementGroup:
    """Strings sharing one measurement basis.

    basis_change maps every member to a pure Z-string: Hadamard on X
    positions, the CalY rotation on Y positions.
    """

    basis_change: Circuit
    diagonal_strings: list[tuple[PauliString, complex]]
    members: list[tuple[PauliString, complex]]


def group_measurement_bases(s: PauliSum) -> list[MeasurementGroup]:
    """Greedy first-fit partition into qubit-wise compatible groups, seeded in
    descending |coefficient| order."""
    n = s.qubit_count
    groups: list[dict] = []
    ordered = sorted(s.items(), key=lambda it: -abs(it[1]))
    for string, coeff in ordered:
        placed = False
        for g in groups:
            tmpl = g["template"]
            if all(q not in tmpl or tmpl[q] == string.letter(q) for q in string.support):
                for q in string.support:
                    tmpl[q] = string.letter(q)
                g["members"].append((string, coeff))
                placed = True
                break
        if not placed:
            groups.append(
                {"template": {q: string.letter(q) for q in string.support},
                 "members": [(string, coeff)]}
            )

    out: list[MeasurementGroup] = []
    for g in groups:
        gates = []
        for q in sorted(g["template"]):
            letter = g["template"][q]
            if letter == "X":
                gates.append(Gate.h(q))
            elif letter == "Y":
                gates.append(Gate.caly(q))
        basis = Circuit(n, tuple(gates))
        diag = [
            (PauliString(n, 0, string.x | string.z), coeff)
            for string, coeff in g["members"]
        ]
        out.append(MeasurementGroup(basis, diag, g["members"]))
    return out


# ---------------------------------------------------------------------------
# reduction modulo branch stabilizers
# ---------------------------------------------------------------------------

class _StabilizerProbe:
    """Numerically decide whether a phase-free string fixes a state up to a
    sign, caching verdicts."""

    def __init__(self, state: np.ndarray, tol: float = 1e-10):
        self.state = state
        self.tol = tol
        self._cache: dict[tuple[int, int], float | None] = {}

    def eigenvalue(self, x: int, z: int, n: int) -> float | None:
        key = (x, z)
        if key in self._cache:
            return self._cache[key]
        v = PauliString(n, x, z).apply(self.state)
        lam = complex(np.vdot(self.state, v))
        verdict: float | None = None
        if abs(lam.imag) < self.tol and abs(abs(lam.real) - 1.0) < self.tol:
            if np.max(np.abs(v - lam.real * self.state)) < self.tol:
                verdict = float(np.sign(lam.real))
        self._cache[key] = verdict
        return verdict


def stabilizer_reduce(
    s: PauliSum,
    branch_circuits: Sequence[Circuit],
    tol: float = 1e-10,
    drop_zero_sandwich: bool = True,
) -> dict[tuple[int, int], PauliSum]:
    """Reduce a sum per branch pair, merging strings equivalent modulo the
    signed stabilizer group of the prepared branch states.

    For the (m, n) sandwich <0|U_m^dag . U_n|0>, strings P and R merge when
    R*P fixes U_n|0> up to a sign (right merge) or P*R fixes U_m|0> (left
    merge); the merged sum has identical sandwich values.  Strings fixing the
    branch outright fold onto the identity term (their eigenvalue).  With
    ``drop_zero_sandwich``, surviving representatives whose sandwich vanishes
    on the given branch states (e.g. X or Y on a qubit both branches pin to
    |0>) are removed as well; callers reusing a reduction across a circuit
    family should validate it at a second parameter point.
    """
    states = [run(c) for c in branch_circuits]
    probes = [_StabilizerProbe(st, tol) for st in states]
    n = s.qubit_count
    out: dict[tuple[int, int], PauliSum] = {}
    for m in range(len(branch_circuits)):
        for nn in range(m, len(branch_circuits)):
            reduced = PauliSum(n)
            reps: list[tuple[int, int]] = [(0, 0)]  # identity seeded first
            reduced._terms[(0, 0)] = 0.0j
            ordered = sorted(s.items(), key=lambda it: (-abs(it[1]), it[0].x, it[0].z))
            for string, coeff in ordered:
                key = (string.x, string.z)
                merged = False
                for rep in reps:
                    # right merge: P = R * (R*P), (R*P) fixing |psi_n>
                    dx, dz, dph = _mul_keys(*rep, *key)
                    lam = probes[nn].eigenvalue(dx, dz, n)
                    if lam is not None:
                        reduced._add_key(*rep, coeff * _PHASES[dph] * lam)
                        merged = True
                        break
                    # left merge: P = (P*R) * R, (P*R) fixing |psi_m>
                    dx, dz, dph = _mul_keys(*key, *rep)
                    lam = probes[m].eigenvalue(dx, dz, n)
                    if lam is not None:
                        reduced._add_key(*rep, coeff * _PHASES[dph] * lam)
                        merged = True
                        break
                if not merged:
                    reps.append(key)
                    reduced._add_key(*key, coeff)
            if drop_zero_sandwich:
                left = states[m]
                for key in list(reduced._terms):
                    value = np.vdot(left, PauliString(n, *key).apply(states[nn]))
                    if abs(value) < tol and key != (0, 0):
                        reduced._terms.pop(key)
            if reduced._terms.get((0, 0)) == 0.0j:
                reduced._terms.pop((0, 0), None)
            out[(m, nn)] = reduced.simplify()
    return out


def sandwich(state_left: np.ndarray, s: PauliSum, state_right: np.ndarray) -> complex:
    """<left|S|right> for arbitrary states."""
    return complex(np.vdot(state_left, s.apply(state_right)))
