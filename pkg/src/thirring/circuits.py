"""Statevector engine for small circuits.

Gate set: X, Hadamard, RotY, the calibration rotation CalY (and its inverse),
CNOT, the single-CNOT controlled-RotY composite, and barriers.  Noise is a
stochastic-trajectory model: after each CNOT a two-qubit depolarizing event
fires with probability ``cnot_depol`` and inserts a uniformly random
non-identity two-qubit Pauli.  Readout noise is applied at sampling time as
independent per-qubit classical bit flips.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping, Sequence

import numpy as np

MAX_QUBITS = 12

_SQ2 = 1.0 / math.sqrt(2.0)
_MAT_X = np.array([[0, 1], [1, 0]], dtype=complex)
_MAT_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_MAT_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_MAT_H = np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex)
# exp(-i pi X / 4); chosen so that CalY^dag Z CalY = Y.
_MAT_CALY = np.array([[1, -1j], [-1j, 1]], dtype=complex) * _SQ2
_MAT_CALYDAG = _MAT_CALY.conj().T

_PAULI_1Q = {"I": np.eye(2, dtype=complex), "X": _MAT_X, "Y": _MAT_Y, "Z": _MAT_Z}
# the 15 non-identity two-qubit Pauli letters for depolarizing insertions
_DEPOL_PAIRS = [(a, b) for a in "IXYZ" for b in "IXYZ" if (a, b) != ("I", "I")]


def roty_matrix(angle: float) -> np.ndarray:
    """exp(-i*angle*Y/2); maps |0> to cos(a/2)|0> + sin(a/2)|1>."""
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def caly_matrix() -> np.ndarray:
    return _MAT_CALY.copy()


def croty_matrix(angle: float) -> np.ndarray:
    """Direct 4x4 of the single-CNOT controlled-RotY composite.

    On the control-1 block the target sees RotY(angle/2), X, RotY(-angle/2),
    i.e. RotY(-angle)X; acting on target |0> this coincides with a controlled
    rotation of angle pi-angle.
    """
    block = roty_matrix(-angle) @ _MAT_X
    out = np.eye(4, dtype=complex)
    out[2:, 2:] = block
    return out


class GateError(ValueError):
    """Invalid gate construction or application."""


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...] = ()
    angle: float | None = None

    @staticmethod
    def x(q: int) -> "Gate":
        return Gate("x", (q,))

    @staticmethod
    def h(q: int) -> "Gate":
        return Gate("h", (q,))

    @staticmethod
    def ry(q: int, angle: float) -> "Gate":
        return Gate("ry", (q,), angle)

    @staticmethod
    def caly(q: int) -> "Gate":
        return Gate("caly", (q,))

    @staticmethod
    def caly_dag(q: int) -> "Gate":
        return Gate("calydag", (q,))

    @staticmethod
    def cnot(control: int, target: int) -> "Gate":
        if control == target:
            raise GateError("CNOT control and target must differ")
        return Gate("cnot", (control, target))

    @staticmethod
    def croty(control: int, target: int, angle: float) -> "Gate":
        if control == target:
            raise GateError("CRotY control and target must differ")
        return Gate("cry", (control, target), angle)

    @staticmethod
    def barrier() -> "Gate":
        return Gate("barrier", ())

    def lowered(self) -> Iterator["Gate"]:
        """Expand composites to primitive gates (CRotY -> half-angle sandwich)."""
        if self.kind == "cry":
            c, t = self.qubits
            assert self.angle is not None
            yield Gate.ry(t, self.angle / 2.0)
            yield Gate.cnot(c, t)
            yield Gate.ry(t, -self.angle / 2.0)
        elif self.kind == "barrier":
            return
        else:
            yield self


@dataclass(frozen=True)
class Circuit:
    qubit_count: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self) -> None:
        if not (1 <= self.qubit_count <= MAX_QUBITS):
            raise GateError(f"qubit_count must be in [1, {MAX_QUBITS}]")
        for g in self.gates:
            for q in g.qubits:
                if not (0 <= q < self.qubit_count):
                    raise GateError(f"gate {g.kind} touches qubit {q} outside register")

    def lowered_gates(self) -> list[Gate]:
        return [p for g in self.gates for p in g.lowered()]

    @property
    def cnot_count(self) -> int:
        return sum(1 for g in self.lowered_gates() if g.kind == "cnot")

    def then(self, other: "Circuit") -> "Circuit":
        if other.qubit_count != self.qubit_count:
            raise GateError("register size mismatch")
        return Circuit(self.qubit_count, self.gates + other.gates)


@dataclass(frozen=True)
class NoiseCalibration:
    """Per-qubit readout flip probabilities and the per-CNOT depolarizing rate.

    p01[i] = p(read 0 | true 1), p10[i] = p(read 1 | true 0).
    """

    p01: tuple[float, ...]
    p10: tuple[float, ...]
    cnot_depol: float = 0.0

    def __post_init__(self) -> None:
        if len(self.p01) != len(self.p10):
            raise ValueError("p01 and p10 must have equal length")
        for p in (*self.p01, *self.p10, self.cnot_depol):
            if not (0.0 <= p < 1.0):
                raise ValueError("probabilities must lie in [0, 1)")
        for a, b in zip(self.p01, self.p10):
            if a + b >= 1.0:
                raise ValueError("p01 + p10 must stay below 1 per qubit")

    @property
    def qubit_count(self) -> int:
        return len(self.p01)

    @property
    def p_plus(self) -> np.ndarray:
        return np.asarray(self.p01) + np.asarray(self.p10)

    @property
    def p_minus(self) -> np.ndarray:
        return np.asarray(self.p01) - np.asarray(self.p10)

    @staticmethod
    def uniform(qubit_count: int, p01: float, p10: float, cnot_depol: float) -> "NoiseCalibration":
        return NoiseCalibration((p01,) * qubit_count, (p10,) * qubit_count, cnot_depol)

    @staticmethod
    def noiseless(qubit_count: int) -> "NoiseCalibration":
        return NoiseCalibration.uniform(qubit_count, 0.0, 0.0, 0.0)

    @property
    def has_readout_noise(self) -> bool:
        return any(p > 0 for p in self.p01) or any(p > 0 for p in self.p10)

    def to_file(self, path: str | Path) -> None:
        lines = []
        for i, (a, b) in enumerate(zip(self.p01, self.p10)):
            lines.append(f"qubits[{i}].p01 = {a!r}")
            lines.append(f"qubits[{i}].p10 = {b!r}")
        lines.append(f"cnot_depol = {self.cnot_depol!r}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @staticmethod
    def from_file(path: str | Path) -> "NoiseCalibration":
        entries: dict[str, float] = {}
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            entries[key.strip()] = float(value.strip())
        depol = entries.pop("cnot_depol", 0.0)
        qubits: dict[int, dict[str, float]] = {}
        for key, value in entries.items():
            if not key.startswith("qubits["):
                raise ValueError(f"unknown calibration key {key!r}")
            idx, _, prob = key[len("qubits["):].partition("].")
            qubits.setdefault(int(idx), {})[prob] = value
        n = max(qubits) + 1 if qubits else 0
        p01 = tuple(qubits.get(i, {}).get("p01", 0.0) for i in range(n))
        p10 = tuple(qubits.get(i, {}).get("p10", 0.0) for i in range(n))
        return NoiseCalibration(p01, p10, depol)


def _apply_1q(state: np.ndarray, mat: np.ndarray, q: int, n: int) -> np.ndarray:
    pre, post = 1 << q, 1 << (n - q - 1)
    s = state.reshape(pre, 2, post)
    out = np.empty_like(s)
    out[:, 0, :] = mat[0, 0] * s[:, 0, :] + mat[0, 1] * s[:, 1, :]
    out[:, 1, :] = mat[1, 0] * s[:, 0, :] + mat[1, 1] * s[:, 1, :]
    return out.reshape(-1)


def _apply_cnot(state: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    s = state.reshape((2,) * n)
    out = s.copy()
    sel1: list = [slice(None)] * n
    sel1[control] = 1
    a = list(sel1)
    a[target] = 0
    b = list(sel1)
    b[target] = 1
    out[tuple(a)] = s[tuple(b)]
    out[tuple(b)] = s[tuple(a)]
    return out.reshape(-1)


_GATE_MATS = {"x": _MAT_X, "h": _MAT_H, "caly": _MAT_CALY, "calydag": _MAT_CALYDAG}


def _run_with_insertions(circuit: Circuit, insertions: Mapping[int, tuple[str, str]]) -> np.ndarray:
    """Run the lowered circuit, inserting a two-qubit Pauli after selected CNOTs.

    ``insertions`` maps the ordinal index of a CNOT (in lowered order) to the
    (control-letter, target-letter) Pauli pair inserted after it.
    """
    n = circuit.qubit_count
    state = np.zeros(1 << n, dtype=complex)
    state[0] = 1.0
    cnot_idx = 0
    for g in circuit.lowered_gates():
        if g.kind == "cnot":
            c, t = g.qubits
            state = _apply_cnot(state, c, t, n)
            pair = insertions.get(cnot_idx)
            if pair is not None:
                for letter, q in zip(pair, (c, t)):
                    if letter != "I":
                        state = _apply_1q(state, _PAULI_1Q[letter], q, n)
            cnot_idx += 1
        elif g.kind == "ry":
            state = _apply_1q(state, roty_matrix(g.angle), g.qubits[0], n)
        else:
            state = _apply_1q(state, _GATE_MATS[g.kind], g.qubits[0], n)
    return state


def _sample_insertions(circuit: Circuit, depol: float, rng: np.random.Generator) -> dict[int, tuple[str, str]]:
    n_cnots = circuit.cnot_count
    if depol <= 0.0 or n_cnots == 0:
        return {}
    hits = rng.random(n_cnots) < depol
    out: dict[int, tuple[str, str]] = {}
    for idx in np.flatnonzero(hits):
        out[int(idx)] = _DEPOL_PAIRS[int(rng.integers(len(_DEPOL_PAIRS)))]
    return out


def run(
    circuit: Circuit,
    noise: NoiseCalibration | None = None,
    seed: int | None = None,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Statevector after the circuit; one stochastic trajectory when noisy.

    Noiseless mode is exact and deterministic.  With ``noise`` given, each
    CNOT independently suffers a depolarizing event with probability
    ``noise.cnot_depol``; the run is reproducible from ``seed``.
    """
    insertions: Mapping[int, tuple[str, str]] = {}
    if noise is not None and noise.cnot_depol > 0.0:
        if rng is None:
            rng = np.random.default_rng(seed)
        insertions = _sample_insertions(circuit, noise.cnot_depol, rng)
    return _run_with_insertions(circuit, insertions)


def unitary_of(circuit: Circuit) -> np.ndarray:
    """Dense unitary of a noiseless circuit (small registers only)."""
    n = circuit.qubit_count
    dim = 1 << n
    cols = []
    for k in range(dim):
        state = np.zeros(dim, dtype=complex)
        state[k] = 1.0
        for g in circuit.lowered_gates():
            if g.kind == "cnot":
                state = _apply_cnot(state, *g.qubits, n)
            elif g.kind == "ry":
                state = _apply_1q(state, roty_matrix(g.angle), g.qubits[0], n)
            else:
                state = _apply_1q(state, _GATE_MATS[g.kind], g.qubits[0], n)
        cols.append(state)
    return np.array(cols).T


def exact_expectation(state: np.ndarray, observable) -> float:
    """<state|observable|state> for a Hermitian Pauli-sum observable."""
    if not observable.is_hermitian():
        raise ValueError("observable must be Hermitian")
    value = np.vdot(state, observable.apply(state))
    if abs(value.imag) >= 1e-10:
        raise ArithmeticError(f"expectation has imaginary residue {value.imag:.3e}")
    return float(value.real)


def bitstring_of(index: int, qubit_count: int) -> str:
    return format(index, f"0{qubit_count}b")


def sample_counts(
    state: np.ndarray,
    shots: int,
    noise: NoiseCalibration | None = None,
    seed: int | None = None,
    rng: np.random.Generator | None = None,
) -> dict[str, int]:
    """Multinomial shot sampling with optional per-qubit readout bit flips.

    Deterministic per seed; with a trivial (or absent) calibration the flip
    stage consumes no randomness, so zero-noise sampling is bit-identical to
    noiseless sampling under the same seed.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if rng is None:
        rng = np.random.default_rng(seed)
    n = int(round(math.log2(state.size)))
    probs = np.abs(state) ** 2
    probs = probs / probs.sum()
    outcomes = rng.choice(state.size, size=shots, p=probs)
    if noise is not None and noise.has_readout_noise:
        if noise.qubit_count != n:
            raise ValueError("calibration register size mismatch")
        for q in range(n):
            p01, p10 = noise.p01[q], noise.p10[q]
            if p01 == 0.0 and p10 == 0.0:
                continue
            bit = 1 << (n - 1 - q)
            ones = (outcomes & bit) != 0
            flip_prob = np.where(ones, p01, p10)
            flips = rng.random(shots) < flip_prob
            outcomes = np.where(flips, outcomes ^ bit, outcomes)
    values, counts = np.unique(outcomes, return_counts=True)
    return {bitstring_of(int(v), n): int(c) for v, c in zip(values, counts)}


def _batch_apply_1q(states: np.ndarray, mat: np.ndarray, q: int, n: int) -> np.ndarray:
    """Apply a one-qubit gate to every row of a (batch, 2^n) state matrix."""
    batch = states.shape[0]
    pre, post = 1 << q, 1 << (n - q - 1)
    s = states.reshape(batch, pre, 2, post)
    out = np.empty_like(s)
    out[:, :, 0, :] = mat[0, 0] * s[:, :, 0, :] + mat[0, 1] * s[:, :, 1, :]
    out[:, :, 1, :] = mat[1, 0] * s[:, :, 0, :] + mat[1, 1] * s[:, :, 1, :]
    return out.reshape(batch, -1)


def _cnot_permutation(control: int, target: int, n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    cbit = 1 << (n - 1 - control)
    tbit = 1 << (n - 1 - target)
    return np.where(idx & cbit, idx ^ tbit, idx)


def _pauli_phase_vectors(letter: str, q: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """(index permutation, phase vector) realizing a one-qubit Pauli."""
    idx = np.arange(1 << n)
    bit = 1 << (n - 1 - q)
    if letter == "X":
        return idx ^ bit, np.ones(idx.size, dtype=complex)
    if letter == "Z":
        return idx, np.where(idx & bit, -1.0, 1.0).astype(complex)
    if letter == "Y":
        phase = np.where(idx & bit, -1j, 1j)  # Y|0>=i|1>, Y|1>=-i|0>
        return idx ^ bit, phase
    raise GateError(f"unknown Pauli letter {letter!r}")


def _batch_run(circuit: Circuit, patterns: Sequence[Mapping[int, tuple[str, str]]]) -> np.ndarray:
    """Evolve one row per insertion pattern through the shared gate list."""
    n = circuit.qubit_count
    dim = 1 << n
    batch = len(patterns)
    states = np.zeros((batch, dim), dtype=complex)
    states[:, 0] = 1.0
    by_ordinal: dict[int, list[tuple[int, tuple[str, str]]]] = {}
    for row, pattern in enumerate(patterns):
        for ordinal, pair in pattern.items():
            by_ordinal.setdefault(ordinal, []).append((row, pair))
    cnot_idx = 0
    for g in circuit.lowered_gates():
        if g.kind == "cnot":
            c, t = g.qubits
            states = states[:, _cnot_permutation(c, t, n)]
            for row, pair in by_ordinal.get(cnot_idx, ()):
                vec = states[row]
                for letter, q in zip(pair, (c, t)):
                    if letter != "I":
                        perm, phase = _pauli_phase_vectors(letter, q, n)
                        src = np.empty_like(vec)
                        src[perm] = phase * vec
                        vec = src
                states[row] = vec
            cnot_idx += 1
        elif g.kind == "ry":
            states = _batch_apply_1q(states, roty_matrix(g.angle), g.qubits[0], n)
        else:
            states = _batch_apply_1q(states, _GATE_MATS[g.kind], g.qubits[0], n)
    return states


def _readout_flip_counts(
    counts: np.ndarray, noise: NoiseCalibration | None, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Independent per-qubit classical bit flips applied to aggregated counts."""
    if noise is None or not noise.has_readout_noise:
        return counts
    if noise.qubit_count != n:
        raise ValueError("calibration register size mismatch")
    counts = counts.copy()
    for q in range(n):
        p01, p10 = noise.p01[q], noise.p10[q]
        if p01 == 0.0 and p10 == 0.0:
            continue
        bit = 1 << (n - 1 - q)
        idx = np.arange(counts.size)
        flip_prob = np.where(idx & bit, p01, p10)
        flipped = rng.binomial(counts, flip_prob)
        counts = counts - flipped
        moved = np.zeros_like(counts)
        moved[idx ^ bit] = flipped
        counts = counts + moved
    return counts


def _sample_pattern_shots(
    circuit: Circuit, shots: int, depol: float, rng: np.random.Generator
) -> dict[tuple[tuple[int, int], ...], int]:
    """Group per-shot trajectories by their CNOT insertion pattern."""
    n_cnots = circuit.cnot_count
    pattern_shots: dict[tuple[tuple[int, int], ...], int] = {}
    p_any = 1.0 - (1.0 - depol) ** n_cnots
    n_hit = int((rng.random(shots) < p_any).sum())
    pattern_shots[()] = shots - n_hit
    for _ in range(n_hit):
        # resample the pattern conditioned on at least one event
        while True:
            hits = rng.random(n_cnots) < depol
            if hits.any():
                break
        key = tuple(
            (int(i), int(rng.integers(len(_DEPOL_PAIRS)))) for i in np.flatnonzero(hits)
        )
        pattern_shots[key] = pattern_shots.get(key, 0) + 1
    return pattern_shots


def _counts_dict(counts: np.ndarray, n: int) -> dict[str, int]:
    return {bitstring_of(int(i), n): int(c) for i, c in enumerate(counts) if c > 0}


def sample_circuit_counts(
    circuit: Circuit,
    shots: int,
    noise: NoiseCalibration | None = None,
    seed: int | None = None,
) -> dict[str, int]:
    """Per-shot noisy trajectories of a circuit, aggregated into counts.

    Each shot is an independent trajectory.  Shots are grouped by their
    sampled insertion pattern and all distinct patterns evolve as one batched
    state matrix.  Deterministic per (circuit, noise, seed).
    """
    rng = np.random.default_rng(seed)
    n = circuit.qubit_count
    depol = noise.cnot_depol if noise is not None else 0.0
    if depol <= 0.0 or circuit.cnot_count == 0:
        state = _run_with_insertions(circuit, {})
        return sample_counts(state, shots, noise, rng=rng)

    pattern_shots = _sample_pattern_shots(circuit, shots, depol, rng)
    keys = sorted(pattern_shots)
    patterns = [{idx: _DEPOL_PAIRS[widx] for idx, widx in key} for key in keys]
    states = _batch_run(circuit, patterns)
    probs = np.abs(states) ** 2
    probs /= probs.sum(axis=1, keepdims=True)
    shots_per_pattern = np.array([pattern_shots[k] for k in keys])
    counts = rng.multinomial(shots_per_pattern, probs).sum(axis=0)
    counts = _readout_flip_counts(counts, noise, n, rng)
    return _counts_dict(counts, n)


def batched_group_counts(
    base: Circuit,
    suffixes: Sequence[Circuit],
    shots: int,
    noise: NoiseCalibration | None = None,
    seed: int | None = None,
) -> list[dict[str, int]]:
    """Counts for base+suffix circuits sharing one noisy preparation batch.

    All CNOTs (hence all depolarizing events) must live in ``base``; the
    suffixes are basis changes made of one-qubit gates.  The trajectory
    pattern ensemble is evolved once and each suffix draws its own shots and
    readout flips, so every returned estimator keeps the correct marginal
    trajectory distribution.
    """
    rng = np.random.default_rng(seed)
    n = base.qubit_count
    for sfx in suffixes:
        if sfx.cnot_count:
            raise GateError("measurement suffixes must be CNOT-free")
    depol = noise.cnot_depol if noise is not None else 0.0
    if depol <= 0.0 or base.cnot_count == 0:
        state = _run_with_insertions(base, {})
        out = []
        for sfx in suffixes:
            rotated = state
            for g in sfx.lowered_gates():
                mat = roty_matrix(g.angle) if g.kind == "ry" else _GATE_MATS[g.kind]
                rotated = _apply_1q(rotated, mat, g.qubits[0], n)
            out.append(sample_counts(rotated, shots, noise, rng=rng))
        return out

    pattern_shots = _sample_pattern_shots(base, shots, depol, rng)
    keys = sorted(pattern_shots)
    patterns = [{idx: _DEPOL_PAIRS[widx] for idx, widx in key} for key in keys]
    states = _batch_run(base, patterns)
    shots_per_pattern = np.array([pattern_shots[k] for k in keys])
    out = []
    for sfx in suffixes:
        rotated = states
        for g in sfx.lowered_gates():
            mat = roty_matrix(g.angle) if g.kind == "ry" else _GATE_MATS[g.kind]
            rotated = _batch_apply_1q(rotated, mat, g.qubits[0], n)
        probs = np.abs(rotated) ** 2
        probs /= probs.sum(axis=1, keepdims=True)
        counts = rng.multinomial(shots_per_pattern, probs).sum(axis=0)
        counts = _readout_flip_counts(counts, noise, n, rng)
        out.append(_counts_dict(counts, n))
    return out


def expand_cnots(circuit: Circuit, r: int) -> Circuit:
    """Replace every CNOT by r consecutive copies (r odd); composites are
    lowered first so their internal CNOTs fold too."""
    if r < 1 or r % 2 == 0:
        raise ValueError("CNOT multiplicity must be a positive odd integer")
    gates: list[Gate] = []
    for g in circuit.lowered_gates():
        if g.kind == "cnot":
            gates.extend([g] * r)
        else:
            gates.append(g)
    return Circuit(circuit.qubit_count, tuple(gates))
