"""Variational solver: the four trial-state families, multi-term energy
functionals with cross terms, parameter ties, one-dimensional and full
minimization, and the variational mass gap.

Two-term families evaluate Re<0|U_m^dag H U_n|0>; in measurement mode the
cross blocks use per-family reductions (an interference frame for the
ground-state pair family, branch-amplitude estimation for the excited one)
rather than generic diagonalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .circuits import (
    Circuit,
    Gate,
    NoiseCalibration,
    batched_group_counts,
    expand_cnots,
    run,
    sample_circuit_counts,
)
from .exact import to_matrix
from .lattice import LatticeParams, build_hamiltonian, qf_of_bits
from .mitigation import ZString, ro_correct, corrected_probabilities
from .pauli import PauliString, PauliSum, group_measurement_bases, stabilizer_reduce


class UnsupportedReductionError(RuntimeError):
    """Sampled cross terms requested for a family without a reduction plan."""


@dataclass(frozen=True)
class AnsatzTerm:
    amplitude: Callable[[tuple[float, ...]], float]
    circuit: Callable[[tuple[float, ...]], Circuit]


@dataclass(frozen=True)
class AnsatzSpec:
    id: str
    qubit_count: int
    param_names: tuple[str, ...]
    terms: tuple[AnsatzTerm, ...]
    tie: Callable[[float], tuple[float, ...]]
    cnot_total: int

    def circuits(self, params: tuple[float, ...]) -> list[Circuit]:
        return [t.circuit(params) for t in self.terms]

    def amplitudes(self, params: tuple[float, ...]) -> list[float]:
        return [t.amplitude(params) for t in self.terms]


def _gs_pair_circuit(phi: float) -> Circuit:
    return Circuit(6, (Gate.ry(4, phi), Gate.cnot(4, 3)))


def _gs_single_circuit(theta: float, phi: float, lead: tuple[Gate, ...] = ()) -> Circuit:
    gates = lead + (
        Gate.ry(2, theta),
        Gate.croty(2, 3, phi),
        Gate.x(2),
        Gate.cnot(3, 4),
        Gate.cnot(2, 5),
    )
    return Circuit(6, gates)


def _es_single_circuit(theta: float, phi: float, chi: float) -> Circuit:
    gates = (
        Gate.x(0),
        Gate.ry(1, chi / 2),
        Gate.ry(3, phi / 2),
        Gate.ry(5, theta),
        Gate.cnot(5, 1),
        Gate.ry(1, -chi / 2),
        Gate.cnot(1, 0),
        Gate.cnot(1, 5),
        Gate.cnot(5, 2),
        Gate.cnot(2, 3),
        Gate.x(5),
        Gate.cnot(1, 5),
        Gate.x(2),
        Gate.ry(3, -phi / 2),
        Gate.cnot(3, 4),
        Gate.cnot(0, 4),
        Gate.x(4),
    )
    return Circuit(6, gates)


def ansatz_catalog() -> list[AnsatzSpec]:
    """The four trial-state families, with their single-parameter ties."""
    gs2 = AnsatzSpec(
        id="GS2",
        qubit_count=6,
        param_names=("theta", "phi"),
        terms=(
            AnsatzTerm(lambda p: math.sin(p[0]), lambda p: _gs_pair_circuit(p[1])),
            AnsatzTerm(lambda p: math.cos(p[0]),
                       lambda p: Circuit(6, (Gate.x(2), Gate.x(5)))),
        ),
        tie=lambda th: (th, math.pi - 2.0 * th),
        cnot_total=1,
    )
    gs1 = AnsatzSpec(
        id="GS1",
        qubit_count=6,
        param_names=("theta", "phi"),
        terms=(AnsatzTerm(lambda p: 1.0, lambda p: _gs_single_circuit(p[0], p[1])),),
        tie=lambda th: (th, th / 2.0),
        cnot_total=3,
    )
    es2 = AnsatzSpec(
        id="ES2",
        qubit_count=6,
        param_names=("theta", "phi", "chi"),
        terms=(
            AnsatzTerm(lambda p: math.sin(p[2]),
                       lambda p: _gs_single_circuit(p[0], p[1], lead=(Gate.x(0),))),
            AnsatzTerm(lambda p: math.cos(p[2]),
                       lambda p: Circuit(6, (Gate.x(1), Gate.x(2), Gate.x(4)))),
        ),
        tie=lambda th: (th, th / 2.0, th / 2.0),
        cnot_total=3,
    )
    es1 = AnsatzSpec(
        id="ES1",
        qubit_count=6,
        param_names=("theta", "phi", "chi"),
        terms=(AnsatzTerm(lambda p: 1.0, lambda p: _es_single_circuit(p[0], p[1], p[2])),),
        tie=lambda th: (th, th / 2.0, th / 2.0),
        cnot_total=8,
    )
    return [gs2, gs1, es2, es1]


def get_ansatz(ansatz_id: str) -> AnsatzSpec:
    for spec in ansatz_catalog():
        if spec.id == ansatz_id:
            return spec
    raise KeyError(f"unknown ansatz {ansatz_id!r}")


# ---------------------------------------------------------------------------
# evaluation configuration
# ---------------------------------------------------------------------------

MODES = ("exact", "shots", "shots+noise")


@dataclass(frozen=True)
class EvalConfig:
    mode: str = "exact"
    shots: int = 8192
    noise: NoiseCalibration | None = None
    r: int = 1  # CNOT multiplicity for folding studies
    apply_ro: bool = True  # readout-correct sampled estimators

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.mode == "shots+noise" and self.noise is None:
            raise ValueError("shots+noise mode needs a calibration")

    @property
    def sampled(self) -> bool:
        return self.mode != "exact"

    @property
    def run_noise(self) -> NoiseCalibration | None:
        return self.noise if self.mode == "shots+noise" else None


# generic probe angles for structure discovery; irrational-ish to avoid the
# accidental extra stabilizers of symmetric points
_PROBE = (0.837219, 1.293847, 0.512931)


# ---------------------------------------------------------------------------
# cross-term plans
# ---------------------------------------------------------------------------

def _pauli_string_of_circuit(circuit: Circuit, n: int) -> PauliString:
    """The Pauli string implemented by an X-gates-only circuit."""
    x = 0
    for g in circuit.gates:
        if g.kind != "x":
            raise UnsupportedReductionError("branch is not a Pauli-string circuit")
        x |= 1 << g.qubits[0]
    return PauliString(n, x, 0)


_ANTIDIAG_FACTOR = {"XX": -1.0j, "XY": 1.0, "YX": 1.0, "YY": 1.0j}


@dataclass
class InterferencePlan:
    """Cross block of the ground-state pair family.

    Every surviving term reduces to c * <00|e^{i a X3Y4} {I | X3Y4}|00>; both
    reduced observables are diagonal in the frame of the basis-change circuit
    (Hadamard on 3, CalY on 4), so one CNOT-free circuit serves the block.
    """

    const_coeff: complex
    zz_coeff: complex
    frame_circuit: Circuit

    def value(self, alpha: float, zz_estimate: float) -> complex:
        a0 = math.cos(alpha) + 1j * math.sin(alpha) * zz_estimate
        a1 = math.cos(alpha) * zz_estimate + 1j * math.sin(alpha)
        return self.const_coeff * a0 + self.zz_coeff * a1


def _build_interference_plan(h: PauliSum, pair_string: PauliString) -> InterferencePlan:
    const = 0.0j
    zz = 0.0j
    for string, coeff in h.items():
        prod = string * pair_string
        cls = prod.letter(3) + prod.letter(4)
        ok = all(prod.letter(q) in "IZ" for q in (0, 1, 2, 5))
        if not ok:
            continue
        if cls in ("II", "IZ", "ZI", "ZZ"):
            const += coeff * prod.phase_factor
        elif cls in _ANTIDIAG_FACTOR:
            zz += coeff * prod.phase_factor * _ANTIDIAG_FACTOR[cls]
        # single X/Y on (3,4): pinned-qubit mismatch, contributes zero
    frame = Circuit(6, (Gate.h(3), Gate.caly(4)))
    return InterferencePlan(const, zz, frame)


@dataclass
class AmplitudePlan:
    """Cross block evaluated through signed branch amplitudes.

    With the second branch a Pauli-X string, each term becomes
    coeff * amp(z) for a basis state z in the first branch's support; the
    amplitude magnitudes come from one Z-basis measurement of that branch and
    the signs are carried classically (non-negative on the tie domain).
    """

    weights: dict[int, complex]  # basis index -> aggregated coefficient


def _build_amplitude_plan(h: PauliSum, right_string: PauliString,
                          support: Sequence[int], n: int) -> AmplitudePlan:
    support_set = set(support)
    weights: dict[int, complex] = {}
    for string, coeff in h.items():
        prod = string * right_string
        # prod |0...0>: X-pattern gives the target state, each Y adds i
        target = 0
        for q in range(n):
            if prod.x >> q & 1:
                target |= 1 << (n - 1 - q)
        if target not in support_set:
            continue
        factor = prod.phase_factor * (1j) ** ((prod.x & prod.z).bit_count() % 4)
        weights[target] = weights.get(target, 0.0j) + coeff * factor
    return AmplitudePlan(weights)


# ---------------------------------------------------------------------------
# the evaluator
# ---------------------------------------------------------------------------

@dataclass
class DiagonalPlan:
    term_index: int
    constant: complex
    groups: list  # MeasurementGroup list for the non-identity representatives


class EnergyEvaluator:
    """Reusable evaluation plan for <psi(p)|H|psi(p)> of one family.

    Exact mode uses statevectors against the dense Hamiltonian.  Sampled
    modes run the reduced measurement plan: per-branch grouped circuits for
    the diagonal blocks and the family's cross-term reduction.
    """

    def __init__(self, ansatz: AnsatzSpec, hamiltonian: PauliSum):
        self.ansatz = ansatz
        self.h = hamiltonian
        self.h_matrix = to_matrix(hamiltonian)
        probe = ansatz.tie(_PROBE[0])
        probe = tuple(p + q for p, q in zip(probe, _PROBE[: len(probe)]))
        branches = ansatz.circuits(probe)
        reduced = stabilizer_reduce(hamiltonian, branches)
        self.diag_plans: list[DiagonalPlan] = []
        for m in range(len(branches)):
            rsum = reduced[(m, m)]
            const = rsum.identity_coefficient
            rest = PauliSum(rsum.qubit_count,
                            {k: c for k, c in rsum._terms.items() if k != (0, 0)})
            groups = group_measurement_bases(rest)
            self.diag_plans.append(DiagonalPlan(m, const, groups))
        self.cross_plan = None
        if len(branches) == 2:
            if ansatz.id == "GS2":
                pair = _pauli_string_of_circuit(branches[1], ansatz.qubit_count)
                self.cross_plan = _build_interference_plan(hamiltonian, pair)
            elif ansatz.id == "ES2":
                pair = _pauli_string_of_circuit(branches[1], ansatz.qubit_count)
                amps = run(branches[0])
                support = [int(i) for i in np.flatnonzero(np.abs(amps) > 1e-9)]
                self.cross_plan = _build_amplitude_plan(hamiltonian, pair, support,
                                                        ansatz.qubit_count)
        # the reduction was discovered at one generic parameter point; check it
        # transfers across the family at a second one
        check = ansatz.tie(1.177)
        check = tuple(p + q for p, q in zip(check, (0.331, -0.274, 0.192)[: len(check)]))
        cfg_exact = EvalConfig("exact")
        if abs(self.reduced_energy(check, cfg_exact) - self.exact_energy(check)) > 1e-9:
            raise ArithmeticError(
                f"reduced evaluation plan for {ansatz.id} fails off the probe point")

    # ---- bookkeeping for the reduction criteria ----
    def reduced_string_count(self) -> int:
        count = 0
        for plan in self.diag_plans:
            members = sum(len(g.members) for g in plan.groups)
            count += members
            if abs(plan.constant) > 1e-12 and not plan.groups:
                count += 1  # branch collapsed to its eigenvalue aggregate
        if isinstance(self.cross_plan, InterferencePlan):
            count += int(abs(self.cross_plan.const_coeff) > 1e-12)
            count += int(abs(self.cross_plan.zz_coeff) > 1e-12)
        elif isinstance(self.cross_plan, AmplitudePlan):
            count += len(self.cross_plan.weights)
        return count

    def measurement_circuit_count(self) -> int:
        count = 0
        for plan in self.diag_plans:
            count += max(len(plan.groups), 1)  # constant branches still get a check circuit
        if isinstance(self.cross_plan, InterferencePlan):
            count += 1
        # the amplitude plan reuses the first branch's Z-basis circuit
        return count

    def active_qubits(self, params: tuple[float, ...]) -> set[int]:
        qubits: set[int] = set()
        for circ in self.ansatz.circuits(params):
            for g in circ.gates:
                qubits.update(g.qubits)
        for plan in self.diag_plans:
            for grp in plan.groups:
                for g in grp.basis_change.gates:
                    qubits.update(g.qubits)
                for string, _ in grp.members:
                    qubits.update(string.support)
        if isinstance(self.cross_plan, InterferencePlan):
            for g in self.cross_plan.frame_circuit.gates:
                qubits.update(g.qubits)
        return qubits

    # ---- exact paths ----
    def term_state(self, m: int, params: tuple[float, ...], r: int = 1) -> np.ndarray:
        circ = self.ansatz.circuits(params)[m]
        if r != 1:
            circ = expand_cnots(circ, r)
        return run(circ)

    def exact_energy(self, params: tuple[float, ...]) -> float:
        amps = self.ansatz.amplitudes(params)
        states = [self.term_state(m, params) for m in range(len(amps))]
        total = 0.0
        for m, (a, sm) in enumerate(zip(amps, states)):
            total += a * a * float(np.real(np.vdot(sm, self.h_matrix @ sm)))
            for n in range(m + 1, len(amps)):
                cross = float(np.real(np.vdot(sm, self.h_matrix @ states[n])))
                total += 2.0 * amps[n] * a * cross
        return total

    def exact_cross(self, m: int, n: int, params: tuple[float, ...],
                    observable: PauliSum | None = None) -> float:
        sm = self.term_state(m, params)
        sn = self.term_state(n, params)
        obs = self.h_matrix if observable is None else to_matrix(observable)
        return float(np.real(np.vdot(sm, obs @ sn)))

    # ---- reduced path ----
    def _estimate_group(self, grp, counts: dict[str, int], cfg: EvalConfig) -> complex:
        total = 0.0j
        for string, coeff in grp.diagonal_strings:
            z = ZString(frozenset(string.support))
            if cfg.apply_ro and cfg.noise is not None:
                total += coeff * ro_correct(counts, cfg.noise, z)
            else:
                total += coeff * _raw_z_estimate(counts, z)
        return total

    def _diag_block(self, m: int, params: tuple[float, ...], cfg: EvalConfig,
                    rng: np.random.Generator | None) -> complex:
        plan = self.diag_plans[m]
        total = plan.constant
        base = self.ansatz.circuits(params)[m]
        if cfg.r != 1:
            base = expand_cnots(base, cfg.r)
        if cfg.sampled:
            if plan.groups:
                seed = int(rng.integers(2**63)) if rng is not None else None
                counts_list = batched_group_counts(
                    base, [grp.basis_change for grp in plan.groups],
                    cfg.shots, cfg.run_noise, seed)
                for grp, counts in zip(plan.groups, counts_list):
                    total += self._estimate_group(grp, counts, cfg)
            return total
        for grp in plan.groups:
            state = run(base.then(grp.basis_change))
            probs = np.abs(state) ** 2
            for string, coeff in grp.diagonal_strings:
                total += coeff * _z_expectation_from_probs(probs, string)
        return total

    def _cross_block(self, params: tuple[float, ...], cfg: EvalConfig,
                     rng: np.random.Generator | None,
                     amp_counts: dict[str, int] | None = None) -> complex:
        if self.cross_plan is None:
            raise UnsupportedReductionError(
                f"no sampled cross-term reduction for ansatz {self.ansatz.id}")
        if isinstance(self.cross_plan, InterferencePlan):
            alpha = params[1] / 2.0
            frame = self.cross_plan.frame_circuit
            if cfg.sampled:
                seed = int(rng.integers(2**63)) if rng is not None else None
                counts = sample_circuit_counts(frame, cfg.shots, cfg.run_noise, seed)
                z34 = ZString(frozenset((3, 4)))
                if cfg.apply_ro and cfg.noise is not None:
                    w = ro_correct(counts, cfg.noise, z34)
                else:
                    w = _raw_z_estimate(counts, z34)
            else:
                probs = np.abs(run(frame)) ** 2
                w = _z_expectation_from_probs(probs, PauliString.from_letters("IIIZZI"))
            return self.cross_plan.value(alpha, w)
        # amplitude plan: one Z-basis measurement of the first branch; the
        # amplitude signs are carried by the classical side (noiseless
        # statevector of the branch at the same parameters)
        if cfg.sampled:
            counts = amp_counts
            if counts is None:
                base = self.ansatz.circuits(params)[0]
                if cfg.r != 1:
                    base = expand_cnots(base, cfg.r)
                seed = int(rng.integers(2**63)) if rng is not None else None
                counts = sample_circuit_counts(base, cfg.shots, cfg.run_noise, seed)
            if cfg.apply_ro and cfg.noise is not None:
                probs = corrected_probabilities(counts, cfg.noise, self.ansatz.qubit_count)
            else:
                probs = _probs_from_counts(counts, self.ansatz.qubit_count)
            ideal = run(self.ansatz.circuits(params)[0])
            total = 0.0j
            for idx, weight in self.cross_plan.weights.items():
                sign = 1.0 if ideal[idx].real >= 0.0 else -1.0
                total += weight * sign * math.sqrt(max(float(probs[idx]), 0.0))
            return total
        base = self.ansatz.circuits(params)[0]
        amps = run(base)
        total = 0.0j
        for idx, weight in self.cross_plan.weights.items():
            total += weight * np.conj(amps[idx])
        return total

    def reduced_energy(self, params: tuple[float, ...], cfg: EvalConfig,
                       rng: np.random.Generator | None = None) -> float:
        amps = self.ansatz.amplitudes(params)
        total = 0.0j
        amp_counts: dict[str, int] | None = None
        for m, a in enumerate(amps):
            if not cfg.sampled:
                total += a * a * self._diag_block(m, params, cfg, rng)
                continue
            plan = self.diag_plans[m]
            base = self.ansatz.circuits(params)[m]
            if cfg.r != 1:
                base = expand_cnots(base, cfg.r)
            suffixes = [grp.basis_change for grp in plan.groups]
            want_amp = isinstance(self.cross_plan, AmplitudePlan) and m == 0
            if want_amp:
                suffixes = suffixes + [Circuit(self.ansatz.qubit_count)]
            block = plan.constant
            if suffixes:
                seed = int(rng.integers(2**63)) if rng is not None else None
                counts_list = batched_group_counts(base, suffixes, cfg.shots,
                                                   cfg.run_noise, seed)
                for grp, counts in zip(plan.groups, counts_list):
                    block += self._estimate_group(grp, counts, cfg)
                if want_amp:
                    amp_counts = counts_list[-1]
            total += a * a * block
        if len(amps) == 2:
            cross = self._cross_block(params, cfg, rng, amp_counts=amp_counts)
            total += 2.0 * amps[0] * amps[1] * complex(cross).real
        return float(total.real)

    def energy(self, params: tuple[float, ...], cfg: EvalConfig,
               rng: np.random.Generator | None = None) -> float:
        if cfg.mode == "exact":
            return self.exact_energy(params)
        return self.reduced_energy(params, cfg, rng)


def _raw_z_estimate(counts: dict[str, int], z: ZString) -> float:
    total = sum(counts.values())
    acc = 0.0
    for bits, c in counts.items():
        parity = sum(int(bits[q]) for q in z.support) % 2
        acc += c * (1.0 - 2.0 * parity)
    return acc / total


def _probs_from_counts(counts: dict[str, int], n: int) -> np.ndarray:
    total = sum(counts.values())
    probs = np.zeros(1 << n)
    for bits, c in counts.items():
        probs[int(bits, 2)] = c / total
    return probs


def _z_expectation_from_probs(probs: np.ndarray, string: PauliString) -> float:
    n = string.qubit_count
    idx = np.arange(probs.size)
    zs = 0
    for q in string.support:
        zs |= 1 << (n - 1 - q)
    signs = 1.0 - 2.0 * (np.bitwise_count(idx & zs) & 1).astype(float)
    return float(np.dot(probs, signs))


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def cross_term(ansatz: AnsatzSpec, m: int, n: int, observable: PauliSum,
               params: tuple[float, ...], cfg: EvalConfig | None = None,
               rng: np.random.Generator | None = None) -> float:
    """Re<0|U_m^dag O U_n|0> at the given full parameter vector."""
    cfg = cfg or EvalConfig()
    ev = EnergyEvaluator(ansatz, observable)
    if m == n:
        if cfg.mode == "exact":
            sm = ev.term_state(m, params)
            return float(np.real(np.vdot(sm, ev.h_matrix @ sm)))
        return float(complex(ev._diag_block(m, params, cfg, rng)).real)
    if m > n:
        m, n = n, m
    if cfg.mode == "exact":
        return ev.exact_cross(m, n, params)
    return float(complex(ev._cross_block(params, cfg, rng)).real)


def energy_functional(ansatz: AnsatzSpec, hamiltonian: PauliSum,
                      params: tuple[float, ...], cfg: EvalConfig | None = None,
                      rng: np.random.Generator | None = None,
                      evaluator: EnergyEvaluator | None = None) -> float:
    """sum_m c_m^2 <m|H|m> + 2 sum_{m<n} c_m c_n Re<m|H|n> at tied or free
    parameters."""
    cfg = cfg or EvalConfig()
    ev = evaluator or EnergyEvaluator(ansatz, hamiltonian)
    return ev.energy(params, cfg, rng)


@dataclass
class VqeResult:
    ansatz_id: str
    theta_star: float
    params_star: tuple[float, ...]
    energy: float
    mode: str
    r: int
    converged: bool = True
    energies: tuple[float, ...] = ()  # per-run values when repeated for statistics

    def __post_init__(self) -> None:
        if not self.energies:
            self.energies = (self.energy,)


GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_minimize(f: Callable[[float], float], lo: float, hi: float,
                     tol: float = 1e-6) -> tuple[float, float]:
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x = (a + b) / 2.0
    return x, f(x)


def minimize(
    ansatz: AnsatzSpec,
    hamiltonian: PauliSum,
    cfg: EvalConfig | None = None,
    seed: int | None = None,
    theta_bounds: tuple[float, float] = (0.0, math.pi),
    full_search: bool = False,
    evaluator: EnergyEvaluator | None = None,
) -> VqeResult:
    """Minimize the energy functional.

    Default: the tie rule is active and the search is one-dimensional over
    theta (golden section after a coarse bracket in exact mode; a 61-point
    grid plus local refinement in shot modes).  ``full_search`` switches to a
    multi-start simplex over all parameters (exact mode).
    """
    cfg = cfg or EvalConfig()
    ev = evaluator or EnergyEvaluator(ansatz, hamiltonian)
    rng = np.random.default_rng(seed)

    if full_search:
        if cfg.sampled:
            raise ValueError("full multi-parameter search is an exact-mode tool")
        from scipy.optimize import minimize as sp_minimize

        def objective(p: np.ndarray) -> float:
            return ev.exact_energy(tuple(p))

        n_par = len(ansatz.param_names)
        starts = [np.asarray(ansatz.tie(th))[:n_par] for th in
                  np.linspace(0.15, math.pi - 0.15, 5)]
        starts += [np.full(n_par, v) for v in (math.pi / 2, math.pi - 0.2, 0.3)]
        best_x, best_f, best_ok = None, math.inf, True
        for x0 in starts:
            res = sp_minimize(objective, x0, method="Nelder-Mead",
                              options=dict(xatol=1e-10, fatol=1e-12, maxiter=6000,
                                           maxfev=8000))
            if res.fun < best_f:
                best_x, best_f, best_ok = res.x, res.fun, bool(res.success)
        params = tuple(float(v) for v in best_x)
        return VqeResult(ansatz.id, params[0], params, float(best_f), cfg.mode, cfg.r,
                         converged=best_ok)

    def f(theta: float) -> float:
        return ev.energy(ansatz.tie(theta), cfg, rng)

    lo, hi = theta_bounds
    if cfg.mode == "exact":
        grid = np.linspace(lo, hi, 25)
        vals = [f(t) for t in grid]
        i = int(np.argmin(vals))
        a = grid[max(i - 1, 0)]
        b = grid[min(i + 1, len(grid) - 1)]
        theta, energy = _golden_minimize(f, a, b, tol=1e-6)
        return VqeResult(ansatz.id, theta, ansatz.tie(theta), energy, cfg.mode, cfg.r)

    grid = np.linspace(lo, hi, 61)
    vals = [f(t) for t in grid]
    i = int(np.argmin(vals))
    step = grid[1] - grid[0]
    fine = np.linspace(max(lo, grid[i] - step), min(hi, grid[i] + step), 13)
    fine_vals = [f(t) for t in fine]
    j = int(np.argmin(fine_vals))
    theta = float(fine[j])
    return VqeResult(ansatz.id, theta, ansatz.tie(theta), float(fine_vals[j]),
                     cfg.mode, cfg.r)


@dataclass(frozen=True)
class VqeConfig:
    gs_ansatz: str = "GS2"
    es_ansatz: str = "ES2"
    mode: str = "exact"
    shots: int = 8192
    noise: NoiseCalibration | None = None
    repetitions: int = 5
    r_list: tuple[int, ...] = (1,)
    seed: int | None = None
    full_search: bool = False
    apply_ro: bool = True


@dataclass
class GapResult:
    gap: float
    stderr: float
    e0_runs: list[float]
    e1_runs: list[float]
    theta0: float
    theta1: float
    per_r: dict[int, list[tuple[float, float]]]  # r -> [(e0, e1)] per repetition


def vqe_mass_gap(params: LatticeParams, cfg: VqeConfig) -> GapResult:
    """Variational gap: minimize the ground and charge-+1 families, repeat
    over seeds, and report mean +- standard error.  With several CNOT
    multiplicities in r_list, per-r energies at the frozen optima are
    returned for extrapolation studies."""
    h = build_hamiltonian(params)
    gs = get_ansatz(cfg.gs_ansatz)
    es = get_ansatz(cfg.es_ansatz)
    ev_gs = EnergyEvaluator(gs, h)
    ev_es = EnergyEvaluator(es, h)
    seeds = np.random.SeedSequence(cfg.seed).spawn(max(cfg.repetitions, 1))
    reps = cfg.repetitions if (cfg.mode != "exact") else 1
    e0_runs: list[float] = []
    e1_runs: list[float] = []
    per_r: dict[int, list[tuple[float, float]]] = {r: [] for r in cfg.r_list}
    theta0 = theta1 = 0.0
    for rep in range(max(reps, 1)):
        rng = np.random.default_rng(seeds[rep])
        base = EvalConfig(cfg.mode, cfg.shots, cfg.noise, 1, cfg.apply_ro)
        res0 = minimize(gs, h, base, seed=int(rng.integers(2**63)),
                        full_search=cfg.full_search, evaluator=ev_gs)
        res1 = minimize(es, h, base, seed=int(rng.integers(2**63)),
                        full_search=cfg.full_search, evaluator=ev_es)
        theta0, theta1 = res0.theta_star, res1.theta_star
        e0_runs.append(res0.energy)
        e1_runs.append(res1.energy)
        for r in cfg.r_list:
            cfg_r = EvalConfig(cfg.mode, cfg.shots, cfg.noise, r, cfg.apply_ro)
            e0 = ev_gs.energy(res0.params_star, cfg_r, rng)
            e1 = ev_es.energy(res1.params_star, cfg_r, rng)
            per_r[r].append((e0, e1))
    gaps = np.array(e1_runs) - np.array(e0_runs)
    stderr = float(gaps.std(ddof=1) / math.sqrt(len(gaps))) if len(gaps) > 1 else 0.0
    return GapResult(float(gaps.mean()), stderr, e0_runs, e1_runs, theta0, theta1, per_r)


def state_charge_values(ansatz: AnsatzSpec, params: tuple[float, ...], N: int) -> list[int]:
    """Distinct charge values carried by the basis states supporting each
    branch; used to check charged-sector orthogonality."""
    values: set[int] = set()
    for circ in ansatz.circuits(params):
        amps = run(circ)
        for idx in np.flatnonzero(np.abs(amps) > 1e-9):
            values.add(qf_of_bits(int(idx), N))
    return sorted(values)
