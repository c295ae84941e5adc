"""Lattice fermion chain with a current-current interaction.

Builds all mode-level quantities (Wilson-shifted masses, frequencies,
spinors), the free and interacting Hamiltonian pieces as Pauli sums on 2N
qubits, and the conserved fermion-number charge.

Conventions: lattice spacing 1, momenta q_k = 2*pi*k/N, fermion mode k on
qubit 2k and antifermion mode k on qubit 2k+1, computational basis
|n0 n1 ... n_{2N-1}> with qubit 0 the most significant index bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .pauli import PauliString, PauliSum, jw_mode, mode_qubit


@dataclass(frozen=True)
class LatticeParams:
    """Physical configuration: site count N, bare mass m0, coupling g2,
    Wilson parameter xi, and the optional 1/N infrared mass cutoff."""

    N: int
    m0: float
    g2: float
    xi: float
    ir_cutoff: bool = False

    def __post_init__(self) -> None:
        if self.N < 2:
            raise ValueError("N must be at least 2")
        if not (0.0 < self.xi < 1.0):
            raise ValueError("Wilson parameter xi must lie in (0, 1)")
        if self.g2 < 0.0:
            raise ValueError("coupling g2 must be non-negative")
        if self.m0 < 0.0:
            raise ValueError("bare mass m0 must be non-negative")
        if self.m0 == 0.0 and not self.ir_cutoff:
            raise ValueError("m0 = 0 requires the infrared cutoff to avoid the zero mode")

    @property
    def m0_effective(self) -> float:
        """Bare mass with the 1/N infrared shift applied uniformly."""
        return self.m0 + (1.0 / self.N if self.ir_cutoff else 0.0)

    @property
    def qubit_count(self) -> int:
        return 2 * self.N

    def with_g2(self, g2: float) -> "LatticeParams":
        return LatticeParams(self.N, self.m0, g2, self.xi, self.ir_cutoff)

    def with_m0(self, m0: float) -> "LatticeParams":
        return LatticeParams(self.N, m0, self.g2, self.xi, self.ir_cutoff)


@dataclass(frozen=True)
class ModeRef:
    """One fermionic mode: species ('b' fermion / 'c' antifermion), momentum
    index, and creation flag."""

    species: str
    k: int
    dagger: bool

    @property
    def qubit(self) -> int:
        return mode_qubit(self.species, self.k)


@dataclass(frozen=True)
class ModeData:
    k: int
    m_tilde: float
    omega: float
    u: np.ndarray  # positive-energy spinor, 2 complex components
    v: np.ndarray  # = conj(u)


def wilson_mass(m0: float, xi: float, N: int, k: int) -> float:
    """m0 + 2*xi*sin^2(pi k / N); the scalar kernel behind effective_mass."""
    return m0 + 2.0 * xi * math.sin(math.pi * k / N) ** 2


def frequency(m0: float, xi: float, N: int, k: int) -> float:
    """sqrt(wilson_mass^2 + sin^2(2 pi k / N)); kernel behind dispersion."""
    return math.hypot(wilson_mass(m0, xi, N, k), math.sin(2.0 * math.pi * k / N))


def _check_k(params: LatticeParams, k: int) -> None:
    if not (0 <= k < params.N):
        raise IndexError(f"momentum index {k} outside [0, {params.N})")


def effective_mass(params: LatticeParams, k: int) -> float:
    _check_k(params, k)
    return wilson_mass(params.m0_effective, params.xi, params.N, k)


def dispersion(params: LatticeParams, k: int) -> float:
    _check_k(params, k)
    return frequency(params.m0_effective, params.xi, params.N, k)


def mode_data(params: LatticeParams, k: int) -> ModeData:
    _check_k(params, k)
    mt = effective_mass(params, k)
    w = dispersion(params, k)
    s = math.sin(2.0 * math.pi * k / params.N)
    if w - s < -1e-15 or w + s < -1e-15:
        raise ArithmeticError("negative radicand in spinor construction")
    u = np.array([math.sqrt(max(w - s, 0.0)), 1j * math.sqrt(max(w + s, 0.0))])
    return ModeData(k=k, m_tilde=mt, omega=w, u=u, v=u.conj())


def epsilon_sums(params: LatticeParams) -> tuple[float, float]:
    """(sum_k m~_k/w_k, sum_k sin(2 pi k/N)/w_k); the second vanishes by the
    k <-> N-k antisymmetry of its summand."""
    eps1 = eps2 = 0.0
    for k in range(params.N):
        w = dispersion(params, k)
        eps1 += effective_mass(params, k) / w
        eps2 += math.sin(2.0 * math.pi * k / params.N) / w
    return eps1, eps2


def build_H0(params: LatticeParams) -> PauliSum:
    """Free Hamiltonian sum_k w_k (n_b,k + n_c,k) with vacuum energy zero.

    Diagonal: each number operator is (I - Z_q)/2 on the mode's qubit.
    """
    n = params.qubit_count
    out = PauliSum(n)
    for k in range(params.N):
        w = dispersion(params, k)
        for q in (2 * k, 2 * k + 1):
            out = out + PauliSum.identity(n, 0.5 * w)
            out = out + PauliSum.from_string(PauliString(n, 0, 1 << q), -0.5 * w)
    return out.simplify()


def field_component(params: LatticeParams, x: int, alpha: int) -> PauliSum:
    """Spinor component alpha of the field at site x as a Pauli sum:
    (1/sqrt(N)) sum_k (2 w_k)^(-1/2) [u_k[a] e^{iq_k x} b_k
                                      + v_k[a] e^{-iq_k x} c_k^dag].
    """
    if not (0 <= x < params.N):
        raise IndexError(f"site {x} outside [0, {params.N})")
    if alpha not in (0, 1):
        raise IndexError("spinor component must be 0 or 1")
    n = params.qubit_count
    out = PauliSum(n)
    norm = 1.0 / math.sqrt(params.N)
    for k in range(params.N):
        md = mode_data(params, k)
        scale = norm / math.sqrt(2.0 * md.omega)
        phase = np.exp(2j * math.pi * k * x / params.N)
        out = out + (scale * md.u[alpha] * phase) * jw_mode("b", k, False, params.N)
        out = out + (scale * md.v[alpha] * np.conj(phase)) * jw_mode("c", k, True, params.N)
    return out


def vector_current(params: LatticeParams, x: int) -> PauliSum:
    """Spatial current psi^dag (gamma^0 gamma^1) psi at site x,
    i.e. psi_1^dag psi_1 - psi_0^dag psi_0 in spinor components."""
    p0 = field_component(params, x, 0)
    p1 = field_component(params, x, 1)
    return (p1.dagger() @ p1 - p0.dagger() @ p0).simplify()


def vacuum_energy_shift(params: LatticeParams) -> float:
    """First-order vacuum energy (g2/2N)(N^2 + eps1^2 - eps2^2), half of which
    is carried by the identity term added in build_Hint."""
    eps1, eps2 = epsilon_sums(params)
    return params.g2 / (2.0 * params.N) * (params.N**2 + eps1**2 - eps2**2)


def build_Hint(params: LatticeParams) -> PauliSum:
    """Interaction term, assembled from field components.

    (g2/2) sum_x j1_x j1_x plus an identity offset fixed so the vacuum
    expectation equals (g2/2N)(N^2 + eps1^2 - eps2^2).  Among the
    current-current forms related by the on-site identity j0^2 + j1^2 = 2 j0,
    this is the one whose matrix elements reproduce the first-order energy
    shifts and transition amplitudes of the model simultaneously.
    """
    n = params.qubit_count
    out = PauliSum(n)
    for x in range(params.N):
        j1 = vector_current(params, x)
        out = out + (j1 @ j1)
    out = 0.5 * params.g2 * out
    out = out + PauliSum.identity(n, 0.5 * vacuum_energy_shift(params))
    return out.simplify()


def build_Qf(params: LatticeParams) -> PauliSum:
    """Fermion number minus antifermion number: sum_k (Z_{2k+1} - Z_{2k})/2."""
    n = params.qubit_count
    out = PauliSum(n)
    for k in range(params.N):
        out = out + PauliSum.from_string(PauliString(n, 0, 1 << (2 * k + 1)), 0.5)
        out = out + PauliSum.from_string(PauliString(n, 0, 1 << (2 * k)), -0.5)
    return out.simplify()


@lru_cache(maxsize=128)
def build_hamiltonian(params: LatticeParams) -> PauliSum:
    """H0 + Hint, simplified. Cached; params are immutable."""
    return (build_H0(params) + build_Hint(params)).simplify()


def qf_of_bits(index: int, N: int) -> int:
    """Charge of a computational basis state given its integer index
    (qubit 0 = most significant bit)."""
    q = 0
    for k in range(N):
        q += (index >> (2 * N - 1 - 2 * k)) & 1
        q -= (index >> (2 * N - 2 - 2 * k)) & 1
    return q
