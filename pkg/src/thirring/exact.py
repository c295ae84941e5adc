"""Dense diagonalization: matrix realization of Pauli sums, charge-sector
spectra, the exact mass gap, and critical-coupling scans."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import LatticeParams, build_hamiltonian, qf_of_bits
from .pauli import PauliSum, _reverse_bits, _PHASES

MAX_MATRIX_QUBITS = 12
GAP_TOL = 1e-6


class ResourceLimitError(RuntimeError):
    """Dense realization refused: register too large."""


class BracketError(RuntimeError):
    """No sign change found while scanning for a critical coupling."""


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    sector_labels: np.ndarray
    eigenvectors: np.ndarray | None = None  # columns, aligned with eigenvalues


def to_matrix(s: PauliSum) -> np.ndarray:
    """Dense matrix of a Pauli sum (qubit 0 = most significant index bit)."""
    n = s.qubit_count
    if n > MAX_MATRIX_QUBITS:
        raise ResourceLimitError(f"{n} qubits exceeds the dense cap of {MAX_MATRIX_QUBITS}")
    dim = 1 << n
    idx = np.arange(dim)
    out = np.zeros((dim, dim), dtype=complex)
    for (x, z), c in s._terms.items():
        xs = _reverse_bits(x, n)
        zs = _reverse_bits(z, n)
        signs = 1.0 - 2.0 * (np.bitwise_count(idx & zs) & 1).astype(float)
        base = c * _PHASES[(x & z).bit_count() % 4]
        out[idx ^ xs, idx] += base * signs
    return out


def sector_indices(N: int) -> dict[int, np.ndarray]:
    """Basis indices per fermion-charge value."""
    dim = 1 << (2 * N)
    labels = np.array([qf_of_bits(i, N) for i in range(dim)])
    return {q: np.flatnonzero(labels == q) for q in range(-N, N + 1)}


def spectrum(params: LatticeParams, include_vectors: bool = False) -> SpectrumResult:
    """Full eigendecomposition, solved sector by sector so every eigenvector
    carries a sharp charge label even through degeneracies."""
    if params.N > 6:
        raise ResourceLimitError("dense spectra support N <= 6")
    h = to_matrix(build_hamiltonian(params))
    if np.max(np.abs(h - h.conj().T)) > 1e-12:
        raise ArithmeticError("Hamiltonian matrix is not Hermitian")
    h = h.real  # real symmetric by construction
    evals: list[np.ndarray] = []
    labels: list[np.ndarray] = []
    vecs: list[np.ndarray] = []
    dim = h.shape[0]
    for q, idx in sector_indices(params.N).items():
        block = h[np.ix_(idx, idx)]
        if include_vectors:
            w, v = np.linalg.eigh(block)
            full = np.zeros((dim, idx.size))
            full[idx, :] = v
            vecs.append(full)
        else:
            w = np.linalg.eigvalsh(block)
        evals.append(w)
        labels.append(np.full(idx.size, q))
    eigenvalues = np.concatenate(evals)
    sector_labels = np.concatenate(labels)
    order = np.argsort(eigenvalues, kind="stable")
    eigenvectors = np.concatenate(vecs, axis=1)[:, order] if include_vectors else None
    return SpectrumResult(eigenvalues[order], sector_labels[order], eigenvectors)


def sector_ground_energy(params: LatticeParams, charge: int) -> float:
    h = to_matrix(build_hamiltonian(params)).real
    idx = sector_indices(params.N)[charge]
    return float(np.linalg.eigvalsh(h[np.ix_(idx, idx)])[0])


def sector_ground_state(params: LatticeParams, charge: int) -> tuple[float, np.ndarray]:
    h = to_matrix(build_hamiltonian(params)).real
    idx = sector_indices(params.N)[charge]
    w, v = np.linalg.eigh(h[np.ix_(idx, idx)])
    full = np.zeros(h.shape[0])
    full[idx] = v[:, 0]
    return float(w[0]), full


def mass_gap_exact(params: LatticeParams) -> float:
    """E1 - E0 with E0 the charge-0 sector minimum and E1 the charge-+1
    sector minimum (equal to charge -1 by charge conjugation)."""
    return sector_ground_energy(params, 1) - sector_ground_energy(params, 0)


def critical_coupling(params: LatticeParams, g2_max: float = 64.0) -> float:
    """Coupling where the mass gap crosses zero, located by a doubling scan
    followed by bisection to |gap| < 1e-6."""
    lo = 0.0
    gap_lo = mass_gap_exact(params.with_g2(lo))
    if gap_lo <= 0.0:
        raise ValueError("gap must be positive at g2 = 0")
    hi = 1.0
    while hi <= g2_max:
        if mass_gap_exact(params.with_g2(hi)) < 0.0:
            break
        lo = hi
        hi *= 2.0
    else:
        raise BracketError(f"no gap sign change in [0, {g2_max}]")
    while True:
        mid = 0.5 * (lo + hi)
        gap = mass_gap_exact(params.with_g2(mid))
        if abs(gap) < GAP_TOL:
            return mid
        if gap > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14 * max(1.0, hi):
            return mid


def critical_line(m0_grid: list[float], params: LatticeParams, g2_max: float = 64.0) -> list[tuple[float, float]]:
    """Per-grid-point critical coupling; points whose scan fails are omitted."""
    out: list[tuple[float, float]] = []
    for m0 in m0_grid:
        try:
            out.append((m0, critical_coupling(params.with_m0(m0), g2_max)))
        except (BracketError, ValueError):
            continue
    return out


def eigenvalue_table(params: LatticeParams) -> list[tuple[int, float, int]]:
    """(index, energy, charge sector) rows for the full spectrum."""
    res = spectrum(params)
    return [
        (i, float(e), int(q))
        for i, (e, q) in enumerate(zip(res.eigenvalues, res.sector_labels))
    ]
