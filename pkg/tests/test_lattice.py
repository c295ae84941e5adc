"""Mode data, field operators, and Hamiltonian construction, checked against
closed forms and dense oracles."""

import math

import numpy as np
import pytest

from conftest import basis_index, random_params
from thirring.exact import to_matrix
from thirring.lattice import (
    LatticeParams,
    build_H0,
    build_Hint,
    build_Qf,
    build_hamiltonian,
    dispersion,
    effective_mass,
    epsilon_sums,
    field_component,
    frequency,
    mode_data,
    qf_of_bits,
    vacuum_energy_shift,
    wilson_mass,
)
from thirring.pauli import PauliSum


def test_params_validation():
    with pytest.raises(ValueError):
        LatticeParams(1, 1.0, 0.0, 0.5)
    with pytest.raises(ValueError):
        LatticeParams(3, 1.0, 0.0, 1.2)
    with pytest.raises(ValueError):
        LatticeParams(3, -0.1, 0.0, 0.5)
    with pytest.raises(ValueError):
        LatticeParams(3, 0.0, 0.0, 0.5)  # massless needs the cutoff
    cut = LatticeParams(3, 0.0, 0.0, 0.5, ir_cutoff=True)
    assert cut.m0_effective == pytest.approx(1.0 / 3.0)


def test_mode_ref_qubit_layout():
    from thirring.lattice import ModeRef

    assert ModeRef("b", 0, False).qubit == 0
    assert ModeRef("c", 0, True).qubit == 1
    assert ModeRef("b", 2, False).qubit == 4
    assert ModeRef("c", 2, True).qubit == 5
    for k in range(3):
        for species in "bc":
            assert 0 <= ModeRef(species, k, False).qubit < 6


def test_effective_mass_reference_values(reference_params):
    assert effective_mass(reference_params, 0) == pytest.approx(10.0)
    assert effective_mass(reference_params, 1) == pytest.approx(11.05)
    with pytest.raises(IndexError):
        effective_mass(reference_params, 3)


def test_effective_mass_reflection_symmetry(rng):
    for _ in range(10):
        params = random_params(rng, int(rng.integers(2, 7)))
        for k in range(1, params.N):
            assert effective_mass(params, k) == pytest.approx(
                effective_mass(params, params.N - k), rel=1e-12
            )


def test_dispersion_values(reference_params):
    assert dispersion(reference_params, 0) == pytest.approx(10.0)
    assert dispersion(reference_params, 1) == pytest.approx(11.083885, abs=1e-6)
    # massless Wilson-free kernel: |sin(2 pi k / N)|
    for N, k in ((5, 2), (4, 1), (7, 3)):
        assert frequency(0.0, 0.0, N, k) == pytest.approx(abs(math.sin(2 * math.pi * k / N)))
    assert wilson_mass(0.0, 0.0, 6, 4) == 0.0


def test_mode_data_invariants(rng, reference_params):
    md0 = mode_data(reference_params, 0)
    np.testing.assert_allclose(md0.u, [math.sqrt(10.0), 1j * math.sqrt(10.0)])
    for _ in range(10):
        params = random_params(rng, int(rng.integers(2, 7)))
        for k in range(params.N):
            md = mode_data(params, k)
            norm = float(np.vdot(md.u, md.u).real)
            assert norm == pytest.approx(2.0 * md.omega, rel=1e-12)
            np.testing.assert_array_equal(md.v, md.u.conj())
            assert md.omega > 0.0


def test_epsilon_sums(reference_params, rng):
    eps1, eps2 = epsilon_sums(reference_params)
    assert eps1 == pytest.approx(2.993886, abs=1e-6)
    assert abs(eps2) < 1e-12
    for N in range(2, 9):
        params = random_params(rng, N)
        assert abs(epsilon_sums(params)[1]) < 1e-12
    # large bare mass: every mode ratio tends to one
    heavy = LatticeParams(4, 5e4, 0.0, 0.5)
    assert epsilon_sums(heavy)[0] == pytest.approx(4.0, abs=1e-6)


def test_H0_occupation_energies(reference_params):
    h0 = to_matrix(build_H0(reference_params))
    assert h0[0, 0].real == pytest.approx(0.0, abs=1e-12)
    assert h0[basis_index("100000"), basis_index("100000")].real == pytest.approx(10.0)
    assert h0[basis_index("110000"), basis_index("110000")].real == pytest.approx(20.0)
    # diagonal in the computational basis
    assert np.max(np.abs(h0 - np.diag(np.diag(h0)))) < 1e-14


def test_field_anticommutators(rng):
    """{psi_x[a]^dag, psi_y[b]} = delta_ab delta_xy as operator sums."""
    params = random_params(rng, 3)
    fields = {(x, a): field_component(params, x, a) for x in range(3) for a in (0, 1)}
    for (x, a), fa in fields.items():
        for (y, b), fb in fields.items():
            acomm = (fa.dagger() @ fb + fb @ fa.dagger()).simplify(1e-10)
            if (x, a) == (y, b):
                assert len(acomm) == 1
                assert acomm.identity_coefficient == pytest.approx(1.0, abs=1e-10)
            else:
                assert len(acomm) == 0
            plain = (fa @ fb + fb @ fa).simplify(1e-10)
            assert len(plain) == 0


def test_field_components_match_mode_matrix_oracle(rng):
    """N=2: assemble the field from explicit 16x16 mode matrices."""
    from conftest import kron_letters

    params = random_params(rng, 2)
    low = (kron_letters("X") + 1j * kron_letters("Y")) / 2.0

    def mode_matrix(species, k):
        letters = ["I"] * 4
        q = 2 * k if species == "b" else 2 * k + 1
        mats = []
        for i in range(4):
            if i < q:
                mats.append(-kron_letters("Z"))
            elif i == q:
                mats.append(low)
            else:
                mats.append(kron_letters("I"))
        out = np.array([[1.0 + 0j]])
        for m in mats:
            out = np.kron(out, m)
        return out

    for x in range(2):
        for alpha in (0, 1):
            expect = np.zeros((16, 16), dtype=complex)
            for k in range(2):
                md = mode_data(params, k)
                phase = np.exp(2j * np.pi * k * x / 2)
                scale = 1.0 / math.sqrt(2 * 2.0 * md.omega)
                expect += scale * (
                    md.u[alpha] * phase * mode_matrix("b", k)
                    + md.v[alpha] * np.conj(phase) * mode_matrix("c", k).conj().T
                )
            got = to_matrix(field_component(params, x, alpha))
            np.testing.assert_allclose(got, expect, atol=1e-12)


def test_interaction_vacuum_and_pair_elements(rng):
    """The arbiter: vacuum energy and pair amplitude closed forms, 20 draws."""
    for _ in range(20):
        params = random_params(rng, 3)
        hint = to_matrix(build_Hint(params))
        eps1, eps2 = epsilon_sums(params)
        want_vev = params.g2 / 6.0 * (9.0 + eps1**2 - eps2**2)
        assert hint[0, 0].real == pytest.approx(want_vev, abs=1e-9)
        want_pair = params.g2 * eps1 / 6.0 * math.sin(2 * math.pi / 3) / dispersion(params, 1)
        assert hint[basis_index("001001"), 0].real == pytest.approx(want_pair, abs=1e-9)
        assert hint[basis_index("000110"), 0].real == pytest.approx(want_pair, abs=1e-9)


def test_interaction_reference_pair_amplitude(reference_params):
    hint = to_matrix(build_Hint(reference_params))
    assert hint[basis_index("001001"), 0].real == pytest.approx(0.03899, abs=5e-6)


def test_term_count_with_and_without_identity(reference_params):
    h = build_hamiltonian(reference_params)
    with_identity = len(h)
    without = with_identity - int(abs(h.identity_coefficient) > 0)
    assert with_identity == 166
    assert without == 165


def test_charge_operator(reference_params):
    qf = to_matrix(build_Qf(reference_params))
    assert qf[0, 0].real == pytest.approx(0.0)
    assert qf[basis_index("100000"), basis_index("100000")].real == pytest.approx(1.0)
    assert qf[basis_index("010000"), basis_index("010000")].real == pytest.approx(-1.0)
    assert qf[basis_index("011010"), basis_index("011010")].real == pytest.approx(1.0)
    for idx in range(64):
        assert qf[idx, idx].real == pytest.approx(qf_of_bits(idx, 3))


def test_charge_commutes_with_hamiltonian(rng):
    for N in (2, 3):
        for _ in range(10):
            params = random_params(rng, N)
            h = to_matrix(build_hamiltonian(params))
            qf = to_matrix(build_Qf(params))
            comm = h @ qf - qf @ h
            assert np.max(np.abs(comm)) < 1e-10


def test_hamiltonian_coefficients_real(rng):
    for _ in range(5):
        params = random_params(rng, 3)
        h = build_hamiltonian(params)
        assert all(abs(c.imag) < 1e-12 for _, c in h.items())


def test_charge_conjugation_spectrum_symmetry(reference_params):
    """Swapping every mode pair's qubits (fermion <-> antifermion roles)
    leaves the spectrum unchanged; the substantive check is the +-1 sector
    gap equality in the solver tests."""
    params = reference_params.with_g2(4.0)
    h = to_matrix(build_hamiltonian(params))
    perm = np.zeros(64, dtype=int)
    for idx in range(64):
        swapped = 0
        for k in range(3):
            b_bit = (idx >> (5 - 2 * k)) & 1
            c_bit = (idx >> (4 - 2 * k)) & 1
            swapped |= c_bit << (5 - 2 * k)
            swapped |= b_bit << (4 - 2 * k)
        perm[idx] = swapped
    h_swapped = h[np.ix_(perm, perm)]
    np.testing.assert_allclose(
        np.linalg.eigvalsh(h_swapped), np.linalg.eigvalsh(h), atol=1e-9
    )


def test_free_spectrum_is_occupation_formula(rng):
    import itertools

    for N in (2, 3):
        params = random_params(rng, N).with_g2(0.0)
        h = to_matrix(build_hamiltonian(params))
        omegas = [dispersion(params, k) for k in range(N)]
        expected = sorted(
            sum((n[2 * k] + n[2 * k + 1]) * omegas[k] for k in range(N))
            for n in itertools.product((0, 1), repeat=2 * N)
        )
        np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(h)), expected, atol=1e-10)


def test_vacuum_shift_matches_closed_form(reference_params):
    hint = build_Hint(reference_params)
    # the identity piece plus the assembled current square reproduce the shift
    vac = np.zeros(64, dtype=complex)
    vac[0] = 1.0
    assert hint.expectation(vac).real == pytest.approx(
        vacuum_energy_shift(reference_params), abs=1e-10
    )
