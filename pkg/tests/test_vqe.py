"""Trial-state families, cross terms, functionals, and minimization."""

import math

import numpy as np
import pytest

from conftest import basis_index
from thirring.circuits import run
from thirring.exact import sector_ground_energy
from thirring.lattice import LatticeParams, build_hamiltonian
from thirring.pauli import PauliString, PauliSum
from thirring.vqe import (
    EnergyEvaluator,
    EvalConfig,
    UnsupportedReductionError,
    VqeConfig,
    ansatz_catalog,
    cross_term,
    energy_functional,
    get_ansatz,
    minimize,
    state_charge_values,
    vqe_mass_gap,
)


@pytest.fixture(scope="module")
def ref():
    return LatticeParams(3, 10.0, 5.0, 0.7)


@pytest.fixture(scope="module")
def h_ref(ref):
    return build_hamiltonian(ref)


def test_catalog_ids_and_cnot_budgets():
    specs = {s.id: s for s in ansatz_catalog()}
    assert set(specs) == {"GS2", "GS1", "ES2", "ES1"}
    for aid, want in (("GS2", 1), ("GS1", 3), ("ES2", 3), ("ES1", 8)):
        spec = specs[aid]
        params = spec.tie(0.84)
        total = sum(c.cnot_count for c in spec.circuits(params))
        assert total == want == spec.cnot_total


def test_gs2_vacuum_point():
    gs2 = get_ansatz("GS2")
    params = (math.pi / 2, 0.0)
    amps = gs2.amplitudes(params)
    states = [run(c) for c in gs2.circuits(params)]
    full = amps[0] * states[0] + amps[1] * states[1]
    want = np.zeros(64)
    want[0] = 1.0
    np.testing.assert_allclose(full, want, atol=1e-14)


def test_gs1_spans_the_pair_family():
    gs1 = get_ansatz("GS1")
    theta = 2.0
    # choose phi so the two pair strings carry equal weight
    phi = 2 * math.acos(math.cos(theta / 2) / math.sin(theta / 2))
    state = run(gs1.circuits((theta, phi))[0])
    support = {int(i) for i in np.flatnonzero(np.abs(state) > 1e-10)}
    assert support == {0, basis_index("000110"), basis_index("001001")}
    assert abs(state[basis_index("000110")]) == pytest.approx(
        abs(state[basis_index("001001")]), abs=1e-10
    )


def test_es2_second_branch_basis_state():
    es2 = get_ansatz("ES2")
    state = run(es2.circuits(es2.tie(0.73))[1])
    want = np.zeros(64)
    want[basis_index("011010")] = 1.0
    np.testing.assert_allclose(state, want, atol=1e-14)


def test_tie_rules():
    assert get_ansatz("GS2").tie(0.3) == (0.3, math.pi - 0.6)
    for aid in ("GS1", "ES2", "ES1"):
        tie = get_ansatz(aid).tie(0.8)
        assert tie[1:] == tuple([0.4] * (len(tie) - 1))


def test_branch_orthogonality_and_normalization(rng):
    for spec in ansatz_catalog():
        for _ in range(5):
            params = tuple(rng.uniform(0.1, math.pi - 0.1, size=len(spec.param_names)))
            amps = spec.amplitudes(params)
            assert sum(a * a for a in amps) == pytest.approx(1.0, abs=1e-12)
            states = [run(c) for c in spec.circuits(params)]
            for i in range(len(states)):
                for j in range(i + 1, len(states)):
                    assert abs(np.vdot(states[i], states[j])) < 1e-10


def test_excited_branches_carry_unit_charge(rng):
    for aid in ("ES2", "ES1"):
        spec = get_ansatz(aid)
        params = tuple(rng.uniform(0.2, 2.8, size=len(spec.param_names)))
        assert state_charge_values(spec, params, 3) == [1]
    for aid in ("GS2", "GS1"):
        spec = get_ansatz(aid)
        params = tuple(rng.uniform(0.2, 2.8, size=len(spec.param_names)))
        assert state_charge_values(spec, params, 3) == [0]


def test_cross_term_pair_string_closed_form():
    gs2 = get_ansatz("GS2")
    obs = PauliSum.from_string(PauliString.from_letters("IIXIIX"), 1.0)
    for phi in (0.3, 1.1, 2.4):
        got = cross_term(gs2, 0, 1, obs, (0.9, phi))
        assert got == pytest.approx(math.cos(phi / 2), abs=1e-12)
        # functional symmetry under swapping the branch order
        assert cross_term(gs2, 1, 0, obs, (0.9, phi)) == pytest.approx(got, abs=1e-12)


def test_cross_term_right_vacuum_rewrite(h_ref):
    """X2X3X4X5 requires the on-vacuum X -> -iY rewrite; the reduced plan must
    agree with the raw statevector sandwich."""
    gs2 = get_ansatz("GS2")
    obs = PauliSum.from_string(PauliString.from_letters("IIXXXX"), 1.0)
    params = (0.8, 1.37)
    states = [run(c) for c in gs2.circuits(params)]
    want = float(np.real(np.vdot(states[0], obs.apply(states[1]))))
    assert cross_term(gs2, 0, 1, obs, params) == pytest.approx(want, abs=1e-12)
    ev = EnergyEvaluator(gs2, obs)
    got = complex(ev._cross_block(params, EvalConfig("exact"), None)).real
    assert got == pytest.approx(want, abs=1e-10)


def test_diagonal_cross_term_reduces_to_expectation(h_ref, ref):
    gs2 = get_ansatz("GS2")
    params = (0.8, 1.37)
    state = run(gs2.circuits(params)[0])
    want = float(np.real(np.vdot(state, h_ref.apply(state))))
    assert cross_term(gs2, 0, 0, h_ref, params) == pytest.approx(want, abs=1e-10)


def test_unsupported_sampled_reduction(h_ref):
    gs1 = get_ansatz("GS1")
    ev = EnergyEvaluator(gs1, h_ref)
    with pytest.raises(UnsupportedReductionError):
        ev._cross_block(gs1.tie(0.5), EvalConfig("shots", 128), np.random.default_rng(0))


def test_functional_zero_coupling_vacuum():
    params = LatticeParams(3, 10.0, 0.0, 0.7)
    h = build_hamiltonian(params)
    gs2 = get_ansatz("GS2")
    assert energy_functional(gs2, h, (math.pi / 2, 0.0)) == pytest.approx(0.0, abs=1e-12)
    res = minimize(gs2, h, EvalConfig("exact"))
    assert res.energy == pytest.approx(0.0, abs=1e-9)
    assert res.theta_star == pytest.approx(math.pi / 2, abs=1e-3)


def test_exact_energy_invariant_under_folding(h_ref):
    gs1 = get_ansatz("GS1")
    ev = EnergyEvaluator(gs1, h_ref)
    params = gs1.tie(0.9)
    s1 = ev.term_state(0, params, r=1)
    s3 = ev.term_state(0, params, r=3)
    s9 = ev.term_state(0, params, r=9)
    np.testing.assert_allclose(s1, s3, atol=1e-12)
    np.testing.assert_allclose(s1, s9, atol=1e-12)


def test_variational_bound_and_sector_ordering(ref, h_ref):
    e0 = sector_ground_energy(ref, 0)
    e1 = sector_ground_energy(ref, 1)
    for aid, floor in (("GS2", e0), ("GS1", e0), ("ES2", e1), ("ES1", e1)):
        res = minimize(get_ansatz(aid), h_ref, EvalConfig("exact"), full_search=True)
        assert res.energy >= floor - 1e-9


def test_es2_minimum_dominates_gs2(ref):
    for g2 in (0.0, 5.0, 10.0, 15.0, 20.0):
        h = build_hamiltonian(ref.with_g2(g2))
        e_gs = minimize(get_ansatz("GS2"), h, EvalConfig("exact"), full_search=True).energy
        e_es = minimize(get_ansatz("ES2"), h, EvalConfig("exact"), full_search=True).energy
        assert e_es >= e_gs - 1e-9


def test_gs2_active_register_is_four_qubits(h_ref):
    gs2 = get_ansatz("GS2")
    ev = EnergyEvaluator(gs2, h_ref)
    assert ev.active_qubits(gs2.tie(0.77)) <= {2, 3, 4, 5}


def test_shot_mode_converges_to_exact(ref, h_ref):
    gs2 = get_ansatz("GS2")
    ev = EnergyEvaluator(gs2, h_ref)
    params = gs2.tie(1.52)
    exact = ev.exact_energy(params)
    rng = np.random.default_rng(99)
    samples = [ev.energy(params, EvalConfig("shots", 1 << 17), rng) for _ in range(8)]
    stderr = np.std(samples, ddof=1) / math.sqrt(len(samples))
    assert abs(np.mean(samples) - exact) < max(3 * stderr, 5e-3)


def test_vqe_mass_gap_exact_modes(ref):
    params = ref.with_g2(0.0)
    out = vqe_mass_gap(params, VqeConfig(mode="exact", full_search=True))
    assert out.gap == pytest.approx(10.0, abs=1e-6)
    assert out.stderr == 0.0


def test_vqe_mass_gap_tracks_exact_solver(ref):
    from thirring.exact import mass_gap_exact

    for g2 in (1.0, 5.0, 10.0, 15.0):
        params = ref.with_g2(g2)
        out = vqe_mass_gap(params, VqeConfig(mode="exact", full_search=True))
        exact = mass_gap_exact(params)
        assert abs(out.gap - exact) / abs(exact) < 0.01


def test_minimize_rejects_sampled_full_search(h_ref):
    with pytest.raises(ValueError):
        minimize(get_ansatz("GS2"), h_ref, EvalConfig("shots", 64), full_search=True)
