"""Mass-gap workbench for the lattice massive Thirring model.

Three routes to the gap of the interacting fermion chain: dense exact
diagonalization, first-order perturbation theory in closed form, and a
simulated hybrid variational solver with stochastic CNOT noise, readout
correction, and zero-noise extrapolation.
"""

from .circuits import Circuit, Gate, NoiseCalibration, expand_cnots, run, sample_counts
from .exact import SpectrumResult, critical_coupling, critical_line, mass_gap_exact, spectrum, to_matrix
from .lattice import (
    LatticeParams,
    ModeData,
    ModeRef,
    build_H0,
    build_Hint,
    build_Qf,
    build_hamiltonian,
    dispersion,
    effective_mass,
    epsilon_sums,
    field_component,
    mode_data,
)
from .mitigation import ExtrapolationFit, ZString, mitigated_energy, ro_correct, zne
from .pauli import (
    MeasurementGroup,
    PauliString,
    PauliSum,
    group_measurement_bases,
    jw_mode,
    serialize_sum,
    stabilizer_reduce,
)
from .perturbation import (
    PTReport,
    PTState,
    continuum_delta_m,
    g2_crit_large_mass,
    pt_report,
    pt_states,
    transition_amp_ground,
    transition_amps_excited,
)
from .vqe import (
    AnsatzSpec,
    EvalConfig,
    VqeConfig,
    VqeResult,
    ansatz_catalog,
    cross_term,
    energy_functional,
    get_ansatz,
    minimize,
    vqe_mass_gap,
)

__version__ = "0.1.0"
