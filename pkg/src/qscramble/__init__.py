"""Scrambling resource monotones for quantum circuits.

Pauli growth and OTOC magic quantify the two scrambling mechanisms of a
unitary (operator spreading and operator entanglement); this package computes
them exactly at desk scale, runs the brickwork fluctuation experiment, and
evaluates the decoding-fidelity bounds they imply.
"""

__version__ = "0.1.0"

from .pauli import (
    PauliOp,
    SymplecticVector,
    commutation_phase,
    enumerate_paulis,
    hermitian_qubit_pauli,
    multiply,
    pauli_from_string,
    pauli_to_string,
    to_dense,
    weight,
)
from .operators import (
    DenseOperator,
    PauliSpectrum,
    avg_pauli_weight,
    conjugate,
    hs_inner,
    pauli_spectrum,
    qfe,
)
from .clifford import (
    CliffordTableau,
    NonEntanglingUnitary,
    is_clifford,
    random_clifford,
    random_nonentangling,
    tableau_conjugate,
    tableau_from_dense,
    tableau_to_dense,
)
from .monotones import (
    GrowthMatrix,
    MonotoneReport,
    growth_matrix,
    magic_entropy,
    otoc,
    otoc_fast,
    otoc_growth_report,
    otoc_magic_exact,
    otoc_magic_sampled,
    pauli_growth,
    pauli_growth_pauli,
    pauli_growth_sampled,
    phase_gate_magic,
)
from .circuits import Circuit, Gate, circuit_from_json, phase_gate
from .ensembles import (
    EnsembleSpec,
    FluctuationRecord,
    build_brickwork,
    default_eps_grid,
    estimate_fluctuations,
    fig3_sweep,
    theorem1_check,
)
from .hayden_preskill import (
    HpReport,
    SubsystemSplit,
    avg_otoc_subsystems,
    decoding_fidelity,
    nonidentity_average,
    theorem2_check,
    theorem3_report,
)
