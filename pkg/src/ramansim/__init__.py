"""Transfer of an atomic qubit onto a coherent-state (cat) qubit.

A Lambda atom with degenerate lower levels interacts with a cavity mode in
the far-detuned Raman regime, the atom is detected, and a Hadamard gate on
the non-orthogonal basis {|-alpha>, |alpha>} finishes the transfer.
"""

from .catgate import CatQubit, decompose, embed, gate_error, hadamard_ideal, hadamard_literal
from .dynamics import (
    JointState,
    Operator,
    RamanParams,
    compare_models,
    effective_hamiltonian,
    evolve_closed_form,
    evolve_numeric,
    full_hamiltonian,
    transfer_time,
)
from .errors import RamanSimError
from .fock import FieldState, apply_number_phase, fidelity, infidelity, inner, make_coherent, overlap_analytic
from .measurement import post_measurement_cat, project_atom
from .protocol import (
    LAB_PRESET,
    ExperimentPreset,
    ProtocolConfig,
    ProtocolResult,
    check_validity,
    feasibility_report,
    run_protocol,
    sweep,
)

__version__ = "0.1.0"
