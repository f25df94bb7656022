"""qdesk: a desk-scale quantum computation simulator.

State-vector and density-matrix simulation of the standard textbook
constructions, end to end: elementary gates and entanglement, reversible
ripple-carry arithmetic, garbage disposal by uncomputation, Deutsch's
problem, factoring 15 by period finding, a pulse-level trapped-ion CNOT,
collision dephasing, and 3-qubit error-correcting codes.
"""

__version__ = "0.1.0"

from .errors import QdeskError
from .state import (
    DensityMatrix,
    MeasurementRecord,
    RNG_ALGORITHM,
    StateVector,
    basis_state,
    is_product_across,
    make_rng,
    measure,
    project_measurement,
    pure_density,
    purity,
)
from .numerics import (
    apply_k_local_unitary,
    fidelity_pure,
    matrix_exp_hermitian,
    partial_trace,
    reduced_density_from_state,
)
from .gates import (
    Circuit,
    Gate,
    apply_gate,
    circuit_from_text,
    circuit_to_text,
    epr_circuit,
    reverse_circuit,
    run_circuit,
)

__all__ = [
    "QdeskError",
    "DensityMatrix",
    "MeasurementRecord",
    "RNG_ALGORITHM",
    "StateVector",
    "basis_state",
    "is_product_across",
    "make_rng",
    "measure",
    "project_measurement",
    "pure_density",
    "purity",
    "apply_k_local_unitary",
    "fidelity_pure",
    "matrix_exp_hermitian",
    "partial_trace",
    "reduced_density_from_state",
    "Circuit",
    "Gate",
    "apply_gate",
    "circuit_from_text",
    "circuit_to_text",
    "epr_circuit",
    "reverse_circuit",
    "run_circuit",
    "__version__",
]
