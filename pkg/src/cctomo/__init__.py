"""Coupling-compensated quantum state tomography.

Simulates pre-rotation pulses on ZZ-coupled qubit systems, derives the
native measurement projectors, and reconstructs density matrices by
maximum likelihood — either under the conventional ideal-pulse
assumption or compensating the coupling entirely in software.
"""

from .evolve import (
    PreRotationSet,
    ProjectorSet,
    analytic_propagator,
    build_prerotation_set,
    modified_projectors,
    numeric_propagator,
    sequence_propagator,
    standard_axes,
)
from .linalg import (
    concurrence,
    fidelity,
    fidelity_general,
    pauli_string,
    params_from_rho,
    project_to_physical,
    rho_from_params,
)
from .measure import (
    apply_confusion,
    ideal_counts,
    mitigate_confusion,
    sample_counts,
)
from .model import PulseSpec, SystemSpec, coupling_hamiltonian, rwa_drive_hamiltonian
from .states import PrepStep, named_target, prepare_state
from .tomo import (
    ReconstructionResult,
    cct_reconstruct,
    expectations_from_counts,
    linear_inversion,
    mle_standard,
)

__version__ = "0.1.0"

__all__ = [
    "PreRotationSet",
    "ProjectorSet",
    "PulseSpec",
    "SystemSpec",
    "PrepStep",
    "ReconstructionResult",
    "analytic_propagator",
    "apply_confusion",
    "build_prerotation_set",
    "cct_reconstruct",
    "concurrence",
    "coupling_hamiltonian",
    "expectations_from_counts",
    "fidelity",
    "fidelity_general",
    "ideal_counts",
    "linear_inversion",
    "mitigate_confusion",
    "mle_standard",
    "modified_projectors",
    "named_target",
    "numeric_propagator",
    "params_from_rho",
    "pauli_string",
    "prepare_state",
    "project_to_physical",
    "rho_from_params",
    "rwa_drive_hamiltonian",
    "sample_counts",
    "sequence_propagator",
    "standard_axes",
]
