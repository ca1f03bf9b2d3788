"""Direct-coupled oscillator observer networks for a single-qubit plant."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .spin import (
    PauliTriple,
    PlantSpec,
    pauli_commutator_residual,
    pauli_matrices,
    plant_drift,
    theta_identities_residual,
    theta_map,
    verify_zp_invariance,
)
from .graph import (
    Components,
    ObserverGraph,
    ReducedGraph,
    comparison_matrix,
    complete_graph,
    connected_components,
    path_graph,
    plant_attachment_diag,
    random_connected_graph,
    reduce,
    star_graph,
    validate_graph,
    weighted_laplacian,
)
from .synthesis import (
    AugmentedSystem,
    CouplingScheme,
    NetworkRealization,
    PDCertificate,
    assemble_augmented,
    build_realization,
    certify_positive_definite,
    consensus_target,
    realization_unchecked,
    synthesize_omegas,
)
from .dynamics import (
    Propagator,
    SimulationResult,
    check_convergence,
    check_hamiltonian_conservation,
    check_norm_bound,
    check_symplectic_ccr,
    coefficient_traces,
    matrix_exp,
    propagate,
    time_average_closed_form,
    time_average_quadrature,
)
from .config import ExperimentConfig, GraphConfig, dump_config, load_config, parse_config
from .runner import TraceArchive, VerifyReport, run_simulate, run_synthesize, run_verify
