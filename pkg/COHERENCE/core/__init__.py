from .artifact_writer import ArtifactWriter
from .audit import (
    Condition,
    ConditionVerdict,
    audit_random,
    check_b3,
    check_c1,
    check_c2a,
    check_c2b,
    check_c3,
    check_extended_c2b,
    check_mixedness_tradeoff,
    check_purity_bound,
)
from .channels import (
    KrausChannel,
    SelectiveOutcome,
    apply_channel,
    dephasing_channel,
    permutation_channel,
    selective_outcomes,
    validate_channel,
)
from .counterexample import counterexample_channel, counterexample_state
from .hermitian import (
    DensityMatrix,
    Spectrum,
    block_diagonal,
    eigh,
    incoherent_state,
    matrix_power,
    maximally_coherent_state,
    mixedness,
    pure_state,
    purity,
    validate_density,
)
from .measures import (
    CoherenceReport,
    Method,
    SimplexPoint,
    coherence_upper_bound,
    diagonal_moments,
    optimal_incoherent_state,
    relative_entropy_coherence,
    renyi_coherence,
    renyi_coherence_bruteforce,
    renyi_relative_entropy,
    tsallis_coherence,
    tsallis_coherence_bruteforce,
)
from .progress_reporter import ProgressReporter
from .qubit import (
    QubitParams,
    qubit_c2,
    qubit_c2_max,
    qubit_eigenvalues,
    qubit_gap_bound,
    qubit_params_from_state,
    qubit_state,
    qubit_tradeoff,
)
from .sampling import (
    SamplerConfig,
    random_density,
    random_ensemble,
    random_incoherent_channel,
)
from .scenarios import (
    SweepTable,
    reproduce_extended_c2b,
    reproduce_fig1,
    reproduce_fig2,
    reproduce_fig3,
)

__all__ = [
    "ArtifactWriter",
    "CoherenceReport",
    "Condition",
    "ConditionVerdict",
    "DensityMatrix",
    "KrausChannel",
    "Method",
    "ProgressReporter",
    "QubitParams",
    "SamplerConfig",
    "SelectiveOutcome",
    "SimplexPoint",
    "Spectrum",
    "SweepTable",
    "apply_channel",
    "audit_random",
    "block_diagonal",
    "check_b3",
    "check_c1",
    "check_c2a",
    "check_c2b",
    "check_c3",
    "check_extended_c2b",
    "check_mixedness_tradeoff",
    "check_purity_bound",
    "coherence_upper_bound",
    "counterexample_channel",
    "counterexample_state",
    "dephasing_channel",
    "diagonal_moments",
    "eigh",
    "incoherent_state",
    "matrix_power",
    "maximally_coherent_state",
    "mixedness",
    "optimal_incoherent_state",
    "permutation_channel",
    "pure_state",
    "purity",
    "qubit_c2",
    "qubit_c2_max",
    "qubit_eigenvalues",
    "qubit_gap_bound",
    "qubit_params_from_state",
    "qubit_state",
    "qubit_tradeoff",
    "random_density",
    "random_ensemble",
    "random_incoherent_channel",
    "relative_entropy_coherence",
    "renyi_coherence",
    "renyi_coherence_bruteforce",
    "renyi_relative_entropy",
    "reproduce_extended_c2b",
    "reproduce_fig1",
    "reproduce_fig2",
    "reproduce_fig3",
    "selective_outcomes",
    "tsallis_coherence",
    "tsallis_coherence_bruteforce",
    "validate_channel",
    "validate_density",
]
