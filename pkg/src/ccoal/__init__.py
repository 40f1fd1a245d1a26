"""Exact analytics and simulation for the two-color coalescent process.

Lineages carry a binary color; at each pairwise coalescence the parent
color is drawn by a one-parameter rule. The package builds the exact
generator on the colored lattice, lumps it to the parity chain, derives
closed-form absorption probabilities, expected coalescent times, and
coalescent-time CCDFs, and checks everything against independent matrix
oracles, a reproducible Monte Carlo engine, and a finite-population
Wright-Fisher sampler.
"""

from .analytic import (
    ColoredTimeSummary,
    ExpoMixture,
    InitialParityDistribution,
    SlowModeCoefficients,
    absorb_prob,
    absorb_prob_lumped,
    ccdf_colored_time,
    ccdf_matrix,
    colored_time_summary,
    conditional_generator,
    expected_colored_time,
    expected_time_lumped,
    expected_time_matrix,
    expected_time_unconditional,
    k_coefficients,
    parity_distribution,
    parity_path_probability,
    sojourn_coefficients,
)
from .generator import (
    Generator,
    JumpChain,
    absorption_probabilities_exact,
    build_generator,
    check_color_parameter,
    expected_absorption_time,
    fundamental_matrix,
    jump_chain,
    jump_matrix,
    k_step_distribution,
    level_step_block,
    level_transition_probabilities,
    transition_rates,
)
from .linalg import SingularMatrixError, mat_exp, solve_linear
from .lumping import (
    AggregationPair,
    LumpReport,
    NotLumpableError,
    Partition,
    check_lumpable,
    lump,
    lumped_generator,
    parity_block_index,
    parity_block_power,
    parity_partition,
    parity_step_matrix,
    uv_matrices,
)
from .simulator import (
    SimConfig,
    SimReport,
    Trajectory,
    replicate_stream,
    run_experiment,
    simulate_conditional,
    simulate_lumped,
    simulate_path,
)
from .states import (
    ColorState,
    Parity,
    ParityBlock,
    StateSpace,
    build_lattice,
    coalescence_rate,
    lattice_size,
    parity_of,
)
from .wright_fisher import (
    BLACK,
    WHITE,
    ColoredGenealogy,
    UndefinedPosteriorError,
    WfConfig,
    WfReport,
    ancestral_recovery,
    expected_tmrca_generations,
    lineage_count_kernel,
    parent_color_posterior,
    wf_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "BLACK",
    "WHITE",
    "AggregationPair",
    "ColorState",
    "ColoredGenealogy",
    "ColoredTimeSummary",
    "ExpoMixture",
    "Generator",
    "InitialParityDistribution",
    "JumpChain",
    "LumpReport",
    "NotLumpableError",
    "Parity",
    "ParityBlock",
    "Partition",
    "SimConfig",
    "SimReport",
    "SingularMatrixError",
    "SlowModeCoefficients",
    "StateSpace",
    "Trajectory",
    "UndefinedPosteriorError",
    "WfConfig",
    "WfReport",
    "absorb_prob",
    "absorb_prob_lumped",
    "absorption_probabilities_exact",
    "ancestral_recovery",
    "build_generator",
    "build_lattice",
    "ccdf_colored_time",
    "ccdf_matrix",
    "check_color_parameter",
    "check_lumpable",
    "coalescence_rate",
    "colored_time_summary",
    "conditional_generator",
    "expected_absorption_time",
    "expected_colored_time",
    "expected_time_lumped",
    "expected_time_matrix",
    "expected_time_unconditional",
    "expected_tmrca_generations",
    "fundamental_matrix",
    "jump_chain",
    "jump_matrix",
    "k_coefficients",
    "k_step_distribution",
    "lattice_size",
    "level_step_block",
    "level_transition_probabilities",
    "lineage_count_kernel",
    "lump",
    "lumped_generator",
    "mat_exp",
    "parent_color_posterior",
    "parity_block_index",
    "parity_block_power",
    "parity_distribution",
    "parity_of",
    "parity_partition",
    "parity_path_probability",
    "parity_step_matrix",
    "replicate_stream",
    "run_experiment",
    "simulate_conditional",
    "simulate_lumped",
    "simulate_path",
    "sojourn_coefficients",
    "solve_linear",
    "transition_rates",
    "uv_matrices",
    "wf_experiment",
]
