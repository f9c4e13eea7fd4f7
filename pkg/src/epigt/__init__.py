"""Dynamic group testing on a discrete-time stochastic block epidemic.

Simulates daily pooled testing and isolation over an SIR model with
community structure, where each day reduces to static group testing with
independent, community-dependent priors.  Provides the epidemic model,
prior tracking, nonadaptive test designs, decoders with an exact
error-probability oracle, information and budget bounds, the daily
pipeline in minimum-tests and fixed-budget modes, and a command line
front end.
"""

__version__ = "0.1.0"

from .bounds import (
    BoundParams,
    binary_entropy,
    cca_budget,
    entropy_lower_bound,
    heuristic_budget,
    scaling_lower_bound,
)
from .decoders import (
    DecodeOutcome,
    comp_decode,
    dd_decode,
    exact_error_probability,
    make_random_decoder,
    map_decode,
    map_decoder_for,
)
from .designs import (
    TestMatrix,
    TestResults,
    apply_tests,
    cca_design,
    cca_inclusion_probabilities,
    column_weight,
    complete_design,
    constant_column_weight_design,
    parse_test_matrix,
    serialize_test_matrix,
)
from .model import (
    HealthState,
    ModelParams,
    PopulationState,
    community_labels,
    gillespie_trajectory,
    infection_probability,
    init_population,
    isolate,
    step,
)
from .pipeline import (
    DayRecord,
    DecoderName,
    Mode,
    Strategy,
    StrategyCurve,
    min_tests_for_day,
    monte_carlo,
    monte_carlo_gillespie,
    run_fixed_budget_trajectory,
    run_free_trajectory,
    run_min_tests_trajectory,
    run_trajectory,
)
from .priors import (
    BoundednessReport,
    EstimatorState,
    PriorVector,
    boundedness_report,
    compute_priors,
    update_from_decode,
)

__all__ = [
    "__version__",
    "BoundParams",
    "binary_entropy",
    "cca_budget",
    "entropy_lower_bound",
    "heuristic_budget",
    "scaling_lower_bound",
    "DecodeOutcome",
    "comp_decode",
    "dd_decode",
    "exact_error_probability",
    "make_random_decoder",
    "map_decode",
    "map_decoder_for",
    "TestMatrix",
    "TestResults",
    "apply_tests",
    "cca_design",
    "cca_inclusion_probabilities",
    "column_weight",
    "complete_design",
    "constant_column_weight_design",
    "parse_test_matrix",
    "serialize_test_matrix",
    "HealthState",
    "ModelParams",
    "PopulationState",
    "community_labels",
    "gillespie_trajectory",
    "infection_probability",
    "init_population",
    "isolate",
    "step",
    "DayRecord",
    "DecoderName",
    "Mode",
    "Strategy",
    "StrategyCurve",
    "min_tests_for_day",
    "monte_carlo",
    "monte_carlo_gillespie",
    "run_fixed_budget_trajectory",
    "run_free_trajectory",
    "run_min_tests_trajectory",
    "run_trajectory",
    "BoundednessReport",
    "EstimatorState",
    "PriorVector",
    "boundedness_report",
    "compute_priors",
    "update_from_decode",
]
