"""Statistical tools for deciding what a study with few animals can infer.

Fixed-effect tests pooled over units of observation, random-effect tests
across animals with minimum-N planning, conjunction-based typicality bounds,
and a hierarchical Monte Carlo simulator that compares them.
"""

from .conjunction import (
    ConjunctionQuery,
    TypicalityResult,
    figure1_table,
    partial_conjunction_bound,
    prob_all_significant,
    required_n,
    typicality_lower_bound,
)
from .errors import (
    BracketError,
    ContractError,
    DegenerateSampleError,
    DomainError,
    FewNError,
    InsufficientDataError,
)
from .hiersim import (
    ErrorRateReport,
    HierarchicalDesign,
    Method,
    SimulatedDataset,
    estimate_error_rates,
    run_conjunction,
    run_pooled_fixed,
    run_random_effect,
    simulate_dataset,
)
from .numeric import binom_tail, bisect, t_cdf, t_quantile
from .planner import (
    PowerEstimate,
    PowerQuery,
    min_n_power,
    min_n_sample_d,
    min_n_sign,
    power_t_mc,
    second_animal_window,
)
from .sample_tests import (
    EffectSample,
    Sidedness,
    TestResult,
    cohens_d,
    paired_t_test,
    pool_samples,
    sign_test,
)

__version__ = "0.1.0"
