"""Online unbounded knapsack: exact oracles, online strategies, adversarial
families, and minimax solvers, with a CLI harness for experiments."""

from .core import (
    CapacityError,
    Instance,
    InstanceRecord,
    InvalidInstanceError,
    Item,
    Packing,
    Rational,
    RatioReport,
    RunTrace,
    load_instance,
    parse_instance_text,
    format_instance_text,
    run_online,
    simple_instance,
    to_rational,
    validate_instance,
)
from .oracle import OptResult, OracleError, opt_brute_force, opt_exact, opt_unbounded
from .algorithms import (
    ExpectedOutcome,
    StrategyOutcome,
    first_item_fill,
    greedy_fill,
    mixture_branch_bounds,
    mixture_ratio_bound,
    mixture_two_strategy,
    prefix_acceptance_probs,
    prefix_family_strategy,
    threshold_randomized,
    threshold_trace,
    wait_and_fill,
)
from .numerics import (
    DistributionSpec,
    cdf_X,
    check_g_monotone,
    compute_constants,
    default_distribution,
    expected_ratio_exact,
    harmonic_diff,
    sample_X,
)
from .advice import (
    AdviceError,
    AdviceTape,
    EpsAdvicePayload,
    advice_bit_bound,
    eps_advice_algorithm,
    eps_advice_oracle,
    eps_advice_pipeline,
    one_bit_algorithm,
    one_bit_oracle,
    one_bit_pipeline,
)
from .adversary import (
    ChainFamily,
    DistinctDecisions,
    FamilyError,
    MinimaxResult,
    chain_expected_ratios,
    det_minimax,
    det_minimax_with_advice,
    distinct_first_decisions,
    generate_family,
    rand_minimax_chain,
    replay_witness,
    uniform_bit_worst_ratios,
)
from .harness import (
    ExperimentConfig,
    MonteCarloEstimate,
    evaluate_deterministic,
    evaluate_randomized,
    parse_family_spec,
    random_general_instance,
    random_simple_instance,
    report_to_csv,
    report_to_json,
    report_to_text,
)

__version__ = "0.1.0"
