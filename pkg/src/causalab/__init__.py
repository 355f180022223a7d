"""Causal discovery and effect estimation: model, identify, estimate, refute."""

from .dag import Dag, all_paths, backdoor_paths, d_separated, parse_dot, serialize_dot
from .discovery import PC, DirectLiNGAM, ci_test_partial_correlation, run_lingam, run_pc
from .estimate import (
    Estimate,
    do_sample,
    estimate_backdoor_linear,
    estimate_effect,
    estimate_frontdoor_two_stage,
    estimate_iv_wald,
    estimate_mediation,
)
from .identify import (
    Estimand,
    check_backdoor,
    check_frontdoor,
    find_instruments,
    identify_effect,
    identify_mediation,
)
from .refute import (
    RefutationResult,
    aggregate_confidence,
    refute_data_subset,
    refute_placebo,
    refute_random_common_cause,
)

__version__ = "0.1.0"
