"""Stochastic multi-armed bandits with corrupted feedback.

Corruption-aware index and posterior-sampling policies, classical baselines,
randomized response channels (including local differential privacy schemes),
closed-form regret bounds, and a deterministic replicated experiment harness
with a CSV-emitting command line.
"""

from ._rng import RandomStream
from .bounds import (
    BoundReport,
    UnidentifiableModel,
    finite_time_ub_klucb,
    finite_time_ub_report,
    identifiability_check,
    ldp_epsilon_factor,
    ldp_ub_curve,
    lower_bound_curve,
    lower_bound_report,
    lower_bound_terms,
)
from .corruption import (
    CorruptionFunction,
    NonInvertibleScheme,
    RandomizedResponseScheme,
    apply_scheme,
    ldp_level,
    ldp_scheme,
    mean_function_of,
    sample_feedback,
)
from .environment import CorruptBanditModel, PullOutcome, pull, pull_many
from .harness import (
    DEFAULT_POLICIES,
    PAPER_EPSILONS,
    PRESET_NAMES,
    ExperimentConfig,
    RegretTrace,
    bound_traces,
    config_from_mapping,
    default_checkpoints,
    emit_csv,
    parse_config_file,
    preset,
    replication_streams,
    run_epsilon_sweep,
    run_experiment,
    run_replication,
    run_single,
    run_to_csv,
    sweep_to_csv,
    write_metadata,
)
from .klmath import (
    KlBudget,
    bernoulli_kl,
    bernoulli_kl_derivative,
    exploration_function,
    kl_lower_inverse,
    kl_upper_inverse,
)
from .policies import (
    POLICY_TAGS,
    PolicyKind,
    PolicyState,
    select,
    select_baseline,
    select_klucb_cf,
    select_ts_cf,
    select_ucb_cf,
    select_wrapper,
    update,
    update_for,
    update_wrapper,
)

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "CorruptBanditModel",
    "CorruptionFunction",
    "DEFAULT_POLICIES",
    "ExperimentConfig",
    "KlBudget",
    "NonInvertibleScheme",
    "PAPER_EPSILONS",
    "POLICY_TAGS",
    "PRESET_NAMES",
    "PolicyKind",
    "PolicyState",
    "PullOutcome",
    "RandomStream",
    "RandomizedResponseScheme",
    "RegretTrace",
    "UnidentifiableModel",
    "apply_scheme",
    "bernoulli_kl",
    "bernoulli_kl_derivative",
    "bound_traces",
    "config_from_mapping",
    "default_checkpoints",
    "emit_csv",
    "exploration_function",
    "finite_time_ub_klucb",
    "finite_time_ub_report",
    "identifiability_check",
    "kl_lower_inverse",
    "kl_upper_inverse",
    "ldp_epsilon_factor",
    "ldp_level",
    "ldp_scheme",
    "ldp_ub_curve",
    "lower_bound_curve",
    "lower_bound_report",
    "lower_bound_terms",
    "mean_function_of",
    "parse_config_file",
    "preset",
    "pull",
    "pull_many",
    "replication_streams",
    "run_epsilon_sweep",
    "run_experiment",
    "run_replication",
    "run_single",
    "run_to_csv",
    "select",
    "select_baseline",
    "select_klucb_cf",
    "select_ts_cf",
    "select_ucb_cf",
    "select_wrapper",
    "sweep_to_csv",
    "update",
    "update_for",
    "update_wrapper",
    "write_metadata",
]
