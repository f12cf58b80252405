"""Bias-aware confidence-gated frontier search.

Simulation library for best-candidate identification when a systematic
evaluator bias of known magnitude L corrupts every observation: time-uniform
confidence radii with a bias shield, a four-phase search loop with strict
safe pruning, closed-form sample-complexity calculators, brute-force
verification oracles, and a replicated benchmark harness.
"""

from .bandit import (
    ArmStats,
    ArmTruth,
    FlatInstance,
    Observation,
    PerArmVector,
    PerStepUniform,
    StaticAdversarial,
    TopKAdversarial,
    TreeInstance,
    TreeSpec,
    Unbiased,
    enumerate_leaves,
    make_flat_instance,
    make_tree_instance,
)
from .confidence import (
    INFEASIBLE,
    ComplexityInputs,
    ConfidenceConfig,
    graceful_degradation_cap,
    is_infeasible,
    lower_bound_samples,
    sample_complexity_lambert,
    sample_complexity_upper,
    u_dist,
    u_dist_array,
    u_stat,
    u_stat_array,
)
from .engine import (
    EngineConfig,
    FrontierSnapshot,
    Naive,
    NoPruning,
    Proportion,
    RunRecord,
    StrictPAC,
    estimate_dynamic_bias,
    run_baseline_uct,
    run_naive_pruning,
    run_pac_mcts,
    run_proportion_pruning,
)
from .harness import (
    CSV_COLUMNS,
    CENSORED,
    SCHEMA_VERSION,
    CellKey,
    ConfigError,
    ExperimentConfig,
    SweepResult,
    budget_to_target,
    degradation_study,
    read_result_csv,
    run_efficiency,
    run_one,
    run_sweep,
    scaling_curve,
    two_proportion_z,
)
from .oracle import (
    CoverageReport,
    MinimalityReport,
    SafetyReport,
    verify_complexity_minimality,
    verify_concentration,
    verify_safe_pruning_exhaustive,
)
from .presets import PRESETS, preset
from .seeding import make_stream, stable_seed

__version__ = "0.1.0"

__all__ = [
    "INFEASIBLE",
    "ArmStats",
    "ArmTruth",
    "CENSORED",
    "CSV_COLUMNS",
    "CellKey",
    "ComplexityInputs",
    "ConfidenceConfig",
    "ConfigError",
    "CoverageReport",
    "EngineConfig",
    "ExperimentConfig",
    "FlatInstance",
    "FrontierSnapshot",
    "MinimalityReport",
    "Naive",
    "NoPruning",
    "Observation",
    "PRESETS",
    "PerArmVector",
    "PerStepUniform",
    "Proportion",
    "RunRecord",
    "SCHEMA_VERSION",
    "SafetyReport",
    "StaticAdversarial",
    "StrictPAC",
    "SweepResult",
    "TopKAdversarial",
    "TreeInstance",
    "TreeSpec",
    "Unbiased",
    "budget_to_target",
    "degradation_study",
    "enumerate_leaves",
    "estimate_dynamic_bias",
    "graceful_degradation_cap",
    "is_infeasible",
    "lower_bound_samples",
    "make_flat_instance",
    "make_stream",
    "make_tree_instance",
    "preset",
    "read_result_csv",
    "run_baseline_uct",
    "run_efficiency",
    "run_naive_pruning",
    "run_one",
    "run_pac_mcts",
    "run_proportion_pruning",
    "run_sweep",
    "sample_complexity_lambert",
    "sample_complexity_upper",
    "scaling_curve",
    "stable_seed",
    "two_proportion_z",
    "u_dist",
    "u_dist_array",
    "u_stat",
    "u_stat_array",
    "verify_complexity_minimality",
    "verify_concentration",
    "verify_safe_pruning_exhaustive",
]
