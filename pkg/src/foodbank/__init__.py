"""Equitable food-bank distribution: Atkinson-welfare donor selection vs. nearest-agency baseline."""

from foodbank.model import (
    Agency,
    Donor,
    FoodType,
    PolicyParams,
    Scenario,
    ScenarioError,
    Violation,
    load_scenario,
    myplate_weights,
    save_scenario,
    validate_scenario,
)
from foodbank.welfare import (
    WelfareReport,
    atkinson_welfare,
    combined_welfare,
    head_count_ratio,
)
from foodbank.policy import AllocationPlan, run_baseline_policy, run_proposed_policy
from foodbank.metrics import RunMetrics, compute_metrics
from foodbank.simulate import (
    ComparisonStats,
    GeneratorConfig,
    epsilon_sweep,
    generate_scenario,
    run_replications,
)

__all__ = [
    "Agency",
    "AllocationPlan",
    "ComparisonStats",
    "Donor",
    "FoodType",
    "GeneratorConfig",
    "PolicyParams",
    "RunMetrics",
    "Scenario",
    "ScenarioError",
    "Violation",
    "WelfareReport",
    "atkinson_welfare",
    "combined_welfare",
    "compute_metrics",
    "epsilon_sweep",
    "generate_scenario",
    "head_count_ratio",
    "load_scenario",
    "myplate_weights",
    "run_baseline_policy",
    "run_proposed_policy",
    "run_replications",
    "save_scenario",
    "validate_scenario",
]
