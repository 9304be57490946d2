"""Seeded scenario generation, Monte Carlo replications and the epsilon sweep.

Replication ``i`` of a run with master seed ``s`` generates its scenario from
``replication_seed(s, i)``, a pure function of ``(s, i)``, so results do not
depend on which worker runs which replication or in what order.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from foodbank.metrics import RunMetrics, compute_metrics
from foodbank.model import (
    Agency,
    Donor,
    FoodType,
    PolicyParams,
    Scenario,
    ScenarioError,
    validate_scenario,
)
from foodbank.policy import run_baseline_policy, run_proposed_policy

U64 = 2**64
POLICIES = ("proposed", "baseline")


@dataclass(frozen=True)
class GeneratorConfig:
    n_donors: int = 10
    n_agencies: int = 5
    n_food_types: int = 3
    supply_range: tuple[float, float] = (600.0, 800.0)
    demand_range: tuple[float, float] = (1000.0, 2000.0)
    region_size: float = 50.0
    epsilon: float | tuple[float, ...] = 1.5
    weights: tuple[float, ...] | None = None  # None: uniform 1/p
    capacity_range: tuple[float, float] = (1500.0, 3000.0)
    population_range: tuple[int, int] = (500, 5000)
    poverty_ratio_range: tuple[float, float] = (0.05, 0.5)
    pounds_per_person: float = 4.0
    seed: int = 0

    def resolved_weights(self) -> tuple[float, ...]:
        if self.weights is None:
            return (1 / self.n_food_types,) * self.n_food_types
        return tuple(float(w) for w in self.weights)

    def resolved_epsilon(self) -> tuple[float, ...]:
        if isinstance(self.epsilon, (int, float)):
            return (float(self.epsilon),) * self.n_food_types
        eps = tuple(float(e) for e in self.epsilon)
        if len(eps) == 1:
            return eps * self.n_food_types
        return eps

    def check(self) -> None:
        problems = []
        for name in ("n_donors", "n_agencies", "n_food_types"):
            if getattr(self, name) < 1:
                problems.append(f"{name} must be >= 1")
        for name in ("supply_range", "demand_range", "capacity_range", "population_range",
                     "poverty_ratio_range"):
            lo, hi = getattr(self, name)
            if not (0 <= lo <= hi):
                problems.append(f"{name} must satisfy 0 <= lo <= hi, got ({lo}, {hi})")
        if self.poverty_ratio_range[1] > 1:
            problems.append("poverty_ratio_range must lie within [0, 1]")
        if not self.region_size > 0:
            problems.append("region_size must be > 0")
        if not self.pounds_per_person > 0:
            problems.append("pounds_per_person must be > 0")
        if not 0 <= self.seed < U64:
            problems.append("seed must be an unsigned 64-bit integer")
        if self.n_food_types >= 1:
            w = self.resolved_weights()
            if len(w) != self.n_food_types:
                problems.append(f"expected {self.n_food_types} weights, got {len(w)}")
            elif abs(math.fsum(w) - 1) > 1e-9 or min(w) < 0:
                problems.append(f"weights must be nonnegative and sum to 1, got {w}")
            eps = self.resolved_epsilon()
            if len(eps) != self.n_food_types:
                problems.append(f"expected {self.n_food_types} epsilon values, got {len(eps)}")
            elif min(eps) < 0:
                problems.append("epsilon must be >= 0")
        if problems:
            raise ValueError("invalid generator config: " + "; ".join(problems))


def replication_seed(master_seed: int, index: int) -> int:
    """Seed of replication ``index``; independent streams for distinct (seed, index)."""
    ss = np.random.SeedSequence([master_seed, index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def generate_scenario(cfg: GeneratorConfig) -> Scenario:
    """Random one-day instance; a pure function of ``cfg`` (including its seed)."""
    cfg.check()
    rng = np.random.default_rng(cfg.seed)
    p, size = cfg.n_food_types, cfg.region_size
    weights = cfg.resolved_weights()

    bank = rng.uniform(0, size, 2)
    d_loc = rng.uniform(0, size, (cfg.n_donors, 2))
    supply = rng.uniform(*cfg.supply_range, (cfg.n_donors, p))
    ranks = rng.permutation(cfg.n_donors)
    a_loc = rng.uniform(0, size, (cfg.n_agencies, 2))
    demand_total = rng.uniform(*cfg.demand_range, cfg.n_agencies)
    capacity = rng.uniform(*cfg.capacity_range, cfg.n_agencies)
    population = rng.integers(cfg.population_range[0], cfg.population_range[1], cfg.n_agencies, endpoint=True)
    ratio = rng.uniform(*cfg.poverty_ratio_range, cfg.n_agencies)

    food_types = tuple(FoodType(x, f"type{x}", weights[x], x) for x in range(p))
    donors = tuple(
        Donor(i, f"donor{i}", (float(d_loc[i, 0]), float(d_loc[i, 1])),
              tuple(float(v) for v in supply[i]), int(ranks[i]))
        for i in range(cfg.n_donors)
    )
    agencies = []
    for i in range(cfg.n_agencies):
        pop = int(population[i])
        agencies.append(Agency(
            id=i,
            name=f"agency{i}",
            location=(float(a_loc[i, 0]), float(a_loc[i, 1])),
            demand=tuple(float(demand_total[i] * w) for w in weights),
            storage_capacity=float(capacity[i]),
            population=pop,
            poor_population=min(pop, int(round(ratio[i] * pop))),
        ))
    s = Scenario(
        region_size=float(size),
        food_types=food_types,
        donors=donors,
        agencies=tuple(agencies),
        food_bank_location=(float(bank[0]), float(bank[1])),
        params=PolicyParams(cfg.resolved_epsilon(), weights, float(cfg.pounds_per_person)),
    )
    violations = validate_scenario(s)
    if violations:
        raise ScenarioError(violations)
    return s


# -- replications --------------------------------------------------------------

class ReplicationError(RuntimeError):
    def __init__(self, index: int, cause: Exception):
        self.index = index
        super().__init__(f"replication {index} failed: {cause}")


@dataclass(frozen=True)
class PolicyStats:
    """Per-replication samples of one policy, in replication-index order."""

    policy: str
    overflow: tuple[float, ...]
    undistributed: tuple[float, ...]
    people: tuple[int, ...]

    @staticmethod
    def _mean_sd(values: Sequence[float]) -> tuple[float, float]:
        arr = np.asarray(values, dtype=float)
        sd = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
        return float(arr.mean()), sd

    @property
    def overflow_stats(self) -> tuple[float, float]:
        return self._mean_sd(self.overflow)

    @property
    def undistributed_stats(self) -> tuple[float, float]:
        return self._mean_sd(self.undistributed)

    @property
    def waste_stats(self) -> tuple[float, float]:
        return self._mean_sd([o + u for o, u in zip(self.overflow, self.undistributed)])

    @property
    def people_stats(self) -> tuple[float, float]:
        return self._mean_sd(self.people)


@dataclass(frozen=True)
class ComparisonStats:
    proposed: PolicyStats
    baseline: PolicyStats
    n_replications: int
    seed: int
    epsilon: tuple[float, ...] = field(default=())

    def policies(self) -> tuple[PolicyStats, PolicyStats]:
        return (self.proposed, self.baseline)

    def paired_difference(self, metric: str) -> np.ndarray:
        """Per-replication ``proposed - baseline`` for overflow, undistributed, waste or people."""
        def get(ps: PolicyStats) -> np.ndarray:
            if metric == "waste":
                return np.add(ps.overflow, ps.undistributed)
            return np.asarray(getattr(ps, metric), dtype=float)
        return get(self.proposed) - get(self.baseline)


def replicate(cfg: GeneratorConfig, index: int, agency_order: str = "poverty-desc",
              nutrition: bool = True) -> tuple[RunMetrics, RunMetrics]:
    """Run both policies on replication ``index``; returns (proposed, baseline) metrics."""
    try:
        s = generate_scenario(replace(cfg, seed=replication_seed(cfg.seed, index)))
        proposed = compute_metrics(run_proposed_policy(s, agency_order), s, nutrition)
        baseline = compute_metrics(run_baseline_policy(s), s, nutrition)
    except Exception as exc:  # noqa: BLE001 - re-raised with the index attached
        raise ReplicationError(index, exc) from exc
    return proposed, baseline


def _job(args):
    cfg, index, agency_order, nutrition = args
    return index, replicate(cfg, index, agency_order, nutrition)


def aggregate(cfg: GeneratorConfig, results: dict[int, tuple[RunMetrics, RunMetrics]]) -> ComparisonStats:
    """Combine replication results keyed by index; insertion order is irrelevant."""
    n = len(results)
    if sorted(results) != list(range(n)):
        raise ValueError("replication results must cover indices 0..n-1")
    ordered = [results[i] for i in range(n)]

    def stats(k: int, name: str) -> PolicyStats:
        return PolicyStats(
            name,
            tuple(r[k].overflow_lbs for r in ordered),
            tuple(r[k].undistributed_lbs for r in ordered),
            tuple(r[k].people_served for r in ordered),
        )

    return ComparisonStats(stats(0, "proposed"), stats(1, "baseline"), n, cfg.seed, cfg.resolved_epsilon())


def run_replications(cfg: GeneratorConfig, n: int, *, agency_order: str = "poverty-desc",
                     nutrition: bool = True, workers: int = 1,
                     order: Iterable[int] | None = None) -> ComparisonStats:
    """Mean/sd of both policies' metrics over ``n`` seeded replications.

    ``order`` optionally sets the execution order of replication indices
    (a permutation of ``range(n)``); it never changes the result.
    """
    if n < 1:
        raise ValueError(f"need at least one replication, got {n}")
    cfg.check()
    indices = list(range(n)) if order is None else list(order)
    if sorted(indices) != list(range(n)):
        raise ValueError("order must be a permutation of range(n)")
    jobs = [(cfg, i, agency_order, nutrition) for i in indices]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            done = dict(pool.map(_job, jobs))
    else:
        done = dict(map(_job, jobs))
    return aggregate(cfg, done)


def epsilon_sweep(cfg: GeneratorConfig, epsilons: Sequence[float], n: int,
                  **kwargs) -> list[tuple[float, ComparisonStats]]:
    """``run_replications`` at each epsilon (broadcast to every food type), same seed ladder."""
    if not epsilons:
        raise ValueError("epsilon list is empty")
    for e in epsilons:
        if not (math.isfinite(e) and e >= 0):
            raise ValueError(f"epsilon must be >= 0, got {e}")
    return [(float(e), run_replications(replace(cfg, epsilon=float(e)), n, **kwargs)) for e in epsilons]
