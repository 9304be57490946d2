"""Performance measures for a finished allocation plan."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from foodbank.model import Scenario
from foodbank.policy import AllocationPlan
from foodbank.welfare import WelfareReport

# Per-(agency, type) excess below this is floating-point residue, not food.
NOISE_LBS = 1e-9


@dataclass(frozen=True)
class AgencyMetrics:
    agency_id: int
    delivered: tuple[float, ...]
    demand: tuple[float, ...]
    overflow_lbs: float
    people_served: int


@dataclass(frozen=True)
class RunMetrics:
    policy: str
    overflow_lbs: float
    undistributed_lbs: float
    consumed_lbs: float
    people_served: int
    per_agency: tuple[AgencyMetrics, ...]
    welfare_trace: tuple[WelfareReport, ...] = ()

    @property
    def total_waste_lbs(self) -> float:
        return self.overflow_lbs + self.undistributed_lbs


def _check_dims(plan: AllocationPlan, s: Scenario) -> None:
    expected = (len(s.agencies), len(s.donors), s.n_types)
    if plan.shipments.shape != expected:
        raise ValueError(f"plan shipments have shape {plan.shipments.shape}, scenario needs {expected}")
    if plan.residual_supply.shape != expected[1:]:
        raise ValueError(f"plan residuals have shape {plan.residual_supply.shape}, scenario needs {expected[1:]}")


def _demand_matrix(s: Scenario) -> np.ndarray:
    return np.array([a.demand for a in s.agencies], dtype=float).reshape(len(s.agencies), s.n_types)


def _excess(delivered: np.ndarray, demand: np.ndarray) -> np.ndarray:
    excess = delivered - demand
    return np.where(excess > NOISE_LBS, excess, 0.0)


def compute_overflow(plan: AllocationPlan, s: Scenario) -> tuple[float, float]:
    """(pounds delivered beyond demand, pounds never shipped)."""
    _check_dims(plan, s)
    overflow = math.fsum(_excess(plan.delivered(), _demand_matrix(s)).ravel())
    undistributed = math.fsum(plan.residual_supply.ravel())
    return overflow, undistributed


def people_fed(consumed, weights, pounds_per_person: float, population: int, nutrition: bool = True) -> int:
    """People one agency can feed from the pounds it actually uses.

    With ``nutrition=True`` a person needs ``weight[x] * pounds_per_person`` of
    every food type, so the scarcest type (relative to its weight) binds.
    Otherwise pounds are pooled regardless of type.
    """
    if nutrition:
        ratios = []
        for c, w in zip(consumed, weights):
            if w > 0:
                ratios.append(c / (w * pounds_per_person))
            elif c > 0:
                raise ValueError("a food type with zero nutrition weight cannot be converted to people")
        fed = min(ratios) if ratios else 0.0
    else:
        fed = math.fsum(consumed) / pounds_per_person
    # 1e-9 absorbs division residue such as 399.99999999999994 / 4
    return min(population, int(math.floor(fed + 1e-9)))


def compute_people_served(plan: AllocationPlan, s: Scenario, nutrition: bool = True) -> int:
    return compute_metrics(plan, s, nutrition=nutrition).people_served


def compute_metrics(plan: AllocationPlan, s: Scenario, nutrition: bool = True) -> RunMetrics:
    """Overflow, undistributed pounds and people served for ``plan``.

    Only pounds up to each agency's per-type demand are counted as consumed;
    anything above is overflow and feeds no one.
    """
    _check_dims(plan, s)
    prm = s.params
    demand = _demand_matrix(s)
    delivered = plan.delivered()
    excess = _excess(delivered, demand)
    consumed = delivered - excess
    for x, w in enumerate(prm.weights):
        if nutrition and w <= 0 and (demand[:, x] > 0).any():
            raise ValueError(f"food type {x} has zero weight but nonzero demand")

    per_agency = []
    for i, a in enumerate(s.agencies):
        per_agency.append(AgencyMetrics(
            agency_id=a.id,
            delivered=tuple(float(v) for v in delivered[i]),
            demand=tuple(a.demand),
            overflow_lbs=math.fsum(excess[i]),
            people_served=people_fed(consumed[i], prm.weights, prm.pounds_per_person, a.population, nutrition),
        ))
    return RunMetrics(
        policy=plan.policy,
        overflow_lbs=math.fsum(m.overflow_lbs for m in per_agency),
        undistributed_lbs=math.fsum(plan.residual_supply.ravel()),
        consumed_lbs=math.fsum(consumed.ravel()),
        people_served=sum(m.people_served for m in per_agency),
        per_agency=tuple(per_agency),
        welfare_trace=tuple(plan.welfare_trace()),
    )
