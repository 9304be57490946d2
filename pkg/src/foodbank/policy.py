"""Distribution policies.

``run_proposed_policy`` serves agencies poorest-first and, for each one, picks
the donor combination whose tentative residuals maximise combined Atkinson
welfare.  ``run_baseline_policy`` is the nearest-agency, fill-to-capacity
practice it is compared against.

Arrays are indexed with donors in ascending-id order and agencies in scenario
order; food types by id.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from foodbank.model import Agency, Donor, Scenario, check_scenario
from foodbank.welfare import WelfareReport, atkinson_rows, head_count_ratio

# Subset enumeration is exhaustive; 2**16 subsets is the practical ceiling.
MAX_DONORS = 16
# Combined-welfare values this close (relatively) count as a tie.
TIE_RTOL = 1e-12
# Coverage slack: a subset short of the target by float noise still counts as covering it.
COVER_RTOL = 1e-12

AGENCY_ORDERS = ("poverty-desc", "poverty-asc")


@dataclass(frozen=True)
class CombinationEvaluation:
    donor_subset: tuple[int, ...]
    tentative_residuals: np.ndarray
    welfare: WelfareReport


@dataclass(frozen=True)
class Decision:
    """What the proposed policy chose for one agency."""

    agency_id: int
    target: tuple[float, ...]
    donor_subset: tuple[int, ...]
    partial: bool
    welfare: WelfareReport


@dataclass(frozen=True)
class AllocationPlan:
    """Shipped pounds, shape (agencies, donors, food types), plus leftover supply."""

    policy: str
    agency_ids: tuple[int, ...]
    donor_ids: tuple[int, ...]
    shipments: np.ndarray
    residual_supply: np.ndarray
    visit_order: tuple[int, ...]
    decisions: tuple[Decision, ...] = ()

    def delivered(self) -> np.ndarray:
        """Pounds received per (agency, food type)."""
        return self.shipments.sum(axis=1)

    def shipment_map(self) -> dict[tuple[int, int, int], float]:
        out = {}
        for (a, d, x), v in np.ndenumerate(self.shipments):
            if v > 0:
                out[(self.agency_ids[a], self.donor_ids[d], x)] = float(v)
        return out

    def welfare_trace(self) -> list[WelfareReport]:
        return [dec.welfare for dec in self.decisions]


# -- ordering ----------------------------------------------------------------

def order_donors(donors: Iterable[Donor]) -> list[int]:
    """Most perishable first; ties by donor id."""
    return [d.id for d in sorted(donors, key=lambda d: (d.perishability_rank, d.id))]


def order_agencies_by_poverty(agencies: Iterable[Agency], descending: bool = True) -> list[int]:
    """Agency ids by head-count ratio, poorest first unless ``descending=False``; ties by id."""
    sign = -1 if descending else 1
    keyed = [(sign * head_count_ratio(a.poor_population, a.population), a.id) for a in agencies]
    return [aid for _, aid in sorted(keyed)]


def order_agencies_by_distance(agencies: Iterable[Agency], food_bank_location: Sequence[float]) -> list[int]:
    bx, by = food_bank_location
    return [a.id for a in sorted(agencies, key=lambda a: (math.hypot(a.location[0] - bx, a.location[1] - by), a.id))]


# -- vectorised core -----------------------------------------------------------

@lru_cache(maxsize=None)
def subset_masks(n: int) -> np.ndarray:
    """Boolean (2**n - 1, n) matrix of nonempty subsets, by size then lexicographically."""
    if n > MAX_DONORS:
        raise ValueError(f"exhaustive enumeration supports at most {MAX_DONORS} donors, got {n}")
    rows = []
    for k in range(1, n + 1):
        for combo in itertools.combinations(range(n), k):
            row = np.zeros(n, dtype=bool)
            row[list(combo)] = True
            rows.append(row)
    masks = np.array(rows, dtype=bool).reshape(-1, n)
    masks.setflags(write=False)
    return masks


def _drain(masks: np.ndarray, avail: np.ndarray, target: np.ndarray, rank_order: np.ndarray) -> np.ndarray:
    """Ship ``min(target, subset supply)`` per type, emptying donors in ``rank_order`` first.

    ``masks`` is (m, n), ``avail`` (n, p), ``target`` (p,).  Returns shipments (m, n, p).
    """
    held = masks[:, :, None] * avail[None, :, :]
    ordered = held[:, rank_order, :]
    before = np.cumsum(ordered, axis=1) - ordered
    # exact zeros for the first donor
    before[:, 0, :] = 0.0
    ship_ordered = np.minimum(ordered, np.maximum(target[None, None, :] - before, 0.0))
    ship = np.empty_like(ship_ordered)
    ship[:, rank_order, :] = ship_ordered
    return ship


def _combined_welfare_rows(residuals: np.ndarray, epsilon: Sequence[float], weights: Sequence[float]):
    """Per-type welfare (m, p) and combined welfare (m,) for residual stacks (m, n, p)."""
    per_type = np.stack(
        [atkinson_rows(residuals[:, :, x], float(epsilon[x])) for x in range(residuals.shape[2])],
        axis=1,
    )
    return per_type, per_type @ np.asarray(weights, dtype=float)


def _best_index(combined: np.ndarray) -> int:
    """First index (enumeration order = size, then ids) within the tie band of the maximum."""
    best = combined.max()
    return int(np.flatnonzero(combined >= best - TIE_RTOL * abs(best))[0])


def _covers(pooled: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Rows of ``pooled`` (m, p) that reach ``target`` (p,) in every food type."""
    return (pooled >= target * (1.0 - COVER_RTOL)).all(axis=1)


def _as_matrix(available_supply: Mapping[int, Sequence[float]]) -> tuple[list[int], np.ndarray]:
    ids = sorted(available_supply)
    return ids, np.array([available_supply[i] for i in ids], dtype=float).reshape(len(ids), -1)


# -- public building blocks -----------------------------------------------------

def enumerate_feasible_combinations(
    available_supply: Mapping[int, Sequence[float]], demand: Sequence[float]
) -> tuple[list[tuple[int, ...]], bool]:
    """Donor subsets whose pooled supply covers ``demand`` in every food type.

    Returns ``(subsets, partial)``.  When nothing covers the demand the result
    is ``([all donors], True)``.
    """
    ids, avail = _as_matrix(available_supply)
    masks = subset_masks(len(ids))
    covered = _covers(masks.astype(float) @ avail, np.asarray(demand, dtype=float))
    if not covered.any():
        return [tuple(ids)], True
    return [tuple(ids[j] for j in np.flatnonzero(m)) for m in masks[covered]], False


def allocate_from_subset(
    subset: Iterable[int],
    available_supply: Mapping[int, Sequence[float]],
    demand: Sequence[float],
    perishability_order: Sequence[int],
) -> tuple[dict[int, np.ndarray], dict[int, np.ndarray]]:
    """Fill ``demand`` from ``subset``, draining donors in ``perishability_order`` per type.

    Returns (shipments, tentative residuals), both keyed by donor id over all
    donors in ``available_supply``.
    """
    ids, avail = _as_matrix(available_supply)
    pos = {d: j for j, d in enumerate(ids)}
    mask = np.zeros((1, len(ids)), dtype=bool)
    mask[0, [pos[d] for d in subset]] = True
    rank_order = np.array([pos[d] for d in perishability_order if d in pos])
    ship = _drain(mask, avail, np.asarray(demand, dtype=float), rank_order)[0]
    resid = np.maximum(avail - ship, 0.0)
    return ({d: ship[j] for j, d in enumerate(ids)}, {d: resid[j] for j, d in enumerate(ids)})


def select_best_combination(evaluations: Sequence[CombinationEvaluation]) -> CombinationEvaluation:
    """Highest combined welfare; ties go to the smaller subset, then lower donor ids."""
    if not evaluations:
        raise ValueError("no combinations to choose from")
    ranked = sorted(evaluations, key=lambda e: (len(e.donor_subset), tuple(sorted(e.donor_subset))))
    return ranked[_best_index(np.array([e.welfare.combined for e in ranked]))]


# -- policies ----------------------------------------------------------------------

def capacity_capped_target(agency: Agency) -> np.ndarray:
    """Demand vector scaled down proportionally so its total fits storage capacity."""
    demand = np.asarray(agency.demand, dtype=float)
    total = demand.sum()
    if total > agency.storage_capacity:
        return demand * agency.storage_capacity / total
    return demand


def _setup(s: Scenario):
    check_scenario(s)
    donors = sorted(s.donors, key=lambda d: d.id)
    donor_ids = tuple(d.id for d in donors)
    pos = {d: j for j, d in enumerate(donor_ids)}
    supply = np.array([d.supply for d in donors], dtype=float).reshape(len(donors), s.n_types)
    rank_order = np.array([pos[d] for d in order_donors(donors)])
    agency_ids = tuple(a.id for a in s.agencies)
    return donor_ids, supply, rank_order, agency_ids


def run_proposed_policy(s: Scenario, agency_order: str = "poverty-desc") -> AllocationPlan:
    """Welfare-driven allocation: poorest agencies first, best donor combination for each."""
    if agency_order not in AGENCY_ORDERS:
        raise ValueError(f"agency_order must be one of {AGENCY_ORDERS}, got {agency_order!r}")
    donor_ids, supply, rank_order, agency_ids = _setup(s)
    eps, weights = s.params.epsilon, s.params.weights
    masks = subset_masks(len(donor_ids))
    fmasks = masks.astype(float)

    avail = supply.copy()
    shipments = np.zeros((len(agency_ids), len(donor_ids), s.n_types))
    visit = order_agencies_by_poverty(s.agencies, descending=agency_order == "poverty-desc")
    decisions = []
    for aid in visit:
        a_idx = agency_ids.index(aid)
        target = capacity_capped_target(s.agencies[a_idx])
        covered = _covers(fmasks @ avail, target)
        partial = not covered.any()
        cand = masks[-1:] if partial else masks[covered]

        ship = _drain(cand, avail, target, rank_order)
        resid = np.maximum(avail[None] - ship, 0.0)
        per_type, combined = _combined_welfare_rows(resid, eps, weights)
        k = _best_index(combined)

        shipments[a_idx] = ship[k]
        avail = resid[k]
        decisions.append(Decision(
            agency_id=aid,
            target=tuple(float(t) for t in target),
            donor_subset=tuple(donor_ids[j] for j in np.flatnonzero(cand[k])),
            partial=partial,
            welfare=WelfareReport(tuple(float(v) for v in per_type[k]), float(combined[k])),
        ))
    return AllocationPlan("proposed", agency_ids, donor_ids, shipments, avail, tuple(visit), tuple(decisions))


def run_baseline_policy(s: Scenario) -> AllocationPlan:
    """Nearest agency first; each is filled to storage capacity from the pooled supply.

    The food-type mix of each delivery follows the remaining pooled supply, and
    within a type donors are emptied most-perishable first.
    """
    donor_ids, supply, rank_order, agency_ids = _setup(s)
    everyone = np.ones((1, len(donor_ids)), dtype=bool)

    avail = supply.copy()
    shipments = np.zeros((len(agency_ids), len(donor_ids), s.n_types))
    visit = order_agencies_by_distance(s.agencies, s.food_bank_location)
    for aid in visit:
        a_idx = agency_ids.index(aid)
        pool = avail.sum(axis=0)
        pool_total = pool.sum()
        if pool_total <= 0:
            break
        amount = s.agencies[a_idx].storage_capacity
        target = pool if amount >= pool_total else pool * (amount / pool_total)
        ship = _drain(everyone, avail, target, rank_order)[0]
        shipments[a_idx] = ship
        avail = np.maximum(avail - ship, 0.0)
    return AllocationPlan("baseline", agency_ids, donor_ids, shipments, avail, tuple(visit))
