import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import scenario
from foodbank.metrics import compute_metrics, compute_overflow, compute_people_served, people_fed
from foodbank.policy import AllocationPlan, run_baseline_policy, run_proposed_policy
from test_policy import small_scenarios


def plan_for(s, delivered, residual=None):
    """Single-donor plan delivering ``delivered[a]`` to each agency."""
    ship = np.array(delivered, dtype=float)[:, None, :]
    if residual is None:
        residual = np.zeros((1, s.n_types))
    return AllocationPlan("manual", tuple(a.id for a in s.agencies), (0,), ship, np.array(residual, float), ())


def test_overflow_counts_only_excess():
    s = scenario([[1500.0, 0.0]], [[1000.0, 200.0]], weights=[0.5, 0.5])
    overflow, undistributed = compute_overflow(plan_for(s, [[1300.0, 200.0]]), s)
    assert overflow == 300.0 and undistributed == 0.0


def test_nothing_shipped_is_all_undistributed():
    per_donor = 22280.0 / 10 / 2
    s = scenario([[per_donor, per_donor]] * 10, [[1000.0, 1000.0]], weights=[0.5, 0.5])
    plan = AllocationPlan("none", (0,), tuple(range(10)), np.zeros((1, 10, 2)),
                          np.array([d.supply for d in s.donors]), ())
    assert compute_overflow(plan, s) == (0.0, pytest.approx(22280.0, abs=1e-6))


def test_dimension_mismatch():
    s = scenario([[1.0, 1.0]], [[1.0, 1.0]])
    bad = AllocationPlan("x", (0,), (0,), np.zeros((1, 1, 3)), np.zeros((1, 3)), ())
    with pytest.raises(ValueError):
        compute_overflow(bad, s)


def test_people_served_examples():
    s = scenario([[0.0] * 3], [[400.0] * 3], populations=[10_000])
    assert compute_people_served(plan_for(s, [[400.0, 400.0, 400.0]]), s) == 300
    assert compute_people_served(plan_for(s, [[0.0, 0.0, 0.0]]), s) == 0
    assert compute_people_served(plan_for(s, [[400.0, 400.0, 0.0]]), s) == 0


def test_people_served_capped_by_population():
    s = scenario([[0.0] * 3], [[400.0] * 3], populations=[120])
    assert compute_people_served(plan_for(s, [[400.0] * 3]), s) == 120


def test_overflow_feeds_no_one():
    s = scenario([[0.0] * 3], [[400.0] * 3], populations=[10_000])
    assert compute_people_served(plan_for(s, [[900.0, 900.0, 900.0]]), s) == 300


def test_pounds_only_mode():
    s = scenario([[0.0] * 3], [[400.0] * 3], populations=[10_000])
    assert compute_people_served(plan_for(s, [[400.0, 400.0, 0.0]]), s, nutrition=False) == 200


def test_zero_weight_with_demand_is_an_error():
    s = scenario([[0.0, 0.0]], [[100.0, 100.0]], weights=[1.0, 0.0])
    with pytest.raises(ValueError):
        compute_metrics(plan_for(s, [[100.0, 100.0]]), s)
    with pytest.raises(ValueError):
        people_fed([10.0, 5.0], [1.0, 0.0], 4.0, 100)


def test_myplate_proportions():
    # 4 lb/person split 0.3/0.4/0.1/0.2; vegetables bind at 160 / 1.6 = 100
    fed = people_fed([120.0, 160.0, 100.0, 100.0], [0.3, 0.4, 0.1, 0.2], 4.0, 1000)
    assert fed == 100


def balance(m, s):
    return m.overflow_lbs + m.undistributed_lbs + m.consumed_lbs - s.total_supply()


@settings(max_examples=100, deadline=None)
@given(small_scenarios())
def test_mass_balance_and_totals(s):
    for plan in (run_proposed_policy(s), run_baseline_policy(s)):
        m = compute_metrics(plan, s)
        assert abs(balance(m, s)) <= 1e-6
        assert math.isclose(m.overflow_lbs, sum(a.overflow_lbs for a in m.per_agency), abs_tol=1e-9)
        assert m.people_served == sum(a.people_served for a in m.per_agency)


@settings(max_examples=100, deadline=None)
@given(small_scenarios())
def test_proposed_overflow_is_zero(s):
    assert compute_metrics(run_proposed_policy(s), s).overflow_lbs == 0.0


@settings(max_examples=60, deadline=None)
@given(small_scenarios(), st.randoms(use_true_random=False))
def test_people_served_invariant_to_relabeling(s, rnd):
    donors, agencies = list(s.donors), list(s.agencies)
    rnd.shuffle(donors)
    rnd.shuffle(agencies)
    # listing order shuffled, ids shifted monotonically (tie-breaks preserved)
    relabeled = replace(
        s,
        donors=tuple(replace(d, id=10 * d.id + 3) for d in donors),
        agencies=tuple(replace(a, id=10 * a.id + 7) for a in agencies),
    )
    for run in (run_proposed_policy, run_baseline_policy):
        assert compute_metrics(run(relabeled), relabeled).people_served == compute_metrics(run(s), s).people_served


@settings(max_examples=60, deadline=None)
@given(small_scenarios(), st.floats(0, 2000))
def test_more_supply_never_serves_fewer(s, extra):
    richer = replace(s, donors=tuple(replace(d, supply=tuple(v + extra for v in d.supply)) for d in s.donors))
    before = compute_metrics(run_proposed_policy(s), s).people_served
    after = compute_metrics(run_proposed_policy(richer), richer).people_served
    assert after >= before
