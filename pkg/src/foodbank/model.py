"""Domain types, scenario file I/O, validation and nutrition weight presets.

All types are frozen dataclasses holding tuples, so a scenario can be shared
freely between policy runs and worker processes.  Construction does not
validate; call :func:`validate_scenario` to get the list of broken invariants.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Sequence

WEIGHT_SUM_TOL = 1e-9

MYPLATE_PRESETS: dict[str, tuple[float, ...]] = {
    # grains, vegetables, fruits, protein (dairy has no published share)
    "myplate4": (0.30, 0.40, 0.10, 0.20),
    "uniform3": (1 / 3, 1 / 3, 1 / 3),
}

MYPLATE_NAMES: dict[str, tuple[str, ...]] = {
    "myplate4": ("grains", "vegetables", "fruits", "protein"),
    "uniform3": ("type0", "type1", "type2"),
}


class ScenarioFormatError(ValueError):
    """A scenario document is structurally unreadable (missing keys, bad types)."""


class ScenarioError(ValueError):
    """A scenario breaks one or more invariants."""

    def __init__(self, violations: Sequence["Violation"]):
        self.violations = list(violations)
        lines = "\n".join(f"  {v}" for v in self.violations)
        super().__init__(f"invalid scenario ({len(self.violations)} violation(s)):\n{lines}")


@dataclass(frozen=True)
class Violation:
    path: str
    rule: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: [{self.rule}] {self.message}"


@dataclass(frozen=True)
class FoodType:
    id: int
    name: str
    weight: float
    perishability_rank: int = 0


@dataclass(frozen=True)
class Donor:
    id: int
    name: str
    location: tuple[float, float]
    supply: tuple[float, ...]
    perishability_rank: int


@dataclass(frozen=True)
class Agency:
    id: int
    name: str
    location: tuple[float, float]
    demand: tuple[float, ...]
    storage_capacity: float
    population: int
    poor_population: int


@dataclass(frozen=True)
class PolicyParams:
    """Per-food-type inequality aversion, nutrition weights and the people-served conversion."""

    epsilon: tuple[float, ...]
    weights: tuple[float, ...]
    pounds_per_person: float = 4.0


@dataclass(frozen=True)
class Scenario:
    region_size: float
    food_types: tuple[FoodType, ...]
    donors: tuple[Donor, ...]
    agencies: tuple[Agency, ...]
    food_bank_location: tuple[float, float]
    params: PolicyParams

    @property
    def n_types(self) -> int:
        return len(self.food_types)

    def total_supply(self) -> float:
        return math.fsum(v for d in self.donors for v in d.supply)

    def donor(self, donor_id: int) -> Donor:
        for d in self.donors:
            if d.id == donor_id:
                return d
        raise KeyError(donor_id)

    def agency(self, agency_id: int) -> Agency:
        for a in self.agencies:
            if a.id == agency_id:
                return a
        raise KeyError(agency_id)

    def with_params(self, **changes: Any) -> "Scenario":
        return replace(self, params=replace(self.params, **changes))


def myplate_weights(scheme: str) -> tuple[float, ...]:
    """Nutrition weight vector for a named preset ("myplate4" or "uniform3")."""
    try:
        return MYPLATE_PRESETS[scheme]
    except KeyError:
        valid = ", ".join(sorted(MYPLATE_PRESETS))
        raise ValueError(f"unknown weight preset {scheme!r}; valid presets: {valid}") from None


def _finite_nonneg(x: float) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x) and x >= 0


def _in_region(loc: Sequence[float], size: float) -> bool:
    return len(loc) == 2 and all(math.isfinite(c) and 0 <= c <= size for c in loc)


def validate_scenario(s: Scenario) -> list[Violation]:
    """Return every invariant violation in ``s``; an empty list means the scenario is valid."""
    out: list[Violation] = []

    def bad(path: str, rule: str, message: str) -> None:
        out.append(Violation(path, rule, message))

    p = len(s.food_types)
    if p == 0:
        bad("food_types", "nonempty", "at least one food type is required")
    if not s.donors:
        bad("donors", "nonempty", "at least one donor is required")
    if not s.agencies:
        bad("agencies", "nonempty", "at least one agency is required")

    size = s.region_size
    if not (math.isfinite(size) and size > 0):
        bad("region_size_km", "positive", f"region size must be > 0, got {size}")
    elif not _in_region(s.food_bank_location, size):
        bad("food_bank_location", "in-region", f"{s.food_bank_location} outside [0, {size}]^2")

    ids = sorted(ft.id for ft in s.food_types)
    if ids != list(range(p)):
        bad("food_types", "ids-contiguous", f"food type ids must be 0..{p - 1}, got {ids}")
    for i, ft in enumerate(s.food_types):
        if not (math.isfinite(ft.weight) and 0 <= ft.weight <= 1):
            bad(f"food_types[{i}].weight", "weight-range", f"weight {ft.weight} not in [0, 1]")

    prm = s.params
    if len(prm.weights) != p:
        bad("params.weights", "dimension", f"expected {p} weights, got {len(prm.weights)}")
    else:
        total = math.fsum(prm.weights)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            bad("params.weights", "weight-sum", f"weights sum to {total!r}, expected 1")
        by_id = {ft.id: ft.weight for ft in s.food_types}
        if any(abs(by_id.get(x, w) - w) > 1e-12 for x, w in enumerate(prm.weights)):
            bad("params.weights", "weights-match-food-types",
                "params.weights disagree with food_types[*].weight")
    if len(prm.epsilon) != p:
        bad("params.epsilon", "dimension", f"expected {p} epsilon values, got {len(prm.epsilon)}")
    for x, e in enumerate(prm.epsilon):
        if not _finite_nonneg(e):
            bad(f"params.epsilon[{x}]", "epsilon-nonnegative", f"epsilon {e} must be >= 0")
    if not (math.isfinite(prm.pounds_per_person) and prm.pounds_per_person > 0):
        bad("params.pounds_per_person", "positive", f"must be > 0, got {prm.pounds_per_person}")

    seen: set[int] = set()
    for i, d in enumerate(s.donors):
        path = f"donors[{i}]"
        if d.id in seen:
            bad(f"{path}.id", "unique-id", f"duplicate donor id {d.id}")
        seen.add(d.id)
        if len(d.supply) != p:
            bad(f"{path}.supply", "dimension", f"expected {p} entries, got {len(d.supply)}")
        for x, v in enumerate(d.supply):
            if not _finite_nonneg(v):
                bad(f"{path}.supply[{x}]", "nonnegative", f"supply {v} must be >= 0")
        if math.isfinite(size) and size > 0 and not _in_region(d.location, size):
            bad(f"{path}.location", "in-region", f"{d.location} outside [0, {size}]^2")

    seen = set()
    for i, a in enumerate(s.agencies):
        path = f"agencies[{i}]"
        if a.id in seen:
            bad(f"{path}.id", "unique-id", f"duplicate agency id {a.id}")
        seen.add(a.id)
        if len(a.demand) != p:
            bad(f"{path}.demand", "dimension", f"expected {p} entries, got {len(a.demand)}")
        for x, v in enumerate(a.demand):
            if not _finite_nonneg(v):
                bad(f"{path}.demand[{x}]", "nonnegative", f"demand {v} must be >= 0")
        if not _finite_nonneg(a.storage_capacity):
            bad(f"{path}.storage_capacity", "nonnegative", f"capacity {a.storage_capacity} must be >= 0")
        if a.population < 0 or a.poor_population < 0:
            bad(f"{path}.population", "nonnegative", "population counts must be >= 0")
        elif a.poor_population > a.population:
            bad(f"{path}.poor_population", "poverty-count",
                f"poor_population {a.poor_population} exceeds population {a.population}")
        if math.isfinite(size) and size > 0 and not _in_region(a.location, size):
            bad(f"{path}.location", "in-region", f"{a.location} outside [0, {size}]^2")
    return out


def check_scenario(s: Scenario) -> Scenario:
    """Raise :class:`ScenarioError` if ``s`` is invalid, else return it unchanged."""
    violations = validate_scenario(s)
    if violations:
        raise ScenarioError(violations)
    return s


# -- file format --------------------------------------------------------------

def _xy(d: dict) -> tuple[float, float]:
    return (float(d["x"]), float(d["y"]))


def scenario_from_dict(doc: dict) -> Scenario:
    try:
        food_types = tuple(
            FoodType(int(f["id"]), str(f["name"]), float(f["weight"]), int(f["perishability_rank"]))
            for f in doc["food_types"]
        )
        donors = tuple(
            Donor(int(d["id"]), str(d["name"]), _xy(d["location"]),
                  tuple(float(v) for v in d["supply"]), int(d["perishability_rank"]))
            for d in doc["donors"]
        )
        agencies = tuple(
            Agency(int(a["id"]), str(a["name"]), _xy(a["location"]),
                   tuple(float(v) for v in a["demand"]), float(a["storage_capacity"]),
                   int(a["population"]), int(a["poor_population"]))
            for a in doc["agencies"]
        )
        params = doc["params"]
        weights = tuple(ft.weight for ft in sorted(food_types, key=lambda f: f.id))
        epsilon = params["epsilon"]
        if isinstance(epsilon, (int, float)):
            epsilon = [epsilon] * len(food_types)
        return Scenario(
            region_size=float(doc["region_size_km"]),
            food_types=food_types,
            donors=donors,
            agencies=agencies,
            food_bank_location=_xy(doc["food_bank_location"]),
            params=PolicyParams(
                epsilon=tuple(float(e) for e in epsilon),
                weights=weights,
                pounds_per_person=float(params.get("pounds_per_person", 4.0)),
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioFormatError(f"malformed scenario document: {exc!r}") from exc


def scenario_to_dict(s: Scenario) -> dict:
    loc = lambda xy: {"x": xy[0], "y": xy[1]}  # noqa: E731
    return {
        "region_size_km": s.region_size,
        "food_bank_location": loc(s.food_bank_location),
        "food_types": [
            {"id": f.id, "name": f.name, "weight": f.weight, "perishability_rank": f.perishability_rank}
            for f in s.food_types
        ],
        "donors": [
            {"id": d.id, "name": d.name, "location": loc(d.location),
             "supply": list(d.supply), "perishability_rank": d.perishability_rank}
            for d in s.donors
        ],
        "agencies": [
            {"id": a.id, "name": a.name, "location": loc(a.location), "demand": list(a.demand),
             "storage_capacity": a.storage_capacity, "population": a.population,
             "poor_population": a.poor_population}
            for a in s.agencies
        ],
        "params": {"epsilon": list(s.params.epsilon), "pounds_per_person": s.params.pounds_per_person},
    }


def load_scenario(path: str | Path) -> Scenario:
    """Read a scenario JSON file. Raises OSError or ScenarioFormatError; does not validate."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ScenarioFormatError(f"{path}: top level must be an object")
    return scenario_from_dict(doc)


def save_scenario(s: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(s), indent=2) + "\n")
