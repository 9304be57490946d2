"""Command-line front end.

    foodbank validate --scenario s.json
    foodbank gen --seed 7 --out s.json
    foodbank run --scenario s.json --policy both --out result.csv
    foodbank compare --replications 100 --seed 42 --out comparison.csv
    foodbank sweep --epsilons 0.5,1.0,1.5,2.0 --replications 100 --out sweep.csv

Exit codes: 0 success, 2 input/IO error, 3 scenario validation failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace
from pathlib import Path

from foodbank.metrics import compute_metrics
from foodbank.model import (
    Scenario,
    ScenarioFormatError,
    load_scenario,
    save_scenario,
    scenario_to_dict,
    validate_scenario,
)
from foodbank.policy import AGENCY_ORDERS, run_baseline_policy, run_proposed_policy
from foodbank.simulate import ComparisonStats, GeneratorConfig, epsilon_sweep, generate_scenario, run_replications

EXIT_OK, EXIT_INPUT, EXIT_INVALID = 0, 2, 3

COMPARE_COLUMNS = [
    "policy",
    "mean_overflow_lbs", "sd_overflow_lbs",
    "mean_undistributed_lbs", "sd_undistributed_lbs",
    "mean_people_served", "sd_people_served",
    "n_replications", "seed",
]
SWEEP_COLUMNS = ["epsilon"] + COMPARE_COLUMNS
RUN_COLUMNS = [
    "policy", "agency_id", "delivered_lbs", "demand_lbs", "overflow_lbs",
    "undistributed_lbs", "people_served", "chosen_donors", "combined_welfare",
]

# flags that only make sense when generating a scenario
GENERATOR_FLAGS = ("seed", "donors", "agencies", "food_types", "supply_range", "demand_range", "region_km")


class InputError(Exception):
    pass


# -- argument parsing -----------------------------------------------------------

def _range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None
    return lo, hi


def _floats(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    return values


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("scenario source")
    src.add_argument("--scenario", type=Path, help="scenario JSON file")
    src.add_argument("--seed", type=_u64)
    src.add_argument("--donors", type=_positive_int)
    src.add_argument("--agencies", type=_positive_int)
    src.add_argument("--food-types", type=_positive_int)
    src.add_argument("--supply-range", type=_range, metavar="LO:HI")
    src.add_argument("--demand-range", type=_range, metavar="LO:HI")
    src.add_argument("--region-km", type=float)
    prm = common.add_argument_group("policy parameters")
    prm.add_argument("--epsilon", type=_floats, metavar="F[,F...]")
    prm.add_argument("--weights", type=_floats, metavar="F,F,...")
    prm.add_argument("--pounds-per-person", type=float)
    prm.add_argument("--agency-order", choices=AGENCY_ORDERS, default="poverty-desc")
    out = common.add_argument_group("output")
    out.add_argument("--out", type=Path, help="output file (default: stdout)")
    out.add_argument("--format", choices=("csv", "json"), default="csv")

    reps = argparse.ArgumentParser(add_help=False)
    reps.add_argument("--replications", type=_positive_int, default=100)
    reps.add_argument("--workers", type=_positive_int, default=1)

    parser = argparse.ArgumentParser(prog="foodbank", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check a scenario's invariants")
    sub.add_parser("gen", parents=[common], help="write a generated scenario to a file")
    run = sub.add_parser("run", parents=[common], help="run policies on one scenario")
    run.add_argument("--policy", choices=("proposed", "baseline", "both"), default="both")
    sub.add_parser("compare", parents=[common, reps], help="Monte Carlo comparison of both policies")
    sweep = sub.add_parser("sweep", parents=[common, reps], help="comparison at several epsilon values")
    sweep.add_argument("--epsilons", required=True, help="comma-separated epsilon values")
    return parser


# -- scenario / config assembly ----------------------------------------------------

def generator_config(args: argparse.Namespace) -> GeneratorConfig:
    cfg = GeneratorConfig()
    changes = {}
    for flag, name in (("seed", "seed"), ("donors", "n_donors"), ("agencies", "n_agencies"),
                       ("food_types", "n_food_types"), ("supply_range", "supply_range"),
                       ("demand_range", "demand_range"), ("region_km", "region_size"),
                       ("weights", "weights"), ("pounds_per_person", "pounds_per_person")):
        value = getattr(args, flag)
        if value is not None:
            changes[name] = value
    if args.epsilon is not None:
        changes["epsilon"] = args.epsilon[0] if len(args.epsilon) == 1 else args.epsilon
    cfg = replace(cfg, **changes)
    try:
        cfg.check()
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return cfg


def _override_params(s: Scenario, args: argparse.Namespace) -> Scenario:
    p = s.n_types
    if args.epsilon is not None:
        eps = args.epsilon * p if len(args.epsilon) == 1 else args.epsilon
        s = s.with_params(epsilon=tuple(eps))
    if args.weights is not None:
        s = replace(
            s,
            food_types=tuple(replace(f, weight=args.weights[f.id]) if f.id < len(args.weights) else f
                             for f in s.food_types),
        ).with_params(weights=tuple(args.weights))
    if args.pounds_per_person is not None:
        s = s.with_params(pounds_per_person=args.pounds_per_person)
    return s


def load_or_generate(args: argparse.Namespace) -> Scenario:
    if args.scenario is not None:
        clash = [f"--{f.replace('_', '-')}" for f in GENERATOR_FLAGS if getattr(args, f) is not None]
        if clash:
            raise InputError(f"--scenario cannot be combined with generator flags: {', '.join(clash)}")
        try:
            s = load_scenario(args.scenario)
        except (OSError, ScenarioFormatError) as exc:
            raise InputError(f"cannot read scenario {args.scenario}: {exc}") from exc
        return _override_params(s, args)
    return generate_scenario(generator_config(args))


# -- table I/O ------------------------------------------------------------------

def _fmt(value):
    if isinstance(value, float):
        return f"{value:.6f}"
    return value


def render_table(rows: list[dict], columns: list[str], fmt: str) -> str:
    if fmt == "json":
        doc = [{c: (round(r[c], 6) if isinstance(r[c], float) else r[c]) for c in columns} for r in rows]
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({c: _fmt(r[c]) for c in columns})
    return buf.getvalue()


def read_table(path: str | Path, fmt: str | None = None) -> list[dict]:
    """Read a table written by this CLI back into a list of row dicts (values as text for CSV)."""
    path = Path(path)
    fmt = fmt or ("json" if path.suffix == ".json" else "csv")
    text = path.read_text()
    if fmt == "json":
        return json.loads(text)
    return list(csv.DictReader(io.StringIO(text)))


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        out.write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc}") from exc


def comparison_rows(stats: ComparisonStats) -> list[dict]:
    rows = []
    for ps in stats.policies():
        mo, so = ps.overflow_stats
        mu, su = ps.undistributed_stats
        mp, sp = ps.people_stats
        rows.append({
            "policy": ps.policy,
            "mean_overflow_lbs": mo, "sd_overflow_lbs": so,
            "mean_undistributed_lbs": mu, "sd_undistributed_lbs": su,
            "mean_people_served": mp, "sd_people_served": sp,
            "n_replications": stats.n_replications, "seed": stats.seed,
        })
    return rows


def run_rows(s: Scenario, policy: str, agency_order: str) -> list[dict]:
    plans = []
    if policy in ("proposed", "both"):
        plans.append(run_proposed_policy(s, agency_order))
    if policy in ("baseline", "both"):
        plans.append(run_baseline_policy(s))
    rows = []
    for plan in plans:
        m = compute_metrics(plan, s)
        chosen = {d.agency_id: d for d in plan.decisions}
        by_id = {am.agency_id: am for am in m.per_agency}
        for aid in plan.visit_order:
            am = by_id[aid]
            dec = chosen.get(aid)
            rows.append({
                "policy": plan.policy, "agency_id": aid,
                "delivered_lbs": float(sum(am.delivered)), "demand_lbs": float(sum(am.demand)),
                "overflow_lbs": am.overflow_lbs, "undistributed_lbs": "",
                "people_served": am.people_served,
                "chosen_donors": ";".join(str(d) for d in dec.donor_subset) if dec else "",
                "combined_welfare": dec.welfare.combined if dec else "",
            })
        rows.append({
            "policy": plan.policy, "agency_id": "TOTAL",
            "delivered_lbs": float(plan.delivered().sum()),
            "demand_lbs": float(sum(sum(a.demand) for a in s.agencies)),
            "overflow_lbs": m.overflow_lbs, "undistributed_lbs": m.undistributed_lbs,
            "people_served": m.people_served, "chosen_donors": "", "combined_welfare": "",
        })
    return rows


# -- commands -------------------------------------------------------------------

def _report_violations(s: Scenario) -> bool:
    violations = validate_scenario(s)
    for v in violations:
        print(f"violation: {v}", file=sys.stderr)
    return bool(violations)


def cmd_validate(args) -> int:
    s = load_or_generate(args)
    if _report_violations(s):
        return EXIT_INVALID
    print("scenario is valid")
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.scenario is not None:
        raise InputError("gen writes a generated scenario; --scenario is not accepted")
    s = generate_scenario(generator_config(args))
    if args.out is None:
        sys.stdout.write(json.dumps(scenario_to_dict(s), indent=2) + "\n")
    else:
        try:
            save_scenario(s, args.out)
        except OSError as exc:
            raise InputError(f"cannot write {args.out}: {exc}") from exc
    return EXIT_OK


def cmd_run(args) -> int:
    s = load_or_generate(args)
    if _report_violations(s):
        return EXIT_INVALID
    _emit(render_table(run_rows(s, args.policy, args.agency_order), RUN_COLUMNS, args.format), args.out)
    return EXIT_OK


def _replication_source(args) -> GeneratorConfig:
    if args.scenario is not None:
        raise InputError(f"{args.command} generates its own scenarios; --scenario is not accepted")
    return generator_config(args)


def cmd_compare(args) -> int:
    cfg = _replication_source(args)
    stats = run_replications(cfg, args.replications, agency_order=args.agency_order, workers=args.workers)
    _emit(render_table(comparison_rows(stats), COMPARE_COLUMNS, args.format), args.out)
    return EXIT_OK


def parse_epsilons(text: str) -> list[float]:
    parts = [p.strip() for p in text.split(",")]
    if not text.strip() or any(not p for p in parts):
        raise InputError(f"malformed epsilon list {text!r}")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise InputError(f"malformed epsilon list {text!r}") from None
    if any(not v >= 0 for v in values):
        raise InputError(f"epsilon values must be >= 0, got {text!r}")
    return values


def cmd_sweep(args) -> int:
    epsilons = parse_epsilons(args.epsilons)
    cfg = _replication_source(args)
    rows = []
    for eps, stats in epsilon_sweep(cfg, epsilons, args.replications,
                                    agency_order=args.agency_order, workers=args.workers):
        rows.extend({"epsilon": eps, **r} for r in comparison_rows(stats))
    _emit(render_table(rows, SWEEP_COLUMNS, args.format), args.out)
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "gen": cmd_gen,
    "run": cmd_run,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
