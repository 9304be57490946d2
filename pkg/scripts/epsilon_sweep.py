"""Inequality-aversion sweep.

    python scripts/epsilon_sweep.py --epsilons 0.5,1.0,1.5,2.0 --replications 100 --out sweep.csv
"""
import argparse
from pathlib import Path

from foodbank.cli import SWEEP_COLUMNS, comparison_rows, parse_epsilons, render_table
from foodbank.simulate import GeneratorConfig, epsilon_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--epsilons", default="0.5,1.0,1.5,2.0")
    ap.add_argument("--replications", type=int, default=100)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()

    rows = []
    for eps, stats in epsilon_sweep(GeneratorConfig(seed=args.seed), parse_epsilons(args.epsilons),
                                    args.replications, workers=args.workers):
        rows.extend({"epsilon": eps, **r} for r in comparison_rows(stats))
    table = render_table(rows, SWEEP_COLUMNS, "csv")
    if args.out:
        args.out.write_text(table)
    print(table, end="")


if __name__ == "__main__":
    main()
