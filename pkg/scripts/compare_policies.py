"""Monte Carlo comparison of the two policies.

    python scripts/compare_policies.py --replications 100 --seed 42 --out comparison.csv
"""
import argparse
from pathlib import Path

from foodbank.cli import COMPARE_COLUMNS, comparison_rows, render_table
from foodbank.simulate import GeneratorConfig, run_replications


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--replications", type=int, default=100)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--epsilon", type=float, default=1.5)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()

    stats = run_replications(GeneratorConfig(seed=args.seed, epsilon=args.epsilon), args.replications,
                             workers=args.workers)
    table = render_table(comparison_rows(stats), COMPARE_COLUMNS, "csv")
    if args.out:
        args.out.write_text(table)
    print(table, end="")
    for metric in ("overflow", "waste", "people"):
        diff = stats.paired_difference(metric)
        print(f"paired {metric} (proposed - baseline): mean {diff.mean():+.2f}, "
              f"sd {diff.std(ddof=1) if diff.size > 1 else 0.0:.2f}")


if __name__ == "__main__":
    main()
