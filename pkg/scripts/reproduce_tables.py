"""Estimated population sizes next to growing-population measurements.

Prints one row per (function, r): the estimate s_min, the 90th percentile of
the measured final sizes, and their ratio. Rows whose estimate is too large
for a desk run are printed with the estimate only unless --all is given.
"""

import argparse

from slldecomp.harness import ExperimentConfig, format_ratio, run_growth_experiment
from slldecomp.functions import builtin
from slldecomp.theory import estimate_for_function

ROWS = [
    ("bimodal", 6, 2), ("bimodal", 6, 5), ("bimodal", 6, 10), ("bimodal", 8, 2), ("bimodal", 10, 2),
    ("reverted", 6, 2), ("reverted", 6, 10), ("reverted", 8, 2), ("reverted", 10, 2),
]
DESK_LIMIT = 20_000


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--increment", type=int, default=1)
    parser.add_argument("--all", action="store_true", help="also run rows with large estimates")
    args = parser.parse_args()

    print(f"{'function':<12}{'r':>4}{'s_min':>10}{'p90':>12}{'ratio':>8}")
    for family, k, r in ROWS:
        est = estimate_for_function(builtin(family, k), r)
        if est.s_min > DESK_LIMIT and not args.all:
            print(f"{family + '-' + str(k):<12}{r:>4}{est.s_min:>10}{'-':>12}{'-':>8}")
            continue
        cfg = ExperimentConfig(function=family, k=k, r=r, repeats=args.repeats, seed=args.seed,
                               increment=args.increment)
        rec = run_growth_experiment(cfg, workers=args.workers)
        p90 = "-" if rec.p90 is None else f"{rec.p90:.2f}"
        print(f"{family + '-' + str(k):<12}{r:>4}{est.s_min:>10}{p90:>12}{format_ratio(rec.ratio):>8}", flush=True)


if __name__ == "__main__":
    main()
