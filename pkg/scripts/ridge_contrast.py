"""Ridge functions with two- and four-step periods: DSM growth and optimizer Fill.

The two-step ridge has stochastically independent dependent pairs after FIHC,
so a growing population never yields a perfect DSM; the four-step ridge does.
The same split shows up in the Fill of an LT + optimal mixing run.
"""

import argparse

import numpy as np

from slldecomp.functions import ConcatenatedProblem, builtin
from slldecomp.harness import ExperimentConfig, run_growth_experiment
from slldecomp.linkage import run_lt_gomea_lite


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=20)
    parser.add_argument("--cap", type=int, default=100_000)
    parser.add_argument("--runs", type=int, default=30)
    parser.add_argument("--pop", type=int, default=1000)
    parser.add_argument("--budget", type=int, default=100_000)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    for name in ("ridge12_2", "ridge12_4"):
        cfg = ExperimentConfig(function=name, r=2, repeats=args.repeats, max_individuals=args.cap)
        rec = run_growth_experiment(cfg, workers=args.workers)
        p90 = "-" if rec.p90 is None else f"{rec.p90:.1f}"
        print(f"{name}: perfect DSM in {len(rec.uncensored)}/{args.repeats} repeats (cap {args.cap}), p90 {p90}")

    fills = {}
    for name in ("ridge4", "ridge2"):
        problem = ConcatenatedProblem(builtin(name, 12), 2)
        fills[name] = np.array([run_lt_gomea_lite(problem, args.pop, args.budget, seed).terminal_fill
                                for seed in range(args.runs)])
    wins = int(np.sum(fills["ridge4"] > fills["ridge2"]))
    print(f"terminal Fill, pop {args.pop}, budget {args.budget}: ridge12_4 mean {fills['ridge4'].mean():.3f}, "
          f"ridge12_2 mean {fills['ridge2'].mean():.3f}, ridge12_4 higher in {wins}/{args.runs}")


if __name__ == "__main__":
    main()
