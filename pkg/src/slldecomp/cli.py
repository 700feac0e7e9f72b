"""Command-line entry point: ``slldecomp <subcommand>`` or ``python -m slldecomp``.

Exit codes: 0 success, 2 usage or input error, 3 experiment with every repeat censored.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .errors import ParameterError, UndecidableError
from .fihc import read_population
from .functions import ConcatenatedProblem, MonotonicityProfile, extract_profile, load_function, resolve_function
from .harness import ExperimentConfig, run_growth_experiment
from .linkage import fill_trace_csv, run_lt_gomea_lite
from .stats import build_dsm, dsm_csv, fill_report_csv, fill_summary
from .theory import estimate_for_function, is_sll_undecidable, scan_undecidable, theoretical_distribution

EXIT_OK, EXIT_USAGE, EXIT_CENSORED = 0, 2, 3


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _echo(config: dict) -> None:
    """Resolved settings go to stderr so CSV on stdout stays machine-readable."""
    print("# config: " + json.dumps(config, sort_keys=True), file=sys.stderr)


def _frac(q) -> dict:
    return {"exact": f"{q.numerator}/{q.denominator}", "value": float(q)}


def _int_arg(text: str) -> int:
    """Integers that may be written in float notation, such as ``1e7``."""
    value = float(text)
    if value != int(value):
        raise argparse.ArgumentTypeError(f"expected an integer, got {text}")
    return int(value)


def _parse_problem(text: str) -> ConcatenatedProblem:
    """``name:k:r``, ``compactname:r`` or ``file.json:r``."""
    parts = text.split(":")
    if len(parts) == 3:
        g = resolve_function(parts[0], int(parts[1]))
    elif len(parts) == 2:
        g = resolve_function(parts[0])
    else:
        raise ParameterError(f"problem must look like name:k:r or file.json:r, got {text!r}")
    return ConcatenatedProblem(g, int(parts[-1]))


def _load_profile(text: str, k: int | None) -> MonotonicityProfile:
    path = Path(text)
    if path.is_file():
        record = json.loads(path.read_text())
        if "values" in record:
            return extract_profile(load_function(path))
        return MonotonicityProfile.from_dict(record)
    return extract_profile(resolve_function(text, k))


def cmd_estimate(args) -> int:
    g = resolve_function(args.function, args.k)
    out = {"function": g.name, "k": g.k, "r": args.r, "alpha": args.alpha}
    try:
        est = estimate_for_function(g, args.r, args.alpha)
    except UndecidableError:
        out.update(q_tilde=0.25, rho=None, exponent=None, pair_budget=None, s_min="undecidable")
    else:
        out.update(est.to_dict())
    print(_dump(out))
    return EXIT_OK


def cmd_theory_dist(args) -> int:
    profile = _load_profile(args.profile, args.k)
    dist = theoretical_distribution(profile)
    out = {
        "profile": profile.to_dict(),
        "label": profile.label,
        "q1": _frac(dist.q1),
        "q2": _frac(dist.q2),
        "q3": _frac(dist.q3),
        "undecidable": is_sll_undecidable(dist),
    }
    print(_dump(out))
    return EXIT_OK


def cmd_scan(args) -> int:
    if args.k_min > args.k_max:
        raise ParameterError("k-min must not exceed k-max")
    _echo({"k_min": args.k_min, "k_max": args.k_max, "n_min": args.n_min, "n_max": args.n_max})
    hits = scan_undecidable(range(args.k_min, args.k_max + 1), args.n_max, args.n_min, workers=args.workers)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["k", "MAX_g", "MIN_g", "q1", "q2", "q3", "undecidable"])
    for profile, dist in hits:
        writer.writerow([
            profile.k,
            "(" + ",".join(map(str, profile.maxima)) + ")",
            "(" + ",".join(map(str, profile.minima)) + ")",
            str(dist.q1), str(dist.q2), str(dist.q3), int(is_sll_undecidable(dist)),
        ])
    return EXIT_OK


def cmd_experiment(args) -> int:
    try:
        record = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParameterError(f"cannot read config {args.config}: {exc}") from None
    if not isinstance(record, dict):
        raise ParameterError("config must be a JSON object")
    cfg = ExperimentConfig.from_dict(record)
    result = run_growth_experiment(cfg, workers=args.workers)
    text = _dump(result.to_dict())
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "record.json").write_text(text + "\n")
        (out / "repeats.csv").write_text(result.repeats_csv())
    print(text)
    return EXIT_CENSORED if not result.uncensored else EXIT_OK


def cmd_fill(args) -> int:
    problem = _parse_problem(args.problem)
    bits, header = read_population(args.population)
    if bits.shape[1] != problem.n:
        raise ParameterError(f"population has {bits.shape[1]} genes but the problem has n={problem.n}")
    _echo({"population": str(args.population), "problem": problem.label, "header": header})
    dsm = build_dsm(bits, problem.block_labels())
    if args.dsm_csv:
        Path(args.dsm_csv).write_text(dsm_csv(dsm))
    sys.stdout.write(fill_report_csv(dsm))
    print(f"# fill_summary: {fill_summary(dsm)!r}", file=sys.stderr)
    return EXIT_OK


def cmd_optimize(args) -> int:
    g = resolve_function(args.function, args.k)
    problem = ConcatenatedProblem(g, args.r)
    _echo({"function": g.name, "r": args.r, "pop": args.pop, "budget": args.budget,
           "seed": args.seed, "linkage": args.linkage})
    res = run_lt_gomea_lite(problem, args.pop, args.budget, args.seed, linkage=args.linkage)
    sys.stdout.write(fill_trace_csv(res.fill_trace))
    print(f"# best_fitness: {res.best_fitness!r} ffe_to_optimum: {res.ffe_to_optimum} ffe_used: {res.ffe_used}",
          file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slldecomp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="population size for a perfect DSM")
    p.add_argument("--function", required=True, help="family name, compact name (bimodal6) or JSON file")
    p.add_argument("--k", type=int)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.1, help="tolerated failure probability")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("theory-dist", help="exact dependent-pair distribution after FIHC")
    p.add_argument("--profile", required=True, help="profile/function JSON file or builtin name")
    p.add_argument("--k", type=int)
    p.set_defaults(func=cmd_theory_dist)

    p = sub.add_parser("scan-undecidable", help="list profiles with independent dependent pairs")
    p.add_argument("--k-min", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("experiment", help="growing-population experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-dir", help="also write record.json and repeats.csv here")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("fill", help="Fill report for a population dump")
    p.add_argument("--population", required=True)
    p.add_argument("--problem", required=True, help="name:k:r, compactname:r or file.json:r")
    p.add_argument("--dsm-csv", help="also write the DSM matrix here")
    p.set_defaults(func=cmd_fill)

    p = sub.add_parser("optimize", help="LT + optimal mixing run with a Fill trace")
    p.add_argument("--function", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--pop", type=int, required=True)
    p.add_argument("--budget", type=_int_arg, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--linkage", choices=["average", "single"], default="average")
    p.set_defaults(func=cmd_optimize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
