"""Growing-population experiments: how many FIHC optima until the DSM is perfect?

Each repeat adds individuals one (or ``increment``) at a time to a single
population and stops at the first size whose DSM separates every dependent
pair from every independent pair. Pair counts are additive, so a run of
consecutive sizes is tested in one vectorized pass over prefix sums.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .errors import ParameterError, UndecidableError
from .fihc import IndividualSource, RngSeed
from .functions import ConcatenatedProblem, UnitationFunction, resolve_function
from .stats import distances_from_counts, pair_index, perfect_from_pair_distances
from .theory import EstimateResult, estimate_for_function

__all__ = [
    "CONFIG_VERSION",
    "ExperimentConfig",
    "RepeatOutcome",
    "ExperimentRecord",
    "percentile",
    "run_repeat",
    "run_growth_experiment",
]

CONFIG_VERSION = 1
_CELLS_PER_CHUNK = 2_000_000


def percentile(samples, q: float) -> float:
    """Linear interpolation between order statistics at rank (m - 1) q."""
    data = np.asarray(samples, dtype=float)
    if data.size == 0:
        raise ParameterError("percentile of an empty sample")
    if not 0.0 < q < 1.0:
        raise ParameterError(f"q must lie in (0, 1), got {q}")
    return float(np.quantile(data, q, method="linear"))


@dataclass(frozen=True)
class ExperimentConfig:
    function: str
    k: int | None = None
    r: int = 2
    repeats: int = 100
    alpha: float = 0.1
    initial_size: int = 2
    increment: int = 1
    refine: bool = True
    max_individuals: int = 50_000_000
    time_limit_s: float | None = 86_400.0
    seed: int = 0
    version: int = CONFIG_VERSION

    def __post_init__(self):
        if self.version != CONFIG_VERSION:
            raise ParameterError(f"unsupported config version {self.version}; expected {CONFIG_VERSION}")
        if self.repeats < 1 or self.increment < 1 or self.r < 1:
            raise ParameterError("repeats, increment and r must all be >= 1")
        if self.initial_size < 2:
            raise ParameterError("initial_size must be >= 2 (a DSM needs two individuals)")
        if self.max_individuals < self.initial_size:
            raise ParameterError("max_individuals must be at least initial_size")
        if self.time_limit_s is not None and self.time_limit_s <= 0:
            raise ParameterError("time_limit_s must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise ParameterError("alpha must lie in (0, 1)")

    @classmethod
    def from_dict(cls, record: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(record) - known
        if unknown:
            raise ParameterError(f"unknown config fields: {sorted(unknown)}")
        if "function" not in record:
            raise ParameterError("config needs a 'function'")
        try:
            return cls(**record)
        except TypeError as exc:
            raise ParameterError(str(exc)) from None

    def to_dict(self) -> dict:
        return asdict(self)

    def unitation_function(self) -> UnitationFunction:
        return resolve_function(self.function, self.k)

    def problem(self) -> ConcatenatedProblem:
        return ConcatenatedProblem(self.unitation_function(), self.r)


@dataclass(frozen=True)
class RepeatOutcome:
    repeat: int
    final_size: int | None
    censored: bool
    reason: str = ""


@dataclass
class ExperimentRecord:
    config: ExperimentConfig
    function_name: str
    outcomes: list
    estimate: EstimateResult | None = None
    estimate_note: str = ""
    summary: dict = field(default_factory=dict)

    @property
    def uncensored(self) -> list:
        return [o.final_size for o in self.outcomes if not o.censored]

    @property
    def n_censored(self) -> int:
        return sum(o.censored for o in self.outcomes)

    @property
    def p90(self) -> float | None:
        return self.summary.get("p90")

    @property
    def ratio(self) -> float | None:
        return self.summary.get("ratio")

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "function": self.function_name,
            "n": self.config.r * self.config.unitation_function().k,
            "summary": self.summary,
            "censored": self.n_censored,
            "estimate": None if self.estimate is None else self.estimate.to_dict(),
            "estimate_note": self.estimate_note,
            "repeats": [asdict(o) for o in self.outcomes],
        }

    def repeats_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["repeat", "final_size", "censored", "reason"])
        for o in self.outcomes:
            writer.writerow([o.repeat, "" if o.final_size is None else o.final_size, int(o.censored), o.reason])
        return out.getvalue()


def _summarize(record: ExperimentRecord) -> dict:
    sizes = record.uncensored
    if not sizes:
        return {"p90": None, "mean": None, "min": None, "max": None, "ratio": None,
                "diagnostic": f"all {len(record.outcomes)} repeats censored"}
    p90 = percentile(sizes, 0.9)
    ratio = None if record.estimate is None else record.estimate.s_min / p90
    return {"p90": p90, "mean": float(np.mean(sizes)), "min": int(min(sizes)), "max": int(max(sizes)),
            "ratio": ratio}


class _Prefix:
    """Per-gene and per-pair counts of a growing population, with lookups at any size."""

    def __init__(self, source: IndividualSource, n: int):
        self.source = source
        self.iu, self.ju = pair_index(n)

    def counts_at(self, size: int):
        bits, _ = self.source.get(0, size)
        x = bits.astype(np.int64)
        return x.sum(axis=0), (x[:, self.iu] & x[:, self.ju]).sum(axis=0)


def run_repeat(problem: ConcatenatedProblem, cfg: ExperimentConfig, repeat: int) -> RepeatOutcome:
    """One growing-population run on stream ``repeat`` of the config's seed."""
    n = problem.n
    source = IndividualSource(problem, RngSeed(cfg.seed, repeat))
    iu, ju = pair_index(n)
    labels = problem.block_labels()
    dependent = labels[iu] == labels[ju]
    chunk = max(cfg.increment, min(4096, _CELLS_PER_CHUNK // max(len(iu), 1)))

    def perfect(sizes, ones, c11):
        d = distances_from_counts(sizes, ones, c11, iu, ju)
        return perfect_from_pair_distances(d, dependent)

    ones = np.zeros(n, dtype=np.int64)
    c11 = np.zeros(len(iu), dtype=np.int64)
    have = 0
    next_test = cfg.initial_size
    started = time.monotonic()
    while next_test <= cfg.max_individuals:
        hi = min(max(have + chunk, next_test), cfg.max_individuals)
        bits, _ = source.get(have, hi)
        x = bits.astype(np.int64)
        cum_ones = ones + np.cumsum(x, axis=0)
        cum_c11 = c11 + np.cumsum(x[:, iu] & x[:, ju], axis=0)
        tests = np.arange(next_test, hi + 1, cfg.increment)
        if tests.size:
            rows = tests - have - 1
            ok = perfect(tests, cum_ones[rows], cum_c11[rows])
            if ok.any():
                hit = int(tests[int(np.argmax(ok))])
                if cfg.increment > 1 and cfg.refine and hit > cfg.initial_size:
                    hit = _refine(hit, cfg, _Prefix(source, n), perfect)
                return RepeatOutcome(repeat, hit, False)
            next_test = int(tests[-1]) + cfg.increment
        ones, c11, have = cum_ones[-1], cum_c11[-1], hi
        if cfg.time_limit_s is not None and time.monotonic() - started > cfg.time_limit_s:
            return RepeatOutcome(repeat, None, True, "time")
    return RepeatOutcome(repeat, None, True, "cap")


def _refine(hit: int, cfg: ExperimentConfig, prefix: _Prefix, perfect) -> int:
    """Bisect between the last failing tested size and ``hit`` for a smaller perfect size."""
    lo, hi = max(hit - cfg.increment, cfg.initial_size - 1), hit
    while hi - lo > 1:
        mid = (lo + hi) // 2
        ones, c11 = prefix.counts_at(mid)
        if perfect(np.array([mid]), ones[None], c11[None])[0]:
            hi = mid
        else:
            lo = mid
    return hi


def _run_repeat_job(args):
    cfg_dict, repeat = args
    cfg = ExperimentConfig.from_dict(cfg_dict)
    return run_repeat(cfg.problem(), cfg, repeat)


def run_growth_experiment(cfg: ExperimentConfig, workers: int = 1) -> ExperimentRecord:
    """All repeats of a growing-population experiment plus the matching size estimate."""
    g = cfg.unitation_function()
    problem = ConcatenatedProblem(g, cfg.r)
    estimate, note = None, ""
    try:
        estimate = estimate_for_function(g, cfg.r, cfg.alpha)
    except UndecidableError:
        note = "undecidable"
    except ParameterError as exc:
        note = f"no estimate: {exc}"
    if workers > 1:
        jobs = [(cfg.to_dict(), rep) for rep in range(cfg.repeats)]
        with ProcessPoolExecutor(workers) as pool:
            outcomes = list(pool.map(_run_repeat_job, jobs))
    else:
        outcomes = [run_repeat(problem, cfg, rep) for rep in range(cfg.repeats)]
    record = ExperimentRecord(cfg, g.name, outcomes, estimate, note)
    record.summary = _summarize(record)
    return record


def format_ratio(value) -> str:
    return "-" if value is None or not math.isfinite(value) else f"{value:.2f}"
