"""Linkage tree from a DSM, optimal mixing, and a small fixed-population LT+OM optimizer."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ParameterError
from .fihc import RngSeed, sample_optimized_population
from .functions import ConcatenatedProblem
from .stats import Dsm, build_dsm, fill_summary

__all__ = [
    "LinkageTree",
    "MixingOutcome",
    "build_linkage_tree",
    "optimal_mixing",
    "FillTraceRow",
    "OptimizerResult",
    "run_lt_gomea_lite",
    "fill_trace_csv",
]


@dataclass(frozen=True)
class LinkageTree:
    """Binary merge hierarchy; node ``i`` has gene mask ``masks[i]``.

    The first ``n`` nodes are singleton leaves, the rest are merges in the
    order they happened, so the root is last.
    """

    n: int
    masks: tuple
    heights: tuple
    children: tuple

    @property
    def root(self) -> int:
        return len(self.masks) - 1

    def mixing_masks(self) -> list:
        """Every node mask except the root's."""
        return [np.array(sorted(m)) for m in self.masks[:-1]]


def build_linkage_tree(dsm: Dsm, linkage: str = "average") -> LinkageTree:
    """Agglomerative clustering of genes on the DSM distances.

    ``linkage`` is ``"average"`` (UPGMA, mean pairwise distance) or
    ``"single"``. Ties go to the pair of clusters whose smallest gene indices
    are lexicographically lowest.
    """
    d = np.asarray(dsm.d, dtype=float)
    n = d.shape[0]
    if n < 2:
        raise ParameterError("a linkage tree needs at least two genes")
    if linkage not in ("average", "single"):
        raise ParameterError(f"unknown linkage criterion {linkage!r}")
    masks = [frozenset([i]) for i in range(n)]
    heights = [0.0] * n
    children = [()] * n
    active = list(range(n))
    # pairwise cluster distances, keyed by node ids
    dist = {(a, b): d[a, b] for a in range(n) for b in range(a + 1, n)}
    while len(active) > 1:
        best = None
        for x in range(len(active)):
            for y in range(x + 1, len(active)):
                a, b = active[x], active[y]
                key = (dist[(a, b) if a < b else (b, a)], min(masks[a]), min(masks[b]))
                key = (key[0],) + tuple(sorted(key[1:]))
                if best is None or key < best[0]:
                    best = (key, a, b)
        (height, *_), a, b = best
        node = len(masks)
        masks.append(masks[a] | masks[b])
        heights.append(float(height))
        children.append((a, b))
        active = [c for c in active if c not in (a, b)]
        for c in active:
            dac = dist[(a, c) if a < c else (c, a)]
            dbc = dist[(b, c) if b < c else (c, b)]
            if linkage == "average":
                na, nb = len(masks[a]), len(masks[b])
                dist[(c, node)] = (na * dac + nb * dbc) / (na + nb)
            else:
                dist[(c, node)] = min(dac, dbc)
        active.append(node)
    return LinkageTree(n, tuple(masks), tuple(heights), tuple(children))


@dataclass(frozen=True)
class MixingOutcome:
    accepted: bool
    fitness_before: float
    fitness_after: float
    evaluations_used: int


def optimal_mixing(source, donor, mask, problem: ConcatenatedProblem, fitness_before=None):
    """Copy the donor's genes at ``mask`` into the source; keep the result unless fitness drops."""
    source = np.asarray(source, dtype=np.uint8)
    donor = np.asarray(donor, dtype=np.uint8)
    if source.shape != (problem.n,) or donor.shape != (problem.n,):
        raise DimensionError(f"source and donor must have length {problem.n}")
    mask = np.asarray(mask, dtype=int).reshape(-1)
    if mask.size == 0:
        raise ParameterError("the mixing mask is empty")
    before = problem.evaluate(source) if fitness_before is None else fitness_before
    if np.array_equal(source[mask], donor[mask]):
        return source.copy(), MixingOutcome(True, before, before, 0)
    trial = source.copy()
    trial[mask] = donor[mask]
    after = problem.evaluate(trial)
    if after >= before:
        return trial, MixingOutcome(True, before, after, 1)
    return source.copy(), MixingOutcome(False, before, before, 1)


@dataclass(frozen=True)
class FillTraceRow:
    generation: int
    ffe_used: int
    fill_summary: float
    best_fitness: float


@dataclass
class OptimizerResult:
    best: np.ndarray
    best_fitness: float
    fill_trace: list = field(default_factory=list)
    ffe_to_optimum: int | None = None
    ffe_used: int = 0

    @property
    def terminal_fill(self) -> float:
        return self.fill_trace[-1].fill_summary


class _Stop(Exception):
    pass


def run_lt_gomea_lite(problem: ConcatenatedProblem, pop_size: int, budget_ffe: int, seed,
                      initial=None, linkage: str = "average", max_generations: int = 10_000) -> OptimizerResult:
    """Fixed-size population of FIHC optima improved generation by generation with
    linkage-tree optimal mixing.

    Every generation rebuilds the DSM and tree from the current population,
    records its Fill, then gives each individual one optimal-mixing pass over
    all non-root masks in random order, each with a random donor. Stops when a
    global optimum appears, the evaluation budget is spent, the population has
    collapsed to one genotype, or ``max_generations`` is reached.
    """
    if pop_size < 2 or budget_ffe < 1:
        raise ParameterError("need pop_size >= 2 and budget_ffe >= 1")
    seed = seed if isinstance(seed, RngSeed) else RngSeed(int(seed))
    if initial is None:
        init = sample_optimized_population(problem, pop_size, seed)
        pop = np.array(init.members, dtype=np.uint8)
        ffe = int(init.evaluations)
    else:
        pop = np.array(initial, dtype=np.uint8)
        if pop.ndim != 2 or pop.shape[1] != problem.n or pop.shape[0] < 2:
            raise DimensionError(f"initial population must have shape (>= 2, {problem.n})")
        ffe = pop.shape[0]
    rng = seed.generator(2**31)
    size = pop.shape[0]
    k, g = problem.k, problem.table
    units = problem.block_unitations(pop).astype(np.int64)
    fitness = g[units].sum(axis=1)
    optimum = problem.optimum_value
    blocks = problem.block_labels()

    result = OptimizerResult(best=pop[int(np.argmax(fitness))].copy(), best_fitness=float(fitness.max()))
    if fitness.max() == optimum:
        result.ffe_to_optimum = min(ffe, budget_ffe)

    def record(gen):
        dsm = build_dsm(pop, blocks)
        result.fill_trace.append(FillTraceRow(gen, ffe, fill_summary(dsm), float(fitness.max())))
        return dsm

    generation = 0
    dsm = record(generation)
    try:
        while (result.ffe_to_optimum is None and ffe < budget_ffe and generation < max_generations
               and not (pop == pop[0]).all()):
            masks = build_linkage_tree(dsm, linkage).mixing_masks()
            mask_blocks = [m // k for m in masks]
            for i in range(size):
                for m_idx in rng.permutation(len(masks)):
                    mask, mblk = masks[m_idx], mask_blocks[m_idx]
                    j = int(rng.integers(size - 1))
                    j += j >= i
                    delta = pop[j, mask].astype(np.int64) - pop[i, mask]
                    if not delta.any():
                        continue
                    if ffe >= budget_ffe:
                        raise _Stop
                    ffe += 1
                    new_u = units[i].copy()
                    np.add.at(new_u, mblk, delta)
                    new_fit = g[new_u].sum()
                    if new_fit >= fitness[i]:
                        pop[i, mask] = pop[j, mask]
                        units[i] = new_u
                        fitness[i] = new_fit
                        if new_fit > result.best_fitness:
                            result.best_fitness = float(new_fit)
                            result.best = pop[i].copy()
                        if new_fit == optimum and result.ffe_to_optimum is None:
                            result.ffe_to_optimum = ffe
                            raise _Stop
            generation += 1
            dsm = record(generation)
    except _Stop:
        generation += 1
        record(generation)
    result.ffe_used = ffe
    return result


def fill_trace_csv(trace) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["generation", "ffe_used", "fill_summary", "best_fitness"])
    for row in trace:
        writer.writerow([row.generation, row.ffe_used, repr(row.fill_summary), repr(row.best_fitness)])
    return out.getvalue()
