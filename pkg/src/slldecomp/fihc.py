"""First Improvement Hill Climber and populations of locally optimal individuals.

Randomness is addressed by individual index: individual ``i`` of stream
``(seed, stream)`` draws its initial bits and its gene order from the
generator of block ``i // BLOCK_SIZE``. Any way of splitting the index range
(serial, threaded, grown one at a time) produces the same individuals.
"""

from __future__ import annotations

from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionError, ParameterError
from .functions import ConcatenatedProblem

__all__ = [
    "RngSeed",
    "fihc_optimize",
    "fihc_batch",
    "IndividualSource",
    "Population",
    "sample_optimized_population",
    "extend_population",
    "write_population",
    "read_population",
    "BLOCK_SIZE",
]

BLOCK_SIZE = 4096


@dataclass(frozen=True)
class RngSeed:
    """Master seed plus stream index; together they fix every sampled bit and order."""

    seed: int
    stream: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.stream < 0:
            raise ParameterError(f"stream index must be nonnegative, got {self.stream}")

    def generator(self, *key: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(self.stream, *key)))


def _as_bits(problem: ConcatenatedProblem, x) -> np.ndarray:
    bits = np.array(x, dtype=np.uint8).reshape(-1)
    if bits.size != problem.n:
        raise DimensionError(f"expected {problem.n} genes, got {bits.size}")
    return bits


def fihc_optimize(problem: ConcatenatedProblem, x, rng=None, order=None, return_evals=False):
    """Climb ``x`` to a local optimum by single-bit flips.

    One gene order (``order`` or a uniform permutation drawn from ``rng``) is
    used for every sweep. A flip is kept only if it strictly raises fitness.
    Sweeps repeat until one makes no change. With ``return_evals`` the number
    of fitness evaluations (initial one plus one per tried flip) is returned too.
    """
    bits = _as_bits(problem, x).copy()
    n, k = problem.n, problem.k
    if order is None:
        rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        order = rng.permutation(n)
    order = [int(v) for v in order]
    if sorted(order) != list(range(n)):
        raise ParameterError("gene order must be a permutation of range(n)")
    g = problem.table
    units = [int(v) for v in problem.block_unitations(bits)]
    evals = 1
    modified = True
    while modified:
        modified = False
        for gene in order:
            b = gene // k
            u = units[b]
            nu = u - 1 if bits[gene] else u + 1
            evals += 1
            if g[nu] > g[u]:
                bits[gene] ^= 1
                units[b] = nu
                modified = True
    return (bits, evals) if return_evals else bits


def fihc_batch(problem: ConcatenatedProblem, bits: np.ndarray, orders: np.ndarray):
    """Row-wise :func:`fihc_optimize` on a 2-D array; returns ``(bits, evals)``.

    Row ``i`` is climbed with gene order ``orders[i]``; results are identical
    to calling the scalar climber row by row.
    """
    bits = np.array(bits, dtype=np.uint8, copy=True)
    orders = np.asarray(orders)
    count, n = bits.shape
    if n != problem.n or orders.shape != bits.shape:
        raise DimensionError(f"expected arrays of shape (*, {problem.n}) with matching orders")
    k, g = problem.k, problem.table
    units = problem.block_unitations(bits).astype(np.int64)
    evals = np.ones(count, dtype=np.int64)
    active = np.arange(count)
    while active.size:
        modified = np.zeros(active.size, dtype=bool)
        for t in range(n):
            gene = orders[active, t]
            blk = gene // k
            cur = bits[active, gene]
            u = units[active, blk]
            nu = u + 1 - 2 * cur.astype(np.int64)
            better = g[nu] > g[u]
            if better.any():
                rows = active[better]
                bits[rows, gene[better]] ^= 1
                units[rows, blk[better]] = nu[better]
                modified |= better
        evals[active] += n
        active = active[modified]
    return bits, evals


class IndividualSource:
    """Lazily produces FIHC-optimized individuals of one RNG stream by index."""

    def __init__(self, problem: ConcatenatedProblem, seed: RngSeed, cache_blocks: int = 4):
        self.problem = problem
        self.seed = seed
        self._cache: OrderedDict = OrderedDict()
        self._cache_blocks = cache_blocks

    def _block(self, b: int):
        hit = self._cache.get(b)
        if hit is not None:
            self._cache.move_to_end(b)
            return hit
        hit = self.compute_block(b)
        self._cache[b] = hit
        if len(self._cache) > self._cache_blocks:
            self._cache.popitem(last=False)
        return hit

    def compute_block(self, b: int):
        n = self.problem.n
        rng = self.seed.generator(b)
        start = rng.integers(0, 2, size=(BLOCK_SIZE, n), dtype=np.uint8)
        orders = rng.permuted(np.tile(np.arange(n), (BLOCK_SIZE, 1)), axis=1)
        return fihc_batch(self.problem, start, orders)

    def get(self, start: int, stop: int, workers: int = 1):
        """Optimized individuals ``start..stop-1`` and their evaluation counts."""
        if not 0 <= start <= stop:
            raise ParameterError(f"bad index range [{start}, {stop})")
        if start == stop:
            return np.zeros((0, self.problem.n), np.uint8), np.zeros(0, np.int64)
        blocks = range(start // BLOCK_SIZE, (stop - 1) // BLOCK_SIZE + 1)
        missing = [b for b in blocks if b not in self._cache]
        if workers > 1 and len(missing) > 1:
            with ThreadPoolExecutor(workers) as pool:
                for b, res in zip(missing, pool.map(self.compute_block, missing)):
                    self._cache[b] = res
            while len(self._cache) > max(self._cache_blocks, len(blocks)):
                self._cache.popitem(last=False)
        parts_bits, parts_evals = [], []
        for b in blocks:
            bits, evals = self._block(b)
            lo = max(start - b * BLOCK_SIZE, 0)
            hi = min(stop - b * BLOCK_SIZE, BLOCK_SIZE)
            parts_bits.append(bits[lo:hi])
            parts_evals.append(evals[lo:hi])
        return np.concatenate(parts_bits), np.concatenate(parts_evals)


@dataclass(frozen=True)
class Population:
    """FIHC-optimized individuals plus the RNG provenance that produced them."""

    members: np.ndarray
    seed: RngSeed
    problem: ConcatenatedProblem
    evaluations: int = 0
    _source: IndividualSource = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        members = np.asarray(self.members, dtype=np.uint8)
        if members.ndim != 2 or members.shape[0] < 1 or members.shape[1] != self.problem.n:
            raise DimensionError(f"members must have shape (s >= 1, {self.problem.n})")
        members.setflags(write=False)
        object.__setattr__(self, "members", members)

    @property
    def s(self) -> int:
        return self.members.shape[0]

    @property
    def n(self) -> int:
        return self.members.shape[1]

    def __len__(self):
        return self.s


def sample_optimized_population(problem: ConcatenatedProblem, s: int, seed, workers: int = 1) -> Population:
    """``s`` uniform random individuals, each climbed with its own random gene order."""
    if s < 1:
        raise ParameterError(f"population size must be >= 1, got {s}")
    seed = seed if isinstance(seed, RngSeed) else RngSeed(int(seed))
    source = IndividualSource(problem, seed)
    bits, evals = source.get(0, s, workers=workers)
    return Population(bits, seed, problem, int(evals.sum()), source)


def extend_population(pop: Population, extra_count: int, workers: int = 1) -> Population:
    """Append ``extra_count`` new optimized individuals; existing members are kept as they are."""
    if extra_count < 1:
        raise ParameterError(f"extra_count must be >= 1, got {extra_count}")
    source = pop._source or IndividualSource(pop.problem, pop.seed)
    bits, evals = source.get(pop.s, pop.s + extra_count, workers=workers)
    return Population(np.vstack([pop.members, bits]), pop.seed, pop.problem,
                      pop.evaluations + int(evals.sum()), source)


def write_population(path, pop: Population) -> None:
    lines = [f"# n={pop.n} s={pop.s} seed={pop.seed.seed} stream={pop.seed.stream}"]
    lines += ["".join("1" if b else "0" for b in row) for row in pop.members]
    Path(path).write_text("\n".join(lines) + "\n")


def read_population(path):
    """Parse a population dump; returns ``(bits, header)`` with header values as ints."""
    header, rows = {}, []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for item in line[1:].split():
                key, _, value = item.partition("=")
                header[key] = int(value)
            continue
        if set(line) - {"0", "1"}:
            raise ParameterError(f"population rows must be 0/1 strings, got {line[:20]!r}")
        rows.append([int(c) for c in line])
    if not rows:
        raise ParameterError(f"no individuals in {path}")
    bits = np.array(rows, dtype=np.uint8)
    if "n" in header and header["n"] != bits.shape[1]:
        raise DimensionError(f"header says n={header['n']} but rows have {bits.shape[1]} genes")
    return bits, header
