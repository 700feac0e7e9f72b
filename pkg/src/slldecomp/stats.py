"""Empirical gene statistics, the dependency structure matrix, and linkage quality.

All entropies use the natural logarithm with 0 log 0 = 0.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .errors import InsufficientSampleError, ParameterError

__all__ = [
    "MarginalDistribution",
    "PairDistribution",
    "Dsm",
    "marginal",
    "pair",
    "entropy",
    "joint_entropy",
    "mutual_information",
    "distance",
    "pair_index",
    "distances_from_counts",
    "build_dsm",
    "is_perfect_decomposition",
    "perfect_from_pair_distances",
    "fill",
    "fill_row",
    "fill_summary",
    "fill_report_csv",
    "dsm_csv",
]


@dataclass(frozen=True)
class MarginalDistribution:
    """Frequencies of 0 and 1 at one gene; ``p1`` defaults to ``1 - p0``.

    Passing both keeps tiny masses that ``1 - p0`` would round away.
    """

    p0: float
    p1: float | None = None

    def __post_init__(self):
        if self.p1 is None:
            object.__setattr__(self, "p1", 1.0 - self.p0)
        if not (0.0 <= self.p0 <= 1.0 and 0.0 <= self.p1 <= 1.0) or abs(self.p0 + self.p1 - 1.0) > 1e-12:
            raise ParameterError(f"not a distribution on {{0,1}}: ({self.p0}, {self.p1})")

    @property
    def probs(self) -> tuple:
        return (self.p0, self.p1)


@dataclass(frozen=True)
class PairDistribution:
    """Probabilities of 00, 01, 10, 11 on an ordered gene pair."""

    p: tuple

    def __post_init__(self):
        p = tuple(float(v) for v in self.p)
        if len(p) != 4 or min(p) < 0 or abs(sum(p) - 1.0) > 1e-12:
            raise ParameterError(f"not a distribution on {{00,01,10,11}}: {p}")
        object.__setattr__(self, "p", p)

    @property
    def first(self) -> MarginalDistribution:
        return MarginalDistribution(self.p[0] + self.p[1], self.p[2] + self.p[3])

    @property
    def second(self) -> MarginalDistribution:
        return MarginalDistribution(self.p[0] + self.p[2], self.p[1] + self.p[3])


def _bits(pop) -> np.ndarray:
    members = getattr(pop, "members", pop)
    return np.asarray(members, dtype=np.uint8)


def _check_index(n: int, *idx: int) -> None:
    for i in idx:
        if not 0 <= i < n:
            raise IndexError(f"gene index {i} out of range for n={n}")


def marginal(pop, i: int) -> MarginalDistribution:
    x = _bits(pop)
    _check_index(x.shape[1], i)
    zeros = np.count_nonzero(x[:, i] == 0)
    return MarginalDistribution(zeros / x.shape[0], (x.shape[0] - zeros) / x.shape[0])


def pair(pop, i: int, j: int) -> PairDistribution:
    x = _bits(pop)
    _check_index(x.shape[1], i, j)
    if i == j:
        raise ParameterError("pair statistics need two distinct genes")
    code = 2 * x[:, i].astype(np.int64) + x[:, j]
    counts = np.bincount(code, minlength=4)
    return PairDistribution(tuple(counts / x.shape[0]))


def entropy(dist) -> float:
    probs = np.asarray(getattr(dist, "probs", getattr(dist, "p", dist)), dtype=float)
    return float(-xlogy(probs, probs).sum())


def joint_entropy(pd: PairDistribution) -> float:
    return entropy(pd.p)


def mutual_information(pd: PairDistribution, m_i=None, m_j=None) -> float:
    """I = H(P_i) + H(P_j) - H(P_ij)."""
    m_i = pd.first if m_i is None else m_i
    m_j = pd.second if m_j is None else m_j
    return entropy(m_i) + entropy(m_j) - joint_entropy(pd)


def distance(pd: PairDistribution, m_i=None, m_j=None) -> float:
    """D = 1 - I / H(joint); a pair with zero joint entropy is at distance 0."""
    h = joint_entropy(pd)
    if h == 0.0:
        return 0.0
    return 1.0 - mutual_information(pd, m_i, m_j) / h


# --- vectorized core ---------------------------------------------------------


def pair_index(n: int):
    """Upper-triangle gene index arrays ``(iu, ju)`` with ``iu < ju``."""
    return np.triu_indices(n, k=1)


def distances_from_counts(s, ones, c11, iu, ju) -> np.ndarray:
    """Distances for the pairs ``(iu[p], ju[p])`` from sufficient counts.

    ``s`` is the population size, ``ones`` the per-gene count of ones and
    ``c11`` the per-pair count of 11. Leading batch dimensions broadcast, so a
    whole sequence of growing populations is evaluated in one call.
    """
    s = np.asarray(s, dtype=float)[..., None]
    ones = np.asarray(ones, dtype=float)
    c11 = np.asarray(c11, dtype=float)
    a, b = ones[..., iu], ones[..., ju]
    c10 = a - c11
    c01 = b - c11
    c00 = s - a - b + c11
    # summation order is symmetric in the two genes so d(i, j) and d(j, i) agree bit for bit
    terms = [xlogy(c / s, c / s) for c in (c00, c01, c10, c11)]
    h_joint = -((terms[0] + terms[3]) + (terms[1] + terms[2]))
    pa, pb = a / s, b / s
    h_a = -(xlogy(pa, pa) + xlogy(1 - pa, 1 - pa))
    h_b = -(xlogy(pb, pb) + xlogy(1 - pb, 1 - pb))
    mi = h_a + h_b - h_joint
    with np.errstate(invalid="ignore", divide="ignore"):
        d = 1.0 - mi / h_joint
    return np.where(h_joint == 0.0, 0.0, d)


@dataclass(frozen=True)
class Dsm:
    """Symmetric matrix of pairwise gene distances.

    ``blocks`` holds the ground-truth block label of every gene; it is only
    used for scoring, never for building the matrix.
    """

    d: np.ndarray
    blocks: np.ndarray | None = None

    def __post_init__(self):
        d = np.array(self.d, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ParameterError("a DSM must be a square matrix")
        d.setflags(write=False)
        object.__setattr__(self, "d", d)
        if self.blocks is not None:
            blocks = np.asarray(self.blocks).reshape(-1)
            if blocks.size != d.shape[0]:
                raise ParameterError("one block label per gene is required")
            object.__setattr__(self, "blocks", blocks)

    @property
    def n(self) -> int:
        return self.d.shape[0]

    def _labels(self) -> np.ndarray:
        if self.blocks is None:
            raise ParameterError("this DSM carries no ground-truth block structure")
        return self.blocks

    def dependent_mask(self) -> np.ndarray:
        labels = self._labels()
        same = labels[:, None] == labels[None, :]
        np.fill_diagonal(same, False)
        return same

    def permuted(self, perm) -> "Dsm":
        """The DSM of the population whose gene ``a`` is this population's gene ``perm[a]``."""
        perm = np.asarray(perm)
        blocks = None if self.blocks is None else self.blocks[perm]
        return Dsm(self.d[np.ix_(perm, perm)], blocks)


def build_dsm(pop, blocks=None) -> Dsm:
    """DSM of a population (a :class:`Population` or an ``(s, n)`` 0/1 array)."""
    x = _bits(pop)
    if blocks is None and hasattr(pop, "problem"):
        blocks = pop.problem.block_labels()
    s, n = x.shape
    if s < 2:
        raise InsufficientSampleError(f"a DSM needs at least 2 individuals, got {s}")
    xf = x.astype(np.int64)
    ones = xf.sum(axis=0)
    c11 = xf.T @ xf
    iu, ju = pair_index(n)
    d = np.zeros((n, n))
    d[iu, ju] = distances_from_counts(s, ones, c11[iu, ju], iu, ju)
    d[ju, iu] = d[iu, ju]
    return Dsm(d, blocks)


def perfect_from_pair_distances(d_pairs: np.ndarray, dependent: np.ndarray) -> np.ndarray:
    """Row-wise perfect-decomposition test on flattened pair distances.

    ``dependent`` marks which pairs share a block. Each row is a population;
    a row passes when its largest dependent distance is strictly below its
    smallest independent distance.
    """
    d_pairs = np.atleast_2d(d_pairs)
    if not dependent.any() or dependent.all():
        return np.ones(d_pairs.shape[0], dtype=bool)
    worst_dep = d_pairs[:, dependent].max(axis=1)
    best_indep = d_pairs[:, ~dependent].min(axis=1)
    return worst_dep < best_indep


def is_perfect_decomposition(dsm: Dsm) -> bool:
    """Every dependent-pair entry is strictly smaller than every independent-pair entry."""
    dep = dsm.dependent_mask()
    iu, ju = pair_index(dsm.n)
    return bool(perfect_from_pair_distances(dsm.d[iu, ju], dep[iu, ju])[0])


def fill_row(dsm: Dsm, i: int):
    """Fill of gene ``i`` and the number of genes tied at the cutoff distance.

    Genes tied with the last admitted neighbour are resolved in favour of true
    block mates.
    """
    labels = dsm._labels()
    _check_index(dsm.n, i)
    others = np.array([j for j in range(dsm.n) if j != i], dtype=int)
    mates = labels[others] == labels[i]
    size = int(mates.sum())
    if size == 0:
        return 1.0, 0
    row = dsm.d[i, others]
    cutoff = np.sort(row)[size - 1]
    below = row < cutoff
    tied = row == cutoff
    slots = size - int(below.sum())
    hits = int((below & mates).sum()) + min(int((tied & mates).sum()), slots)
    return hits / size, int(tied.sum())


def fill(dsm: Dsm, i: int) -> float:
    return fill_row(dsm, i)[0]


def fill_summary(dsm: Dsm) -> float:
    return float(np.mean([fill_row(dsm, i)[0] for i in range(dsm.n)]))


def fill_report_csv(dsm: Dsm) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["gene", "fill", "ties"])
    for i in range(dsm.n):
        value, ties = fill_row(dsm, i)
        writer.writerow([i, repr(value), ties])
    return out.getvalue()


def dsm_csv(dsm: Dsm) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([""] + list(range(dsm.n)))
    for i, row in enumerate(dsm.d):
        writer.writerow([i] + [repr(float(v)) for v in row])
    return out.getvalue()

