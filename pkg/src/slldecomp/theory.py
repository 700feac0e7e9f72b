"""Population sizing for perfect decomposition and exact dependent-pair distributions.

Numerical quantities (relative entropies, the q(p) and rho roots, s_min) use
floats and bisection to 2**-50. Pair distributions of FIHC-optimized blocks are
exact :class:`fractions.Fraction` values so that independence is decided by
exact equality.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from math import comb

from scipy.optimize import bisect

from .errors import ParameterError, ProfileError, UndecidableError
from .functions import MonotonicityProfile, UnitationFunction, extract_profile

__all__ = [
    "BISECTION_TOL",
    "relative_entropy",
    "symmetric_pair_entropy",
    "q_of_p",
    "solve_rho",
    "pair_budget",
    "EstimateResult",
    "s_min",
    "estimate_for_function",
    "q_tilde_bimodal",
    "q_tilde_reverted",
    "TheoreticalPairDistribution",
    "theoretical_distribution",
    "is_sll_undecidable",
    "alternating_profile",
    "enumerate_profiles",
    "scan_undecidable",
    "chernoff_diagnostics",
]

BISECTION_TOL = 2.0**-50
_LOG4 = math.log(4.0)
_QUARTER = Fraction(1, 4)
_HALF = Fraction(1, 2)


def relative_entropy(p: float, q: float) -> float:
    """Kullback-Leibler divergence of (p, 1-p) from (q, 1-q).

    Returns ``math.inf`` when q is 0 or 1 and p differs from it.
    """
    p, q = float(p), float(q)
    if not 0.0 <= p <= 1.0 or not 0.0 <= q <= 1.0:
        raise ParameterError(f"probabilities must lie in [0, 1], got p={p}, q={q}")
    total = 0.0
    if p > 0.0:
        if q == 0.0:
            return math.inf
        total += p * math.log(p / q)
    if p < 1.0:
        if q == 1.0:
            return math.inf
        total += (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    return total


def symmetric_pair_entropy(t: float) -> float:
    """Entropy of the pair distribution (t, 1/2 - t, 1/2 - t, t)."""
    t = float(t)
    h = 0.0
    for v in (t, 0.5 - t):
        if v > 0.0:
            h -= 2.0 * v * math.log(v)
    return h


def _bisect(f, lo: float, hi: float) -> float:
    return bisect(f, lo, hi, xtol=BISECTION_TOL, maxiter=200)


def _q_of_p(p: float) -> float:
    if p == 0.25:
        return 0.25
    target = symmetric_pair_entropy(p) + _LOG4
    return _bisect(lambda q: target - 2.0 * symmetric_pair_entropy(q), 0.25, p)


def q_of_p(p: float) -> float:
    """The q in (1/4, p) with H(P) - 2 H(Q) + log 4 = 0 for symmetric pair vectors P, Q."""
    p = float(p)
    if not 0.25 < p < 0.5:
        raise ParameterError(f"q(p) is defined for 1/4 < p < 1/2, got {p}")
    return _q_of_p(p)


def _as_fraction_or_float(q):
    return q if isinstance(q, Fraction) else float(q)


def _check_q_tilde(q_tilde) -> float:
    q = _as_fraction_or_float(q_tilde)
    if q <= _QUARTER:
        raise UndecidableError(
            f"q_tilde={q_tilde} gives a dependent pair indistinguishable from an independent one")
    if q > _HALF:
        raise ParameterError(f"q_tilde must not exceed 1/2, got {q_tilde}")
    return float(q)


def solve_rho(q_tilde) -> float:
    """The rho in (1/4, q_tilde) where H_{2 q_tilde}(2 rho) = H_{1/4}(q(rho)).

    For q_tilde = 1/2 the left side is infinite on the whole interval and the
    balance point degenerates to rho = 1/2.
    """
    qt = _check_q_tilde(q_tilde)
    if qt == 0.5:
        return 0.5

    def gap(rho):
        return relative_entropy(2.0 * rho, 2.0 * qt) - relative_entropy(_q_of_p(rho), 0.25)

    return _bisect(gap, 0.25, qt)


def pair_budget(k: int, r: int) -> int:
    """Number of Chernoff events bounded: r C(k,2) dependent + 8 C(r,2) k^2 independent."""
    return r * comb(k, 2) + 8 * comb(r, 2) * k * k


@dataclass(frozen=True)
class EstimateResult:
    q_tilde: float
    k: int
    r: int
    alpha: float
    rho: float
    q_of_rho: float
    exponent: float
    pair_budget: int
    s_min: int
    swapped: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def s_min(q_tilde, k: int, r: int, alpha: float = 0.1, swapped: bool = False) -> EstimateResult:
    """Population size after which the DSM is perfect except with probability ``alpha``.

    ``alpha`` is the tolerated failure probability; ``alpha=0.1`` is the
    "0.9 probability" setting.
    """
    qt = _check_q_tilde(q_tilde)
    if k < 2 or r < 1:
        raise ParameterError(f"need k >= 2 and r >= 1, got k={k}, r={r}")
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    rho = solve_rho(qt)
    q_rho = _q_of_p(rho)
    if qt == 0.5:
        exponent = relative_entropy(q_rho, 0.25)
    else:
        exponent = relative_entropy(2.0 * rho, 2.0 * qt)
    budget = pair_budget(k, r)
    size = math.ceil(math.log(budget / alpha) / exponent)
    return EstimateResult(qt, k, r, alpha, rho, q_rho, exponent, budget, max(size, 1), swapped)


def q_tilde_bimodal(l: int) -> Fraction:
    """Canonical q_tilde of the bimodal function of order 2l."""
    if l < 1:
        raise ParameterError(f"l must be >= 1, got {l}")
    p01 = Fraction(l * (2 ** (2 * l - 2) - 1), (2 * l - 1) * 2 ** (2 * l - 1))
    return max(p01, _HALF - p01)


def q_tilde_reverted(l: int) -> Fraction:
    """Canonical q_tilde of the reverted bimodal function of order 2l."""
    if l < 1:
        raise ParameterError(f"l must be >= 1, got {l}")
    p01 = Fraction(comb(2 * l - 2, l - 1), 2 ** (2 * l - 1))
    return max(p01, _HALF - p01)


@dataclass(frozen=True)
class TheoreticalPairDistribution:
    """Exact dependent-pair distribution (q1, q2, q2, q3) over 00, 01, 10, 11."""

    q1: Fraction
    q2: Fraction
    q3: Fraction

    def __post_init__(self):
        for name in ("q1", "q2", "q3"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if min(self.q1, self.q2, self.q3) < 0 or self.q1 + 2 * self.q2 + self.q3 != 1:
            raise ParameterError(f"not a distribution: {self}")

    @property
    def probs(self) -> tuple:
        return (self.q1, self.q2, self.q2, self.q3)

    @property
    def is_symmetric(self) -> bool:
        return self.q1 == self.q3

    def canonical_q_tilde(self):
        """``(q_tilde, swapped)``; ``swapped`` is True when 01 is the more likely pattern."""
        if not self.is_symmetric:
            raise ParameterError(f"q_tilde needs q1 == q3, got {self}")
        return (self.q2, True) if self.q2 > self.q1 else (self.q1, False)

    def mirror(self) -> "TheoreticalPairDistribution":
        return TheoreticalPairDistribution(self.q3, self.q2, self.q1)


def theoretical_distribution(profile: MonotonicityProfile) -> TheoreticalPairDistribution:
    """Dependent-pair distribution after FIHC with a uniformly random gene order."""
    if not isinstance(profile, MonotonicityProfile):
        raise ProfileError(f"expected a MonotonicityProfile, got {type(profile).__name__}")
    k, mins = profile.k, profile.minima
    q1 = Fraction(0)
    q2 = Fraction(0)
    if profile.N:
        num1 = num2 = 0
        for i, top in enumerate(profile.maxima, start=1):
            basin = sum(comb(k - 1, j) for j in range(mins[i - 1], mins[i]))
            num1 += (k - top) * (k - top - 1) * basin
            num2 += top * (k - top) * basin
        den = 2 ** (k - 1) * k * (k - 1)
        q1 = Fraction(num1, den)
        q2 = Fraction(num2, den)
    if mins[0] > 0:
        l0 = mins[0]
        q1 += Fraction(sum(comb(k, j) for j in range(l0)) + comb(k - 1, l0 - 1), 2**k)
    return TheoreticalPairDistribution(q1, q2, 1 - q1 - 2 * q2)


def is_sll_undecidable(d: TheoreticalPairDistribution) -> bool:
    """True when the dependent pair is stochastically independent: q1 = (q1 + q2)^2."""
    return d.q1 == (d.q1 + d.q2) ** 2


def estimate_for_function(g: UnitationFunction, r: int, alpha: float = 0.1) -> EstimateResult:
    """s_min for a concatenation of ``g``, with q_tilde from its exact pair distribution.

    Requires a profile whose pair distribution has q1 == q3.
    """
    dist = theoretical_distribution(extract_profile(g))
    q_tilde, swapped = dist.canonical_q_tilde()
    return s_min(q_tilde, g.k, r, alpha, swapped=swapped)


def alternating_profile(k: int, l0: int) -> MonotonicityProfile:
    """The profile whose extrema alternate at every step, starting with a minimum at ``l0`` in {0, 1}."""
    if l0 not in (0, 1) or k < 3:
        raise ParameterError(f"need k >= 3 and l0 in {{0, 1}}, got k={k}, l0={l0}")
    if l0 == 0:
        count = k // 2
        return MonotonicityProfile(k, tuple(2 * i - 1 for i in range(1, count + 1)),
                                   tuple(2 * i for i in range(count + 1)))
    count = (k + 1) // 2 - 1
    return MonotonicityProfile(k, tuple(2 * i for i in range(1, count + 1)),
                               tuple(2 * i + 1 for i in range(count + 1)))


def enumerate_profiles(k: int, n_max: int, n_min: int = 1):
    """All profiles of order ``k`` with ``n_min..n_max`` interior maxima,
    ordered by (N, maxima, minima)."""
    for count in range(n_min, n_max + 1):
        batch = []
        for seq in itertools.combinations(range(k + 1), 2 * count + 1):
            batch.append((seq[1::2], seq[0::2]))
        batch.sort()
        for maxima, minima in batch:
            yield MonotonicityProfile(k, maxima, minima)


def _scan_one(args):
    k, n_max, n_min = args
    hits = []
    for profile in enumerate_profiles(k, n_max, n_min):
        dist = theoretical_distribution(profile)
        if is_sll_undecidable(dist):
            hits.append((profile, dist))
    return hits


def scan_undecidable(k_range, n_max: int, n_min: int = 1, workers: int = 1):
    """Every profile with ``n_min <= N <= n_max`` whose dependent pair is independent.

    Results are ordered by k, then by (N, maxima, minima).
    """
    ks = list(k_range)
    if any(k < 3 for k in ks) or n_max < 1 or n_min < 0:
        raise ParameterError("need k >= 3, n_max >= 1 and n_min >= 0")
    jobs = [(k, n_max, n_min) for k in ks]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_scan_one, jobs))
    else:
        parts = [_scan_one(job) for job in jobs]
    return [hit for part in parts for hit in part]


def chernoff_diagnostics(q_tilde, t: float, u: float, s: float):
    """Tail bounds ``(exp(-s H_{2q}(2t)), exp(-s H_{1/4}(u)))`` for dependent and independent pairs."""
    qt = _check_q_tilde(q_tilde)
    if not 0.25 < u < t < qt:
        raise ParameterError(f"need 1/4 < u < t < q_tilde, got u={u}, t={t}, q_tilde={qt}")
    if s < 0:
        raise ParameterError(f"s must be nonnegative, got {s}")
    dep = math.exp(-s * relative_entropy(2.0 * t, 2.0 * qt))
    indep = math.exp(-s * relative_entropy(u, 0.25))
    return dep, indep
