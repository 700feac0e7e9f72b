"""Reference computations written independently of the package internals."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial


def fihc_pair_counts(values) -> dict:
    """Exact weighted count of final (bit0, bit1) of two fixed genes of one block.

    Sums over all 2^k inputs and all k! gene orders of a single FIHC sweep,
    tracking only the two watched genes explicitly and the others by count.
    The total weight is 2^k k!. Asserts that every sweep ends in a local optimum.
    """
    g = tuple(values)
    k = len(g) - 1

    def improves(u, bit):
        nu = u - 1 if bit else u + 1
        return g[nu] > g[u]

    @lru_cache(maxsize=None)
    def walk(u, b0, b1, v0, v1, zeros, ones):
        if v0 and v1 and zeros == 0 and ones == 0:
            assert (u == 0 or g[u - 1] < g[u]) and (u == k or g[u + 1] < g[u]), "sweep ended off a local optimum"
            out = [0, 0, 0, 0]
            out[2 * b0 + b1] = 1
            return tuple(out)
        total = [0, 0, 0, 0]

        def add(weight, res):
            for idx in range(4):
                total[idx] += weight * res[idx]

        if not v0:
            flip = improves(u, b0)
            nu = u + (1 - 2 * b0) if flip else u
            add(1, walk(nu, b0 ^ flip, b1, 1, v1, zeros, ones))
        if not v1:
            flip = improves(u, b1)
            nu = u + (1 - 2 * b1) if flip else u
            add(1, walk(nu, b0, b1 ^ flip, v0, 1, zeros, ones))
        if zeros:
            nu = u + 1 if improves(u, 0) else u
            add(zeros, walk(nu, b0, b1, v0, v1, zeros - 1, ones))
        if ones:
            nu = u - 1 if improves(u, 1) else u
            add(ones, walk(nu, b0, b1, v0, v1, zeros, ones - 1))
        return tuple(total)

    counts = [0, 0, 0, 0]
    for b0, b1 in itertools.product((0, 1), repeat=2):
        for others_one in range(k - 1):
            weight = comb(k - 2, others_one)
            u = b0 + b1 + others_one
            res = walk(u, b0, b1, 0, 0, k - 2 - others_one, others_one)
            for idx in range(4):
                counts[idx] += weight * res[idx]
    assert sum(counts) == 2**k * factorial(k)
    return {"00": counts[0], "01": counts[1], "10": counts[2], "11": counts[3]}


def fihc_pair_distribution(values) -> tuple:
    counts = fihc_pair_counts(values)
    total = sum(counts.values())
    return tuple(Fraction(counts[key], total) for key in ("00", "01", "10", "11"))


def literal_pair_distribution(values) -> tuple:
    """Brute force over every input and every gene order, repeating sweeps until stable."""
    g = tuple(values)
    k = len(g) - 1
    counts = [0, 0, 0, 0]
    for x in itertools.product((0, 1), repeat=k):
        for order in itertools.permutations(range(k)):
            bits = list(x)
            changed = True
            while changed:
                changed = False
                for gene in order:
                    trial = bits.copy()
                    trial[gene] ^= 1
                    if g[sum(trial)] > g[sum(bits)]:
                        bits = trial
                        changed = True
            counts[2 * bits[0] + bits[1]] += 1
    total = sum(counts)
    return tuple(Fraction(c, total) for c in counts)


def values_from_steps(steps) -> tuple:
    """Value table whose consecutive differences have the given signs (+1 / -1)."""
    out = [0]
    for s in steps:
        out.append(out[-1] + s)
    return tuple(out)


def plain_entropy(probs) -> float:
    return -sum(p * math.log(p) for p in probs if p > 0)


def dsm_by_definition(rows) -> list:
    """Distance matrix from Definition-style sums: I = sum p_ab log(p_ab / (p_a p_b))."""
    s, n = len(rows), len(rows[0])
    d = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            joint = {}
            for row in rows:
                joint[(row[i], row[j])] = joint.get((row[i], row[j]), 0) + 1
            pa = {a: sum(c for (x, _), c in joint.items() if x == a) / s for a in (0, 1)}
            pb = {b: sum(c for (_, y), c in joint.items() if y == b) / s for b in (0, 1)}
            h = -sum(c / s * math.log(c / s) for c in joint.values())
            mi = sum(c / s * math.log((c / s) / (pa[a] * pb[b])) for (a, b), c in joint.items())
            d[i][j] = 0.0 if h == 0 else 1.0 - mi / h
    return d
