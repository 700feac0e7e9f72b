"""Unitation functions, their concatenations, and monotonicity profiles."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DimensionError, ParameterError, PlateauError, ProfileError

__all__ = [
    "UnitationFunction",
    "SymmetricUnitationFunction",
    "ConcatenatedProblem",
    "MonotonicityProfile",
    "unitation",
    "evaluate",
    "builtin",
    "resolve_function",
    "extract_profile",
    "load_function",
    "BUILTIN_FAMILIES",
]


def unitation(x: Sequence[int]) -> int:
    """Number of ones in ``x``."""
    return int(np.count_nonzero(np.asarray(x)))


@dataclass(frozen=True)
class UnitationFunction:
    """A function g: {0..k} -> R stored as a dense table, ``values[u] = g(u)``."""

    k: int
    values: tuple
    name: str = "g"

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ParameterError(f"block order k must be a positive integer, got {self.k!r}")
        values = tuple(self.values)
        if len(values) != self.k + 1:
            raise ParameterError(f"expected {self.k + 1} values for k={self.k}, got {len(values)}")
        object.__setattr__(self, "values", values)

    def __call__(self, u: int):
        return self.values[u]

    def mirror(self) -> "UnitationFunction":
        return UnitationFunction(self.k, self.values[::-1], f"mirror({self.name})")

    def is_symmetric(self) -> bool:
        return all(self.values[i] == self.values[self.k - i] for i in range(self.k + 1))

    def to_dict(self) -> dict:
        return {"k": self.k, "name": self.name, "values": list(self.values)}

    @classmethod
    def from_dict(cls, record: dict) -> "UnitationFunction":
        unknown = set(record) - {"k", "name", "values"}
        if unknown:
            raise ParameterError(f"unknown fields in function record: {sorted(unknown)}")
        try:
            return cls(int(record["k"]), tuple(record["values"]), str(record.get("name", "g")))
        except KeyError as exc:
            raise ParameterError(f"function record is missing {exc}") from None

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n")


class SymmetricUnitationFunction(UnitationFunction):
    """A unitation function with g(i) = g(k - i), checked at construction."""

    def __post_init__(self):
        super().__post_init__()
        if not self.is_symmetric():
            raise ParameterError(f"{self.name} is not symmetric: g(i) != g(k-i) for some i")


def load_function(path) -> UnitationFunction:
    return UnitationFunction.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class ConcatenatedProblem:
    """f(x) = sum over r disjoint k-gene blocks of g(u(block))."""

    g: UnitationFunction
    r: int
    _table: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 1:
            raise ParameterError(f"number of blocks r must be a positive integer, got {self.r!r}")
        table = np.asarray(self.g.values, dtype=float)
        table.setflags(write=False)
        object.__setattr__(self, "_table", table)

    @property
    def k(self) -> int:
        return self.g.k

    @property
    def n(self) -> int:
        return self.r * self.g.k

    @property
    def table(self) -> np.ndarray:
        """Read-only float array of g values indexed by unitation."""
        return self._table

    @property
    def optimum_value(self) -> float:
        return self.r * float(self._table.max())

    def block_of(self, gene: int) -> int:
        return gene // self.k

    def block_labels(self) -> np.ndarray:
        return np.repeat(np.arange(self.r), self.k)

    def block_unitations(self, x) -> np.ndarray:
        x = np.asarray(x)
        if x.shape[-1] != self.n:
            raise DimensionError(f"expected length {self.n}, got {x.shape[-1]}")
        return x.reshape(*x.shape[:-1], self.r, self.k).sum(axis=-1)

    def evaluate(self, x) -> float:
        return float(self._table[self.block_unitations(x)].sum())

    def evaluate_many(self, pop) -> np.ndarray:
        return self._table[self.block_unitations(pop)].sum(axis=-1)

    def is_optimal(self, x) -> bool:
        return self.evaluate(x) == self.optimum_value

    @property
    def label(self) -> str:
        return f"{self.g.name}x{self.r}"


def evaluate(problem: ConcatenatedProblem, x) -> float:
    return problem.evaluate(x)


# --- built-in families -------------------------------------------------------


def _trap(k: int) -> list:
    return [k - u - 1 for u in range(k)] + [k]


def _half(k: int, family: str) -> int:
    if k < 2 or k % 2:
        raise ParameterError(f"{family} needs an even order k >= 2, got {k}")
    return k // 2


def _bimodal(k: int) -> list:
    l = _half(k, "bimodal")
    return [l if u in (0, k) else l - abs(u - l) - 1 for u in range(k + 1)]


def _reverted(k: int) -> list:
    l = _half(k, "reverted bimodal")
    return [k if u == l else abs(l - u) for u in range(k + 1)]


_NOISE_10 = {5: -2, 0: -1, 3: -1, 7: -1, 10: -1, 1: 0, 4: 0, 6: 0, 9: 0, 2: 1, 8: 1}


def _noised_bimodal(k: int) -> list:
    if k != 10:
        raise ParameterError(f"the noised bimodal function is defined for k=10 only, got {k}")
    return [b + _NOISE_10[u] for u, b in enumerate(_bimodal(10))]


def _ridge2(k: int) -> list:
    _half(k, "ridge-k2")
    return [2 if u == k else (0 if u % 2 else 1) for u in range(k + 1)]


def _ridge4(k: int) -> list:
    _half(k, "ridge-k4")

    def value(u):
        if u == k:
            return 3
        if u % 2:
            return 1
        return 2 if u % 4 == 0 else 0

    return [value(u) for u in range(k + 1)]


BUILTIN_FAMILIES = {
    "trap": _trap,
    "bimodal": _bimodal,
    "reverted": _reverted,
    "noised_bimodal": _noised_bimodal,
    "ridge2": _ridge2,
    "ridge4": _ridge4,
}
_ALIASES = {"reverted_bimodal": "reverted", "rev_bimodal": "reverted", "noised": "noised_bimodal"}


def builtin(name: str, k: int) -> UnitationFunction:
    """Value table of a built-in family at order ``k``."""
    family = _ALIASES.get(name, name)
    if family not in BUILTIN_FAMILIES:
        raise ParameterError(f"unknown function family {name!r}; known: {sorted(BUILTIN_FAMILIES)}")
    if int(k) != k or k < 1:
        raise ParameterError(f"k must be a positive integer, got {k!r}")
    k = int(k)
    values = BUILTIN_FAMILIES[family](k)
    label = f"ridge-{k}_{family[-1]}" if family.startswith("ridge") else f"{family}-{k}"
    return UnitationFunction(k, tuple(values), label)


_COMPACT = re.compile(r"^(trap|bimodal|reverted|ridge)-?(\d+)(?:_([24]))?$")


def resolve_function(text: str, k: int | None = None) -> UnitationFunction:
    """Resolve a family name (with ``k``), a compact name like ``bimodal6`` or
    ``ridge12_4``, or a path to a JSON function record."""
    text = text.strip()
    path = Path(text)
    if text.endswith(".json") or path.is_file():
        if not path.is_file():
            raise ParameterError(f"function file not found: {text}")
        return load_function(path)
    family = _ALIASES.get(text, text)
    if family in BUILTIN_FAMILIES:
        if family == "noised_bimodal" and k is None:
            k = 10
        if k is None:
            raise ParameterError(f"family {text!r} needs an order k")
        return builtin(family, k)
    m = _COMPACT.match(text)
    if m:
        family, order, variant = m.group(1), int(m.group(2)), m.group(3)
        if family == "ridge":
            if variant is None:
                raise ParameterError("ridge functions are written ridge<k>_2 or ridge<k>_4")
            family = f"ridge{variant}"
        elif variant is not None:
            raise ParameterError(f"unexpected suffix in {text!r}")
        if k is not None and k != order:
            raise ParameterError(f"conflicting orders: {text!r} and k={k}")
        return builtin(family, order)
    raise ParameterError(f"cannot resolve function {text!r}")


# --- monotonicity profiles ---------------------------------------------------


@dataclass(frozen=True)
class MonotonicityProfile:
    """Interior local maxima ``(k_1..k_N)`` and local minima ``(l_0..l_N)`` of g.

    A maximum at 0 (``minima[0] > 0``) or at k (``minima[-1] < k``) is implied
    rather than stored.
    """

    k: int
    maxima: tuple
    minima: tuple

    def __post_init__(self):
        maxima, minima = tuple(int(v) for v in self.maxima), tuple(int(v) for v in self.minima)
        object.__setattr__(self, "maxima", maxima)
        object.__setattr__(self, "minima", minima)
        k = self.k
        if k < 1:
            raise ProfileError(f"k must be positive, got {k}")
        if len(minima) != len(maxima) + 1:
            raise ProfileError(f"need exactly one more minimum than interior maxima: {self}")
        if any(not 0 <= v <= k for v in minima) or any(not 1 <= v <= k - 1 for v in maxima):
            raise ProfileError(f"profile entries out of range for k={k}: {self}")
        for i, top in enumerate(maxima):
            if not minima[i] < top < minima[i + 1]:
                raise ProfileError(f"minima and maxima do not interleave: {self}")

    @property
    def N(self) -> int:
        return len(self.maxima)

    @property
    def max_at_zero(self) -> bool:
        return self.minima[0] > 0

    @property
    def max_at_k(self) -> bool:
        return self.minima[-1] < self.k

    def attractors(self) -> tuple:
        """All local maxima including the boundary ones, ascending."""
        return ((0,) if self.max_at_zero else ()) + self.maxima + ((self.k,) if self.max_at_k else ())

    def mirror(self) -> "MonotonicityProfile":
        k = self.k
        return MonotonicityProfile(k, tuple(k - v for v in reversed(self.maxima)),
                                   tuple(k - v for v in reversed(self.minima)))

    def to_function(self, name: str | None = None) -> UnitationFunction:
        """A zig-zag value table with exactly this monotonicity."""
        values, level = [], 0
        kind = {v: "min" for v in self.minima}
        kind.update({v: "max" for v in self.maxima})
        going_up = not self.max_at_zero
        for u in range(self.k + 1):
            values.append(level)
            if kind.get(u) == "min":
                going_up = True
            elif kind.get(u) == "max":
                going_up = False
            level += 1 if going_up else -1
        return UnitationFunction(self.k, tuple(values), name or f"profile({self.label})")

    @property
    def label(self) -> str:
        return f"k={self.k} MAX=({','.join(map(str, self.maxima))}) MIN=({','.join(map(str, self.minima))})"

    def to_dict(self) -> dict:
        return {"k": self.k, "max": list(self.maxima), "min": list(self.minima)}

    @classmethod
    def from_dict(cls, record: dict) -> "MonotonicityProfile":
        return cls(int(record["k"]), tuple(record["max"]), tuple(record["min"]))


def extract_profile(g: UnitationFunction) -> MonotonicityProfile:
    """Read the local maxima/minima off a value table with sharp steps."""
    v, k = g.values, g.k
    for u in range(k):
        if v[u] == v[u + 1]:
            raise PlateauError(f"{g.name}: g({u}) == g({u + 1}) == {v[u]!r}")
    maxima, minima = [], []
    for u in range(k + 1):
        below_left = u == 0 or v[u - 1] > v[u]
        below_right = u == k or v[u + 1] > v[u]
        if below_left and below_right:
            minima.append(u)
        elif 0 < u < k and v[u - 1] < v[u] > v[u + 1]:
            maxima.append(u)
    return MonotonicityProfile(k, tuple(maxima), tuple(minima))
