"""Threshold recursion and heavy/light/critical classification of short paths.

``f(0, L) = 1``, ``f(1, L) = L`` and for ``l >= 2``::

    f(l, L) = 1 + f(l-1, L)^16 * (l-1)^2 * max_{1<=i<=l-1} f(i, L) f(l-i, L)

A length-``l`` path with ends ``x, y`` is heavy when more than ``f(l, L)``
distinct ``x,y``-paths of length ``l`` exist, light otherwise, and critical
when it is heavy while every proper contiguous subpath is light.

The values explode (``f(4, 3)`` already has thousands of digits, ``f(8, 3)``
hundreds of millions), so a :class:`ThresholdTable` computes exact values
lazily and answers "does this count exceed f(l)?" from a log2 lower bound
whenever the count is obviously too small.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import InputError, PreconditionError
from .graph import Graph, bfs_distances, degree_stats, is_almost_regular, is_path_in

DEFAULT_L = 3
DEFAULT_K_MAX = 8
WITNESS_CAP = 10_000

LIGHT, HEAVY, CRITICAL = "light", "heavy", "critical"


class ThresholdTable:
    """Memoized ``f(l, L)`` for ``0 <= l <= k_max``.

    ``values`` replaces the recursion with an explicit table (used to explore
    the classification machinery with small thresholds).
    """

    def __init__(self, L: int = DEFAULT_L, k_max: int = DEFAULT_K_MAX, values: Sequence[int] | None = None):
        if values is None:
            if L < 1:
                raise InputError(f"L must be >= 1, got {L}")
            if k_max < 1:
                raise InputError(f"k_max must be >= 1, got {k_max}")
            self._values: dict[int, int] = {0: 1, 1: L}
            self._custom = False
        else:
            if any(v < 0 for v in values):
                raise InputError("threshold values must be non-negative")
            self._values = dict(enumerate(values))
            k_max = len(values) - 1
            self._custom = True
        self.L = L
        self.k_max = k_max
        self._log2 = self._log2_bounds()

    @classmethod
    def from_values(cls, values: Sequence[int]) -> "ThresholdTable":
        return cls(L=values[1] if len(values) > 1 else 1, values=values)

    def _check(self, length: int) -> None:
        if length < 0:
            raise InputError(f"path length must be non-negative, got {length}")
        if length > self.k_max:
            raise InputError(f"path length {length} exceeds k_max={self.k_max}")

    def _log2_bounds(self) -> list[float]:
        if self._custom:
            return [math.log2(v) if v > 0 else -math.inf for _, v in sorted(self._values.items())]
        lg = [0.0, math.log2(self.L)]
        for ell in range(2, self.k_max + 1):
            best = max(lg[i] + lg[ell - i] for i in range(1, ell))
            lg.append(16 * lg[ell - 1] + 2 * math.log2(ell - 1) + best)
        return lg[: self.k_max + 1]

    def log2_lower(self, length: int) -> float:
        """A lower bound on ``log2 f(length, L)``."""
        self._check(length)
        return self._log2[length]

    def value(self, length: int) -> int:
        """Exact ``f(length, L)`` (computed on first use)."""
        self._check(length)
        if length not in self._values:
            prev = self.value(length - 1)
            best = max(self.value(i) * self.value(length - i) for i in range(1, length))
            self._values[length] = 1 + prev ** 16 * (length - 1) ** 2 * best
        return self._values[length]

    __getitem__ = value

    def exceeds(self, count: int, length: int) -> bool:
        """``count > f(length, L)`` without materializing huge values."""
        lb = self.log2_lower(length)
        if count.bit_length() <= lb:
            # count < 2^bit_length <= 2^lb <= f
            return False
        return count > self.value(length)

    def never_heavy(self, length: int, max_degree: int) -> bool:
        """Any graph of this max degree has at most ``max_degree^(l-1)`` x,y-paths of length l."""
        if length < 1:
            return True
        bound = max(max_degree, 1) ** (length - 1)
        return not self.exceeds(bound, length)

    def cap(self, length: int) -> int | None:
        """``f(length) + 1`` when that is a machine-sized number, else None."""
        if self.log2_lower(length) >= 62:
            return None
        return self.value(length) + 1


_TABLES: dict[tuple[int, int], ThresholdTable] = {}


def threshold_table(L: int = DEFAULT_L, k_max: int = DEFAULT_K_MAX) -> ThresholdTable:
    key = (L, k_max)
    if key not in _TABLES:
        _TABLES[key] = ThresholdTable(L, k_max)
    return _TABLES[key]


def f_threshold(length: int, L: int, k_max: int = DEFAULT_K_MAX) -> int:
    """Exact ``f(length, L)``."""
    if length < 0:
        raise InputError(f"path length must be non-negative, got {length}")
    return threshold_table(L, k_max).value(length)


def count_paths(g: Graph, x: int, y: int, length: int, cap: int | None = None) -> int:
    """Number of simple x,y-paths with exactly ``length`` edges, stopping at ``cap``."""
    if x == y:
        raise InputError("count_paths needs distinct endpoints")
    if length < 1:
        raise InputError(f"path length must be >= 1, got {length}")
    if cap is not None and cap < 1:
        raise InputError(f"cap must be >= 1, got {cap}")
    if not (0 <= x < g.n and 0 <= y < g.n):
        raise InputError("endpoint outside the graph")
    limit = math.inf if cap is None else cap
    dist = bfs_distances(g, y)
    if dist[x] > length:
        return 0
    on_path = bytearray(g.n)
    on_path[x] = 1
    ysets = g.neighbor_set(y)
    count = 0

    def walk(u: int, rem: int) -> bool:
        nonlocal count
        if rem == 1:
            if u in ysets:
                count += 1
            return count >= limit
        for w in g.neighbors(u):
            if w == y or on_path[w] or dist[w] > rem - 1:
                continue
            on_path[w] = 1
            stop = walk(w, rem - 1)
            on_path[w] = 0
            if stop:
                return True
        return False

    walk(x, length)
    return int(min(count, limit))


@dataclass(frozen=True)
class PathClassification:
    path: tuple[int, ...]
    length: int
    cls: str
    witness_count: int

    @property
    def heavy_by_count(self) -> bool:
        return self.cls != LIGHT


class PathClassifier:
    """Caches heaviness per (endpoint pair, length) for one graph and table."""

    def __init__(self, g: Graph, tt: ThresholdTable):
        self.g = g
        self.tt = tt
        self._maxdeg = g.max_degree
        self._heavy: dict[tuple[int, int, int], bool] = {}
        self._never = {ell: tt.never_heavy(ell, self._maxdeg) for ell in range(1, tt.k_max + 1)}

    def heavy_possible(self, max_length: int) -> bool:
        return not all(self._never[ell] for ell in range(1, min(max_length, self.tt.k_max) + 1))

    def heavy(self, x: int, y: int, length: int) -> bool:
        if self._never[length]:
            return False
        key = (x, y, length) if x < y else (y, x, length)
        hit = self._heavy.get(key)
        if hit is None:
            cap = self.tt.cap(length)
            hit = self.tt.exceeds(count_paths(self.g, x, y, length, cap), length)
            self._heavy[key] = hit
        return hit

    def path_is_heavy(self, path: Sequence[int]) -> bool:
        return self.heavy(path[0], path[-1], len(path) - 1)

    def has_heavy_subpath(self, path: Sequence[int], proper: bool = True) -> bool:
        ell = len(path) - 1
        top = ell - 1 if proper else ell
        for j in range(1, top + 1):
            for a in range(ell - j + 1):
                if self.heavy(path[a], path[a + j], j):
                    return True
        return False

    def is_critical(self, path: Sequence[int]) -> bool:
        return self.path_is_heavy(path) and not self.has_heavy_subpath(path)

    def classify(self, path: Sequence[int]) -> PathClassification:
        path = tuple(path)
        ell = len(path) - 1
        if ell < 1:
            raise InputError("a path needs at least one edge")
        self.tt._check(ell)
        if not is_path_in(self.g, path):
            raise InputError(f"{list(path)} is not a path in the graph")
        x, y = path[0], path[-1]
        if self._never[ell]:
            witnesses = count_paths(self.g, x, y, ell, WITNESS_CAP)
            return PathClassification(path, ell, LIGHT, witnesses)
        witnesses = count_paths(self.g, x, y, ell, self.tt.cap(ell))
        if not self.tt.exceeds(witnesses, ell):
            return PathClassification(path, ell, LIGHT, witnesses)
        cls = HEAVY if self.has_heavy_subpath(path) else CRITICAL
        return PathClassification(path, ell, cls, witnesses)


def classify_path(g: Graph, path: Sequence[int], tt: ThresholdTable) -> PathClassification:
    return PathClassifier(g, tt).classify(path)


def enumerate_paths(g: Graph, length: int) -> Iterator[tuple[int, ...]]:
    """Every simple path with ``length`` edges, once per undirected path."""
    if length < 1:
        raise InputError(f"path length must be >= 1, got {length}")
    n = g.n
    on_path = bytearray(n)
    stack: list[int] = []

    def walk(u: int, rem: int) -> Iterator[tuple[int, ...]]:
        if rem == 0:
            if stack[0] < u:
                yield tuple(stack)
            return
        for w in g.neighbors(u):
            if on_path[w]:
                continue
            on_path[w] = 1
            stack.append(w)
            yield from walk(w, rem - 1)
            stack.pop()
            on_path[w] = 0

    for s in range(n):
        on_path[s] = 1
        stack.append(s)
        yield from walk(s, length)
        stack.pop()
        on_path[s] = 0


@dataclass(frozen=True)
class CriticalCount:
    length: int
    value: float | int
    exact: bool
    total_paths: int
    sampled: int

    def to_json(self) -> dict:
        return {
            "length": self.length,
            "critical": self.value,
            "exact": self.exact,
            "total_paths": self.total_paths,
            "sampled": self.sampled,
        }


def count_critical_paths(
    g: Graph,
    length: int,
    tt: ThresholdTable,
    sample: int | None = None,
    seed: int = 0,
    classifier: PathClassifier | None = None,
) -> CriticalCount:
    """Exhaustive (``sample=None``) or sampled count of critical paths of one length."""
    if not 2 <= length <= tt.k_max:
        raise InputError(f"length must lie in [2, {tt.k_max}], got {length}")
    if sample is not None and sample <= 0:
        raise InputError("sample budget must be positive")
    pc = classifier or PathClassifier(g, tt)
    if sample is None:
        total = crit = 0
        check = pc.heavy_possible(length)
        for p in enumerate_paths(g, length):
            total += 1
            if check and pc.is_critical(p):
                crit += 1
        return CriticalCount(length, crit, True, total, total)
    paths = list(enumerate_paths(g, length))
    if len(paths) <= sample:
        crit = sum(1 for p in paths if pc.is_critical(p))
        return CriticalCount(length, crit, True, len(paths), len(paths))
    rng = random.Random(seed)
    chosen = rng.sample(paths, sample)
    crit = sum(1 for p in chosen if pc.is_critical(p))
    return CriticalCount(length, crit * len(paths) / sample, False, len(paths), sample)


@dataclass(frozen=True)
class ComparatorRecord:
    length: int
    observed: int
    bound: Fraction
    satisfied: bool

    def to_json(self) -> dict:
        return {
            "length": self.length,
            "observed": self.observed,
            "bound": float(self.bound) if self.bound < 1e300 else str(self.bound),
            "satisfied": self.satisfied,
        }


def critical_path_comparator(g: Graph, length: int, tt: ThresholdTable, K) -> ComparatorRecord:
    """Observed number of critical paths of one length against ``n * 2 (K delta)^l / f(l-1, L)``.

    For small L the bound may legitimately fail; the record reports, it does not assert.
    """
    K = Fraction(K)
    if not is_almost_regular(g, K):
        raise PreconditionError(f"graph is not {K}-almost-regular; the comparison is meaningless")
    observed = count_critical_paths(g, length, tt).value
    delta = degree_stats(g).min_degree
    bound = Fraction(g.n * 2 * (K * delta) ** length) / tt.value(length - 1)
    return ComparatorRecord(length, int(observed), bound, observed <= bound)
