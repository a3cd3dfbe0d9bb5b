"""K_{s,t}^k patterns, embeddings and exact containment search.

An embedding of ``K_{s,t}^k`` is ``t`` spiders, one per right root, that
share the left roots as their leaf vector and are otherwise disjoint.  The
search picks the left roots, then right roots in increasing id order, and
routes each spider by DFS with distance pruning and a free-vertex forward
check.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import InputError
from .graph import Graph, bfs_distances, build_graph, peel_to_min_degree

EXACT, AT_MOST = "exact", "at-most"
ABSENT, BUDGET_EXHAUSTED = "absent", "budget-exhausted"
DEFAULT_BUDGET = 2_000_000


@dataclass(frozen=True)
class PatternSpec:
    s: int
    t: int
    k: int
    mode: str = EXACT

    def __post_init__(self):
        for name in ("s", "t", "k"):
            if getattr(self, name) < 2:
                raise InputError(f"{name} must be >= 2, got {getattr(self, name)}")
        if self.mode not in (EXACT, AT_MOST):
            raise InputError(f"mode must be {EXACT!r} or {AT_MOST!r}, got {self.mode!r}")

    @property
    def vertex_count(self) -> int:
        return self.s + self.t + self.s * self.t * (self.k - 1)

    @property
    def edge_count(self) -> int:
        return self.s * self.t * self.k

    @property
    def min_vertices(self) -> int:
        """Fewest vertices any member of the pattern family can have."""
        return self.vertex_count if self.mode == EXACT else self.s + self.t

    @property
    def conjectured_exponent(self) -> Fraction:
        return 1 + Fraction(1, self.k) - Fraction(1, self.s * self.k)

    def allows(self, length: int) -> bool:
        return length == self.k if self.mode == EXACT else 1 <= length <= self.k

    def label(self) -> str:
        tag = "" if self.mode == EXACT else "<="
        return f"K_{{{self.s},{self.t}}}^{tag}{self.k}"

    def to_json(self) -> dict:
        return {"s": self.s, "t": self.t, "k": self.k, "mode": self.mode}


@dataclass(frozen=True)
class Embedding:
    left: tuple[int, ...]
    right: tuple[int, ...]
    paths: tuple[tuple[tuple[int, ...], ...], ...]  # paths[i][j]: left[i] -> right[j]

    def vertices(self) -> set[int]:
        return {v for row in self.paths for p in row for v in p}

    def edges(self) -> set[tuple[int, int]]:
        return {(min(a, b), max(a, b)) for row in self.paths for p in row for a, b in zip(p, p[1:])}

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "roots": {"left": list(self.left), "right": list(self.right)},
            "paths": [[list(p) for p in row] for row in self.paths],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Embedding":
        try:
            roots = data["roots"]
            paths = data["paths"]
            return cls(
                tuple(int(v) for v in roots["left"]),
                tuple(int(v) for v in roots["right"]),
                tuple(tuple(tuple(int(v) for v in p) for p in row) for row in paths),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed embedding JSON: {exc}") from exc


def verify_embedding(g: Graph, p: PatternSpec, e: Embedding) -> bool:
    try:
        return not embedding_problems(g, p, e)
    except Exception:  # a checker must never raise on garbage input
        return False


def embedding_problems(g: Graph, p: PatternSpec, e: Embedding) -> list[str]:
    out = []
    if len(e.left) != p.s or len(e.right) != p.t:
        return [f"expected {p.s} left and {p.t} right roots"]
    roots = list(e.left) + list(e.right)
    if len(set(roots)) != len(roots):
        out.append("roots are not distinct")
    if any(not 0 <= v < g.n for v in roots):
        return out + ["root outside the graph"]
    if len(e.paths) != p.s or any(len(row) != p.t for row in e.paths):
        return out + ["path table is not s x t"]
    interiors: set[int] = set()
    rootset = set(roots)
    for i, row in enumerate(e.paths):
        for j, path in enumerate(row):
            tag = f"path ({i},{j})"
            if len(path) < 2 or path[0] != e.left[i] or path[-1] != e.right[j]:
                out.append(f"{tag} does not join its roots")
                continue
            if not p.allows(len(path) - 1):
                out.append(f"{tag} has length {len(path) - 1}")
            if len(set(path)) != len(path):
                out.append(f"{tag} repeats a vertex")
            for a, b in zip(path, path[1:]):
                if not (0 <= a < g.n and 0 <= b < g.n and g.has_edge(a, b)):
                    out.append(f"{tag} uses non-edge ({a},{b})")
            inner = set(path[1:-1])
            if inner & rootset:
                out.append(f"{tag} passes through a root")
            if inner & interiors:
                out.append(f"{tag} shares an interior vertex")
            interiors |= inner
    return out


@dataclass(frozen=True)
class SearchOutcome:
    """Result of a containment search: an embedding, ``absent`` or ``budget-exhausted``."""

    status: str
    embedding: Embedding | None
    nodes: int

    @property
    def found(self) -> bool:
        return self.embedding is not None

    @property
    def definitive(self) -> bool:
        return self.status != BUDGET_EXHAUSTED

    def to_json(self) -> dict:
        out = {"schema": 1, "status": self.status, "nodes": self.nodes}
        if self.embedding is not None:
            out.update(self.embedding.to_json())
        return out


class _BudgetOut(Exception):
    pass


class _Containment:
    def __init__(self, g: Graph, p: PatternSpec, budget: int):
        self.g = g
        self.p = p
        self.budget = budget
        self.nodes = 0
        self.n = g.n
        self.masks = g.masks
        self.lengths = range(1, p.k + 1) if p.mode == AT_MOST else (p.k,)
        self.per_spider = 1 if p.mode == AT_MOST else 1 + p.s * (p.k - 1)

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise _BudgetOut

    def run(self) -> Embedding | None:
        g, p = self.g, self.p
        order = sorted(range(self.n), key=lambda v: (-g.degree(v), v))
        lefts = [v for v in order if g.degree(v) >= p.t]
        rights = [v for v in range(self.n) if g.degree(v) >= p.s]
        dist_cache: dict[int, list[int]] = {}

        def dist(v: int) -> list[int]:
            if v not in dist_cache:
                dist_cache[v] = bfs_distances(g, v)
            return dist_cache[v]

        reach = 2 * p.k
        for left in itertools.combinations(lefts, p.s):
            self.tick()
            if any(dist(a)[b] > reach for a, b in itertools.combinations(left, 2)):
                continue
            dists = [dist(a) for a in left]
            leftset = set(left)
            centres = [
                c for c in rights
                if c not in leftset and all(d[c] <= p.k for d in dists)
                and (p.s != p.t or c > min(left))  # K_{s,s}: sides are interchangeable
            ]
            if len(centres) < p.t:
                continue
            used = 0
            for v in left:
                used |= 1 << v
            found = self._spiders(left, dists, centres, 0, used, [])
            if found is not None:
                return self._embedding(left, found)
        return None

    def _spiders(self, left, dists, centres, start, used, acc):
        p = self.p
        remaining = p.t - len(acc)
        if remaining == 0:
            return list(acc)
        free = self.n - bin(used).count("1")
        if free < remaining * self.per_spider:
            return None
        for idx in range(start, len(centres) - remaining + 1):
            c = centres[idx]
            if used >> c & 1:
                continue
            self.tick()
            for legs, mask in self._legs_at(c, left, dists, used | 1 << c):
                acc.append((c, legs))
                hit = self._spiders(left, dists, centres, idx + 1, mask, acc)
                if hit is not None:
                    return hit
                acc.pop()
        return None

    def _legs_at(self, c, left, dists, used) -> Iterator[tuple[list, int]]:
        """All leg systems at ``c`` (one leg per left root) avoiding ``used``."""
        s = len(left)
        legs = [None] * s
        masks = self.masks

        def route(i: int, used: int):
            if i == s:
                yield list(legs), used
                return
            target, dist = left[i], dists[i]
            for length in self.lengths:
                if dist[c] > length:
                    continue
                stack = [c]

                def walk(u: int, rem: int, used: int):
                    self.tick()
                    if rem == 1:
                        if masks[u] >> target & 1:
                            legs[i] = tuple(stack) + (target,)
                            yield from route(i + 1, used)
                        return
                    cand = masks[u] & ~used
                    while cand:
                        low = cand & -cand
                        x = low.bit_length() - 1
                        cand ^= low
                        if dist[x] > rem - 1:
                            continue
                        stack.append(x)
                        yield from walk(x, rem - 1, used | low)
                        stack.pop()

                yield from walk(c, length, used)

        yield from route(0, used)

    def _embedding(self, left, spiders) -> Embedding:
        right = tuple(c for c, _ in spiders)
        paths = tuple(
            tuple(tuple(reversed(legs[i])) for _, legs in spiders) for i in range(len(left))
        )
        return Embedding(tuple(left), right, paths)


def contains_subdivision(g: Graph, p: PatternSpec, budget: int = DEFAULT_BUDGET) -> SearchOutcome:
    """Exhaustive search for a copy of the pattern (or a family member in at-most mode)."""
    if budget < 1:
        raise InputError(f"budget must be >= 1, got {budget}")
    if g.n < p.min_vertices or g.edge_count < (p.edge_count if p.mode == EXACT else p.s * p.t):
        return SearchOutcome(ABSENT, None, 0)
    # Every pattern vertex has degree >= 2, so the pattern lives in the 2-core.
    core = peel_to_min_degree(g, 2)
    if core.graph.n < p.min_vertices:
        return SearchOutcome(ABSENT, None, 0)
    search = _Containment(core.graph, p, budget)
    try:
        emb = search.run()
    except _BudgetOut:
        return SearchOutcome(BUDGET_EXHAUSTED, None, search.nodes)
    if emb is None:
        return SearchOutcome(ABSENT, None, search.nodes)
    lift = core.vertices
    emb = Embedding(
        tuple(lift[v] for v in emb.left),
        tuple(lift[v] for v in emb.right),
        tuple(tuple(tuple(lift[v] for v in path) for path in row) for row in emb.paths),
    )
    assert verify_embedding(g, p, emb), "containment search produced an invalid embedding"
    return SearchOutcome("found", emb, search.nodes)


def is_pattern_free(g: Graph, p: PatternSpec, budget: int = DEFAULT_BUDGET) -> bool:
    """True iff the pattern is absent; raises if the search runs out of budget."""
    out = contains_subdivision(g, p, budget)
    if not out.definitive:
        raise InputError(f"containment search exceeded its budget of {budget} nodes")
    return not out.found


def pattern_graph(p: PatternSpec) -> tuple[Graph, Embedding]:
    """The pattern itself on vertices ``0..v-1`` with its identity embedding."""
    s, t, k = p.s, p.t, p.k
    left = tuple(range(s))
    right = tuple(range(s, s + t))
    nxt = s + t
    rows = []
    edges = []
    for i in range(s):
        row = []
        for j in range(t):
            inner = list(range(nxt, nxt + k - 1))
            nxt += k - 1
            path = (left[i], *inner, right[j])
            edges.extend(zip(path, path[1:]))
            row.append(path)
        rows.append(tuple(row))
    return build_graph(edges, nxt), Embedding(left, right, tuple(rows))


def plant_subdivision(n: int, p: PatternSpec, noise_edges: int, seed: int | None = 0) -> tuple[Graph, Embedding]:
    """Pattern on random vertices of an n-vertex graph plus uniform noise edges."""
    v = p.vertex_count
    if n < v:
        raise InputError(f"n={n} is smaller than the pattern's {v} vertices")
    if noise_edges < 0:
        raise InputError("noise_edges must be non-negative")
    rng = random.Random(seed)
    _, base = pattern_graph(p)
    place = rng.sample(range(n), v)
    emb = Embedding(
        tuple(place[x] for x in base.left),
        tuple(place[x] for x in base.right),
        tuple(tuple(tuple(place[x] for x in path) for path in row) for row in base.paths),
    )
    planted = emb.edges()
    total = n * (n - 1) // 2
    if noise_edges > total - len(planted):
        raise InputError(f"cannot add {noise_edges} noise edges on {n} vertices")
    noise: set[tuple[int, int]] = set()
    if noise_edges > (total - len(planted)) // 2:
        pool = [(a, b) for a in range(n) for b in range(a + 1, n) if (a, b) not in planted]
        noise = set(rng.sample(pool, noise_edges))
    else:
        while len(noise) < noise_edges:
            a, b = rng.sample(range(n), 2)
            e = (min(a, b), max(a, b))
            if e not in planted:
                noise.add(e)
    g = build_graph(sorted(planted | noise), n)
    return g, emb


ADMISSIBLE, ADMISSIBLE_1K, INADMISSIBLE = "admissible", "admissible-1k...k", "inadmissible"


@dataclass(frozen=True)
class LengthVerdict:
    status: str
    reason: str = ""

    @property
    def admissible(self) -> bool:
        return self.status != INADMISSIBLE


def validate_length_vector(lv: Sequence[int], k: int) -> LengthVerdict:
    """Necessary shape of a length vector of a strong spider without heavy paths.

    The two shortest legs must satisfy ``l1 + l2 >= k + 1``.  For ``k`` in
    ``{3, 4}`` the vector ``(1, k, ..., k)`` is reported as its own class.
    """
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    if len(lv) < 2:
        raise InputError("a length vector needs at least two entries")
    if any(not 1 <= ell <= k for ell in lv):
        raise InputError(f"entries must lie in [1, {k}], got {list(lv)}")
    lv = sorted(lv)
    if lv[0] + lv[1] < k + 1:
        return LengthVerdict(INADMISSIBLE, f"l1 + l2 = {lv[0] + lv[1]} < k + 1 = {k + 1}")
    if k in (3, 4) and lv[0] == 1 and all(ell == k for ell in lv[1:]):
        return LengthVerdict(ADMISSIBLE_1K)
    return LengthVerdict(ADMISSIBLE)
