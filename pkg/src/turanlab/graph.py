"""Immutable simple graphs on dense integer vertex ids.

A :class:`Graph` stores sorted neighbour tuples, neighbour frozensets and
neighbour bitmasks side by side; the search kernels use whichever view is
cheapest.  Subgraph operations never mutate, they return a new graph plus the
vertex map back to the parent (:class:`Subgraph`).
"""

from __future__ import annotations

import heapq
import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import DomainError, InputError

Edge = tuple[int, int]


class Graph:
    """Simple undirected graph on vertices ``0..n-1``."""

    __slots__ = ("_n", "_adj", "_sets", "_masks", "_m")

    def __init__(self, n: int, neighbours: Sequence[Iterable[int]]):
        # Trusted constructor: callers go through build_graph for validation.
        self._n = n
        self._adj = tuple(tuple(sorted(nb)) for nb in neighbours)
        self._sets = tuple(frozenset(nb) for nb in self._adj)
        masks = []
        for nb in self._adj:
            mask = 0
            for v in nb:
                mask |= 1 << v
            masks.append(mask)
        self._masks = tuple(masks)
        self._m = sum(len(nb) for nb in self._adj) // 2

    @property
    def n(self) -> int:
        return self._n

    vertex_count = n

    @property
    def edge_count(self) -> int:
        return self._m

    @property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        return self._adj

    @property
    def masks(self) -> tuple[int, ...]:
        return self._masks

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def neighbor_set(self, v: int) -> frozenset[int]:
        return self._sets[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(nb) for nb in self._adj)

    @property
    def max_degree(self) -> int:
        return max((len(nb) for nb in self._adj), default=0)

    @property
    def min_degree(self) -> int:
        return min((len(nb) for nb in self._adj), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._sets[u]

    def edges(self) -> Iterator[Edge]:
        for u, nb in enumerate(self._adj):
            for v in nb:
                if u < v:
                    yield (u, v)

    def edge_list(self) -> list[Edge]:
        return list(self.edges())

    def __len__(self) -> int:
        return self._n

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self._n == other._n and self._adj == other._adj

    def __hash__(self) -> int:
        return hash((self._n, self._adj))

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, m={self._m})"

    def check_invariants(self) -> bool:
        """Full scan: loop-free, symmetric, edge count consistent."""
        total = 0
        for u, nb in enumerate(self._adj):
            if u in self._sets[u]:
                return False
            for v in nb:
                if not 0 <= v < self._n or u not in self._sets[v]:
                    return False
            total += len(nb)
        return total == 2 * self._m


@dataclass(frozen=True)
class DegreeStats:
    min_degree: int
    max_degree: int
    average_degree: Fraction

    @property
    def ratio(self) -> Fraction | None:
        """``max/min``; ``None`` when the minimum degree is zero."""
        if self.min_degree == 0:
            return None
        return Fraction(self.max_degree, self.min_degree)


@dataclass(frozen=True)
class Subgraph:
    """A derived graph together with its vertex map into the parent."""

    graph: Graph
    vertices: tuple[int, ...]  # new id -> parent id

    @property
    def old_to_new(self) -> dict[int, int]:
        return {old: new for new, old in enumerate(self.vertices)}

    def lift(self, vertices: Iterable[int]) -> list[int]:
        return [self.vertices[v] for v in vertices]


def build_graph(edges: Iterable[Sequence[int]], n: int) -> Graph:
    """Build a simple graph from a (possibly repetitive) edge list.

    Raises InputError on out-of-range endpoints or self-loops.
    """
    if n < 0:
        raise InputError(f"vertex count must be non-negative, got {n}")
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for pair in edges:
        if len(pair) != 2:
            raise InputError(f"edge {pair!r} is not a pair")
        u, v = int(pair[0]), int(pair[1])
        if not (0 <= u < n and 0 <= v < n):
            raise InputError(f"edge ({u}, {v}) has an endpoint outside [0, {n})")
        if u == v:
            raise InputError(f"self-loop at vertex {u}")
        nbrs[u].add(v)
        nbrs[v].add(u)
    return Graph(n, nbrs)


def graph_from_masks(masks: Sequence[int]) -> Graph:
    n = len(masks)
    nbrs = []
    for m in masks:
        nb = []
        while m:
            low = m & -m
            nb.append(low.bit_length() - 1)
            m ^= low
        nbrs.append(nb)
    return Graph(n, nbrs)


def degree_stats(g: Graph) -> DegreeStats:
    if g.n == 0:
        raise DomainError("degree statistics of the empty graph are undefined")
    degs = g.degrees
    return DegreeStats(min(degs), max(degs), Fraction(sum(degs), g.n))


def is_almost_regular(g: Graph, K: Fraction | int | float) -> bool:
    """True iff ``max_degree <= K * min_degree``."""
    stats = degree_stats(g)
    return stats.max_degree <= Fraction(K) * stats.min_degree


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> Subgraph:
    """Subgraph induced on ``vertices``; new ids follow ascending parent ids."""
    keep = sorted(set(vertices))
    for v in keep:
        if not 0 <= v < g.n:
            raise InputError(f"unknown vertex {v}")
    index = {old: new for new, old in enumerate(keep)}
    nbrs = [[index[w] for w in g.neighbors(v) if w in index] for v in keep]
    return Subgraph(Graph(len(keep), nbrs), tuple(keep))


def peel_to_min_degree(g: Graph, d: int) -> Subgraph:
    """Maximal subgraph with minimum degree >= d (possibly empty).

    Vertices of current degree < d are deleted one at a time from a heap keyed
    by (current degree, vertex id), so the deletion order is deterministic.
    """
    if d < 1:
        raise InputError(f"peeling degree must be >= 1, got {d}")
    deg = list(g.degrees)
    alive = [True] * g.n
    heap = [(deg[v], v) for v in range(g.n) if deg[v] < d]
    heapq.heapify(heap)
    while heap:
        dv, v = heapq.heappop(heap)
        if not alive[v] or dv != deg[v]:
            continue
        alive[v] = False
        for w in g.neighbors(v):
            if alive[w]:
                deg[w] -= 1
                if deg[w] < d:
                    heapq.heappush(heap, (deg[w], w))
    return induced_subgraph(g, [v for v in range(g.n) if alive[v]])


def drop_isolated(g: Graph) -> Subgraph:
    return induced_subgraph(g, [v for v in range(g.n) if g.degree(v) > 0])


def bfs_distances(g: Graph, source: int, blocked: frozenset[int] | set[int] = frozenset()) -> list[int]:
    """Hop distances from ``source``; unreachable vertices get ``g.n + 1``."""
    inf = g.n + 1
    dist = [inf] * g.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for w in g.neighbors(u):
            if dist[w] == inf and w not in blocked:
                dist[w] = du
                queue.append(w)
    return dist


def relabel(g: Graph, perm: Sequence[int]) -> Graph:
    """Graph with vertex ``v`` renamed to ``perm[v]``."""
    return build_graph(((perm[u], perm[v]) for u, v in g.edges()), g.n)


def disjoint_union(*graphs: Graph) -> Graph:
    edges = []
    offset = 0
    for h in graphs:
        edges.extend((u + offset, v + offset) for u, v in h.edges())
        offset += h.n
    return build_graph(edges, offset)


def is_path_in(g: Graph, path: Sequence[int]) -> bool:
    """Vertex sequence is a simple path (consecutive vertices adjacent)."""
    if len(set(path)) != len(path):
        return False
    if any(not 0 <= v < g.n for v in path):
        return False
    return all(g.has_edge(a, b) for a, b in zip(path, path[1:]))


# Small named graphs, mostly for tests and examples.

def empty_graph(n: int) -> Graph:
    return build_graph([], n)


def path_graph(n: int) -> Graph:
    return build_graph([(i, i + 1) for i in range(n - 1)], n)


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise InputError("a cycle needs at least 3 vertices")
    return build_graph([(i, (i + 1) % n) for i in range(n)], n)


def complete_graph(n: int) -> Graph:
    return build_graph([(i, j) for i in range(n) for j in range(i + 1, n)], n)


def complete_bipartite(a: int, b: int) -> Graph:
    """K_{a,b} with parts ``0..a-1`` and ``a..a+b-1``."""
    return build_graph([(i, a + j) for i in range(a) for j in range(b)], a + b)


def complete_multipartite(*parts: int) -> Graph:
    offsets = []
    total = 0
    for p in parts:
        offsets.append(range(total, total + p))
        total += p
    edges = [(u, v) for i, A in enumerate(offsets) for B in offsets[i + 1:] for u in A for v in B]
    return build_graph(edges, total)


def star_graph(leaves: int) -> Graph:
    """K_{1,leaves} with centre 0."""
    return build_graph([(0, i) for i in range(1, leaves + 1)], leaves + 1)


def gnp_graph(n: int, p: float, seed: int | None = None) -> Graph:
    rng = random.Random(seed)
    return build_graph([(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p], n)


def gnm_graph(n: int, m: int, seed: int | None = None) -> Graph:
    rng = random.Random(seed)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if m > len(pairs):
        raise InputError(f"{m} edges do not fit on {n} vertices")
    return build_graph(rng.sample(pairs, m), n)


def random_regular_graph(n: int, d: int, seed: int | None = None, max_tries: int = 1000) -> Graph:
    """Uniform-ish d-regular graph by the pairing model with rejection."""
    if (n * d) % 2 or d >= n:
        raise InputError(f"no {d}-regular graph on {n} vertices")
    rng = random.Random(seed)
    for _ in range(max_tries):
        points = [v for v in range(n) for _ in range(d)]
        rng.shuffle(points)
        edges = set()
        ok = True
        for i in range(0, len(points), 2):
            u, v = points[i], points[i + 1]
            if u == v or (min(u, v), max(u, v)) in edges:
                ok = False
                break
            edges.add((min(u, v), max(u, v)))
        if ok:
            return build_graph(edges, n)
    raise DomainError(f"pairing model failed {max_tries} times for n={n}, d={d}")
