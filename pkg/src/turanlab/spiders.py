"""Spiders, strong tuples, path-family shrinking and branch-vertex extraction.

A spider is a centre ``w`` with legs ``w -> v_i`` that share only ``w``.
Legs are stored centre-first, so ``legs[i][-1]`` is the i-th leaf and
``len(legs[i]) - 1`` its length.  All indices (legs, parts) are 0-based.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import InputError
from .graph import Graph, bfs_distances, is_path_in
from .paths import ThresholdTable

Path = tuple[int, ...]


@dataclass(frozen=True)
class Spider:
    center: int
    legs: tuple[Path, ...]

    def __post_init__(self):
        object.__setattr__(self, "legs", tuple(tuple(leg) for leg in self.legs))

    @property
    def leaf_vector(self) -> tuple[int, ...]:
        return tuple(leg[-1] for leg in self.legs)

    @property
    def length_vector(self) -> tuple[int, ...]:
        return tuple(len(leg) - 1 for leg in self.legs)

    @property
    def is_path(self) -> bool:
        """Two legs: the object is a path through the centre."""
        return len(self.legs) <= 2

    @property
    def internal_vertices(self) -> frozenset[int]:
        """Centre and leg interiors (everything but the leaves)."""
        out = {self.center}
        for leg in self.legs:
            out.update(leg[1:-1])
        return frozenset(out)

    @property
    def vertices(self) -> frozenset[int]:
        return self.internal_vertices | frozenset(self.leaf_vector)

    def edges(self) -> Iterator[tuple[int, int]]:
        for leg in self.legs:
            yield from zip(leg, leg[1:])

    def problems(self, g: Graph | None = None) -> list[str]:
        out = []
        if not self.legs:
            out.append("no legs")
        seen = {self.center}
        for i, leg in enumerate(self.legs):
            if len(leg) < 2 or leg[0] != self.center:
                out.append(f"leg {i} does not start at the centre or is empty")
                continue
            rest = set(leg[1:])
            if len(rest) != len(leg) - 1:
                out.append(f"leg {i} repeats a vertex")
            if rest & seen:
                out.append(f"leg {i} meets another leg or the centre")
            seen |= rest
            if g is not None and not is_path_in(g, leg):
                out.append(f"leg {i} is not a path in the graph")
        return out

    def is_valid(self, g: Graph | None = None) -> bool:
        return not self.problems(g)

    def path_between(self, a: int, b: int) -> Path:
        """The unique tree path between two vertices of the spider."""
        pa, pb = self._root_path(a), self._root_path(b)
        while len(pa) > 1 and len(pb) > 1 and pa[1] == pb[1]:
            pa, pb = pa[1:], pb[1:]
        return tuple(reversed(pa)) + pb[1:]

    def _root_path(self, v: int) -> Path:
        if v == self.center:
            return (v,)
        for leg in self.legs:
            if v in leg:
                return leg[: leg.index(v) + 1]
        raise InputError(f"vertex {v} is not on the spider")

    def tree_paths(self, max_length: int) -> Iterator[Path]:
        """Every path of the tree with 1..max_length edges, once per vertex pair."""
        verts = sorted(self.vertices)
        for i, a in enumerate(verts):
            for b in verts[i + 1:]:
                p = self.path_between(a, b)
                if len(p) - 1 <= max_length:
                    yield p

    def restrict(self, leg_indices: Iterable[int]) -> "Spider":
        return Spider(self.center, tuple(self.legs[i] for i in leg_indices))

    def to_json(self) -> dict:
        return {"center": self.center, "legs": [list(leg) for leg in self.legs], "is_path": self.is_path}


@dataclass
class StrongnessCertificate:
    """A packing of internally disjoint spiders with one leaf and length vector."""

    leaves: tuple[int, ...]
    lengths: tuple[int, ...]
    spiders: list[Spider]
    threshold: int | None = None

    @property
    def size(self) -> int:
        return len(self.spiders)

    @property
    def strong(self) -> bool:
        return self.threshold is not None and len(self.spiders) >= self.threshold

    def problems(self, g: Graph | None = None) -> list[str]:
        out = []
        used: set[int] = set()
        for idx, sp in enumerate(self.spiders):
            out.extend(f"spider {idx}: {p}" for p in sp.problems(g))
            if sp.leaf_vector != tuple(self.leaves) or sp.length_vector != tuple(self.lengths):
                out.append(f"spider {idx} has the wrong leaf or length vector")
            inner = sp.internal_vertices
            if inner & used:
                out.append(f"spider {idx} shares an internal vertex with an earlier spider")
            if inner & set(self.leaves):
                out.append(f"spider {idx} uses a leaf as an internal vertex")
            used |= inner
        return out

    def verify(self, g: Graph | None = None) -> bool:
        return not self.problems(g)

    def to_json(self) -> dict:
        return {
            "leaves": list(self.leaves),
            "lengths": list(self.lengths),
            "threshold": None if self.threshold is None else str(self.threshold),
            "strong": self.strong,
            "size": self.size,
            "spiders": [sp.to_json() for sp in self.spiders],
        }


def strongness_threshold(s: int, k: int, lengths: Sequence[int], tt: ThresholdTable) -> int:
    """``(sk)^(sk - sum(lengths)) * f(k, L)``."""
    if len(lengths) != s:
        raise InputError(f"expected {s} leg lengths, got {len(lengths)}")
    if any(not 1 <= ell <= k for ell in lengths):
        raise InputError(f"leg lengths must lie in [1, {k}], got {list(lengths)}")
    return (s * k) ** (s * k - sum(lengths)) * tt.value(k)


# -- spider search ---------------------------------------------------------

class _SpiderSearch:
    """DFS for spiders with a fixed leaf and length vector."""

    def __init__(self, g: Graph, leaves: Sequence[int], lengths: Sequence[int]):
        leaves = tuple(leaves)
        lengths = tuple(lengths)
        if len(leaves) != len(lengths) or not leaves:
            raise InputError("leaf and length vectors must be nonempty and of equal size")
        if len(set(leaves)) != len(leaves):
            raise InputError("leaves must be distinct")
        if any(not 0 <= v < g.n for v in leaves):
            raise InputError("leaf outside the graph")
        if any(ell < 1 for ell in lengths):
            raise InputError("leg lengths must be >= 1")
        self.g = g
        self.leaves = leaves
        self.lengths = lengths
        self.leafset = frozenset(leaves)
        self.dist = [bfs_distances(g, v) for v in leaves]
        # Route the longest legs first: they are the most constrained.
        self.order = sorted(range(len(leaves)), key=lambda i: (-lengths[i], i))

    def feasible_center(self, w: int) -> bool:
        if w in self.leafset:
            return False
        return all(self.dist[i][w] <= self.lengths[i] for i in range(len(self.leaves)))

    def spiders_at(self, w: int, blocked: Iterable[int] = ()) -> Iterator[Spider]:
        if not self.feasible_center(w):
            return
        g = self.g
        used = bytearray(g.n)
        for v in blocked:
            used[v] = 1
        if used[w]:
            return
        for v in self.leaves:
            used[v] = 1
        used[w] = 1
        legs: list[Path | None] = [None] * len(self.leaves)

        def route(pos: int) -> Iterator[Spider]:
            if pos == len(self.order):
                yield Spider(w, tuple(legs))
                return
            i = self.order[pos]
            target, dist = self.leaves[i], self.dist[i]
            stack = [w]

            def walk(u: int, rem: int) -> Iterator[Spider]:
                if rem == 1:
                    if g.has_edge(u, target):
                        legs[i] = tuple(stack) + (target,)
                        yield from route(pos + 1)
                    return
                for x in g.neighbors(u):
                    if used[x] or dist[x] > rem - 1:
                        continue
                    used[x] = 1
                    stack.append(x)
                    yield from walk(x, rem - 1)
                    stack.pop()
                    used[x] = 0

            yield from walk(w, self.lengths[i])

        yield from route(0)

    def first_at(self, w: int, blocked: Iterable[int] = ()) -> Spider | None:
        return next(self.spiders_at(w, blocked), None)


def iter_spiders(g: Graph, leaves: Sequence[int], lengths: Sequence[int], blocked: Iterable[int] = ()) -> Iterator[Spider]:
    """All spiders with the given leaf/length vector avoiding ``blocked``."""
    search = _SpiderSearch(g, leaves, lengths)
    blocked = frozenset(blocked)
    for w in range(g.n):
        if w not in blocked:
            yield from search.spiders_at(w, blocked)


def find_spider(g: Graph, leaves: Sequence[int], lengths: Sequence[int], blocked: Iterable[int] = ()) -> Spider | None:
    return next(iter_spiders(g, leaves, lengths, blocked), None)


def greedy_disjoint_packing(
    g: Graph,
    leaves: Sequence[int],
    lengths: Sequence[int],
    limit: int | None = None,
    threshold: int | None = None,
    restarts: int = 0,
    seed: int = 0,
) -> StrongnessCertificate:
    """Greedy maximal family of internally disjoint spiders on a leaf vector.

    Centres are scanned in id order (then shuffled on each restart); each
    centre contributes the first spider that avoids every vertex already used.
    Reaching ``threshold`` certifies strongness; falling short proves nothing.
    """
    search = _SpiderSearch(g, leaves, lengths)
    target = limit if limit is not None else threshold

    def run(order: list[int]) -> list[Spider]:
        used: set[int] = set()
        found: list[Spider] = []
        for w in order:
            if target is not None and len(found) >= target:
                break
            if w in used:
                continue
            sp = search.first_at(w, used)
            if sp is not None:
                found.append(sp)
                used |= sp.internal_vertices
        return found

    order = list(range(g.n))
    best = run(order)
    rng = random.Random(seed)
    for _ in range(restarts):
        if target is not None and len(best) >= target:
            break
        rng.shuffle(order)
        cand = run(order)
        if len(cand) > len(best):
            best = cand
    return StrongnessCertificate(tuple(leaves), tuple(lengths), best, threshold)


# -- path families -----------------------------------------------------------

def _check_family(g: Graph, x: int, paths: Sequence[Sequence[int]], targets: Iterable[int] | None) -> tuple[list[Path], int]:
    fam = [tuple(p) for p in paths]
    if not fam:
        return fam, 0
    h = len(fam[0]) - 1
    if h < 1:
        raise InputError("paths must have at least one edge")
    tset = None if targets is None else set(targets)
    if len(set(fam)) != len(fam):
        raise InputError("path family contains duplicates")
    for p in fam:
        if p[0] != x:
            raise InputError(f"path {list(p)} does not start at {x}")
        if len(p) - 1 != h:
            raise InputError("paths in the family have different lengths")
        if not is_path_in(g, p):
            raise InputError(f"{list(p)} is not a path in the graph")
        if tset is not None and p[-1] not in tset:
            raise InputError(f"path {list(p)} does not end in the target set")
    return fam, h


def shrink_to_disjoint(g: Graph, x: int, paths: Sequence[Sequence[int]], targets: Iterable[int] | None = None) -> list[Path]:
    """Maximal sub-family of paths from ``x`` pairwise sharing only ``x``.

    Greedy, taking paths through the least shared vertices first (ties by
    input order).
    """
    fam, h = _check_family(g, x, paths, targets)
    if not fam:
        return []
    load: dict[int, int] = defaultdict(int)
    for p in fam:
        for v in p[1:]:
            load[v] += 1
    # Paths through lightly shared vertices first.
    order = sorted(range(len(fam)), key=lambda i: (sum(load[v] for v in fam[i][1:]), i))
    used: set[int] = set()
    chosen = []
    for i in order:
        inner = fam[i][1:]
        if used.isdisjoint(inner):
            chosen.append(i)
            used.update(inner)
    return [fam[i] for i in sorted(chosen)]


@dataclass(frozen=True)
class BalancedSpider:
    spider: Spider
    prefix: Path  # from the family origin x to the spider centre
    center_is_origin: bool


def balanced_spider_from_paths(
    g: Graph, x: int, paths: Sequence[Sequence[int]], height: int, targets: Iterable[int] | None = None
) -> BalancedSpider | None:
    """Balanced spider of the given height with leaves at the family's ends.

    Picks the length ``h - height`` prefix shared by most paths (ties: smallest
    prefix), then shrinks the suffixes to be disjoint outside their common
    start.  Returns None when fewer than two legs survive.
    """
    fam, h = _check_family(g, x, paths, targets)
    if not fam:
        return None
    if not 1 <= height <= h:
        raise InputError(f"height must lie in [1, {h}], got {height}")
    cut = h - height
    groups: dict[Path, list[Path]] = defaultdict(list)
    for p in fam:
        groups[p[: cut + 1]].append(p)
    prefix = min(groups, key=lambda pre: (-len(groups[pre]), pre))
    suffixes = [p[cut:] for p in groups[prefix]]
    center = prefix[-1]
    legs = shrink_to_disjoint(g, center, suffixes)
    if len(legs) < 2:
        return None
    return BalancedSpider(Spider(center, tuple(legs)), prefix, center == x)


# -- branch vertices --------------------------------------------------------

@dataclass(frozen=True)
class BranchResult:
    found: bool
    x: int | None = None
    j: int | None = None
    suffixes: tuple[Path, ...] = ()
    colorings_tried: int = 0
    layered: bool = False

    @property
    def leaves(self) -> tuple[int, ...]:
        return tuple(p[-1] for p in self.suffixes)


def _layer_pigeonhole(paths: Mapping[int, Path], k: int, m: int) -> tuple[int, int, tuple[Path, ...]] | None:
    """Layer-by-layer predecessor pigeonhole on a depth-consistent family.

    Every vertex must sit at the same depth in every path that contains it.
    """
    rep = {w: w for w in paths}
    current = sorted(paths)
    for d in range(k, 0, -1):
        groups: dict[int, list[int]] = defaultdict(list)
        for y in current:
            groups[paths[rep[y]][d - 1]].append(y)
        x = min(groups, key=lambda v: (-len(groups[v]), v))
        if len(groups[x]) >= m:
            chosen = sorted(groups[x])[:m]
            return x, k - d + 1, tuple(paths[rep[y]][d - 1:] for y in chosen)
        rep = {v: rep[min(ys)] for v, ys in groups.items()}
        current = sorted(groups)
    return None


def find_branch_vertex(
    g: Graph,
    z: int,
    W: Iterable[int],
    paths: Mapping[int, Sequence[int]],
    m: int,
    seed: int = 0,
    retries: int = 100,
) -> BranchResult:
    """Vertex ``x`` and ``m`` equal-length suffixes of the given z->w paths sharing only ``x``.

    A family in which every vertex already has a consistent depth is handled
    directly.  Otherwise each attempt colours the internal vertices with
    ``1..k`` at random and keeps the paths whose i-th vertex has colour i.
    """
    if m < 1:
        raise InputError(f"m must be >= 1, got {m}")
    W = sorted(set(W))
    if not W:
        return BranchResult(False)
    if z in W:
        raise InputError("z must not belong to W")
    fam = {}
    for w in W:
        if w not in paths:
            raise InputError(f"no path given for {w}")
        p = tuple(paths[w])
        if p[0] != z or p[-1] != w:
            raise InputError(f"path for {w} does not run from {z} to {w}")
        if not is_path_in(g, p):
            raise InputError(f"{list(p)} is not a path in the graph")
        fam[w] = p
    k = len(fam[W[0]]) - 1
    if k < 1 or any(len(p) - 1 != k for p in fam.values()):
        raise InputError("all paths must have the same positive length")

    depth: dict[int, int] = {}
    layered = all(depth.setdefault(v, d) == d for p in fam.values() for d, v in enumerate(p[1:], 1))
    if layered:
        hit = _layer_pigeonhole(fam, k, m)
        if hit is not None:
            return BranchResult(True, hit[0], hit[1], hit[2], 0, True)

    rng = random.Random(seed)
    internal = sorted({v for p in fam.values() for v in p[1:]})
    for attempt in range(1, retries + 1):
        colour = {v: rng.randint(1, k) for v in internal}
        good = {w: p for w, p in fam.items() if all(colour[p[d]] == d for d in range(1, k + 1))}
        if len(good) < m:
            continue
        hit = _layer_pigeonhole(good, k, m)
        if hit is not None:
            return BranchResult(True, hit[0], hit[1], hit[2], attempt, False)
    return BranchResult(False, colorings_tried=retries, layered=layered)


def suffixes_share_only(x: int, suffixes: Sequence[Sequence[int]]) -> bool:
    """Pairwise intersection of every two suffixes is exactly ``{x}``."""
    sets = [set(p) for p in suffixes]
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if sets[i] & sets[j] != {x}:
                return False
    return True
