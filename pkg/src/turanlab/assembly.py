"""Constructive assembly of K_{s,t}^k copies from spider families.

Four procedures, each returning a :class:`BuildResult` that carries either a
verified embedding or the name of the stage that failed:

* :func:`find_strong_subspider` shrinks a same-leaf-vector spider family
  until a disjoint packing reaches the strongness threshold.
* :func:`assemble_from_strong_center` turns many strong tuples around one
  centre into a copy (random colouring, hypergraph cleaning, balanced
  spiders, a matching, then completion spiders).
* :func:`build_from_bipartite_core` grows a copy from a dense bipartite
  graph of (1,k,...,k)-strong leaves.
* :func:`find_subdivision_pipeline` chains regularization, spider
  enumeration, heavy-path filtering, leaf-vector pigeonhole and the above.
"""

from __future__ import annotations

import logging
import math
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import InputError
from .graph import Graph, Subgraph, induced_subgraph, peel_to_min_degree
from .hypergraph import PartiteHypergraph, min_degree_clean
from .paths import PathClassifier, ThresholdTable, threshold_table
from .regularize import RegularizationParams, extract_almost_regular
from .spiders import (
    Spider,
    StrongnessCertificate,
    balanced_spider_from_paths,
    find_spider,
    greedy_disjoint_packing,
    strongness_threshold,
)
from .subdivision import Embedding, PatternSpec, embedding_problems, validate_length_vector

log = logging.getLogger(__name__)


@dataclass
class BuildResult:
    embedding: Embedding | None
    stage: str | None = None  # failed stage; None on success
    counts: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    trace: list[dict] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.embedding is not None

    def to_json(self) -> dict:
        out = {"schema": 1, "status": "found" if self.found else "failure"}
        if self.found:
            out.update(self.embedding.to_json())
        else:
            out["stage"] = self.stage
        out["counts"] = self.counts
        out["thresholds"] = self.thresholds
        out["trace"] = self.trace
        return out


def _fail(stage: str, **counts) -> BuildResult:
    return BuildResult(None, stage, counts)


def _union_embedding(spiders: Sequence[Spider]) -> Embedding:
    """t internally disjoint balanced spiders on one leaf vector form K_{s,t}^k."""
    left = spiders[0].leaf_vector
    paths = tuple(tuple(tuple(reversed(sp.legs[i])) for sp in spiders) for i in range(len(left)))
    return Embedding(tuple(left), tuple(sp.center for sp in spiders), paths)


def _checked(g: Graph, p: PatternSpec, emb: Embedding, stage: str) -> BuildResult:
    problems = embedding_problems(g, p, emb)
    if problems:
        log.debug("assembled embedding rejected: %s", problems)
        return _fail(stage, problems=len(problems))
    return BuildResult(emb)


def _disjoint_choice(masks: Sequence[int], t: int, node_cap: int = 200_000) -> list[int] | None:
    """Indices of ``t`` pairwise disjoint masks, by capped backtracking."""
    order = sorted(range(len(masks)), key=lambda i: (bin(masks[i]).count("1"), i))
    nodes = 0
    chosen: list[int] = []

    def dfs(start: int, used: int) -> bool:
        nonlocal nodes
        if len(chosen) == t:
            return True
        for pos in range(start, len(order) - (t - len(chosen)) + 1):
            nodes += 1
            if nodes > node_cap:
                return False
            i = order[pos]
            if masks[i] & used:
                continue
            chosen.append(i)
            if dfs(pos + 1, used | masks[i]):
                return True
            chosen.pop()
        return False

    return list(chosen) if dfs(0, 0) else None


def _mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


# -- strong sub-spiders -------------------------------------------------------

@dataclass
class StrongSubspiderResult:
    certificate: StrongnessCertificate | None
    member: Spider | None  # a sub-spider of an input spider carrying the certified vectors
    trace: list[dict]
    reason: str = ""

    @property
    def found(self) -> bool:
        return self.certificate is not None

    def to_json(self) -> dict:
        return {
            "found": self.found,
            "certificate": None if self.certificate is None else self.certificate.to_json(),
            "member": None if self.member is None else self.member.to_json(),
            "trace": self.trace,
            "reason": self.reason,
        }


def _maximal_disjoint(spiders: Sequence[Spider]) -> list[Spider]:
    used: set[int] = set()
    out = []
    for sp in spiders:
        inner = sp.internal_vertices
        if used.isdisjoint(inner):
            out.append(sp)
            used |= inner
    return out


def find_strong_subspider(
    spiders: Sequence[Spider], g: Graph, tt: ThresholdTable, k: int, search_graph: bool = True
) -> StrongSubspiderResult:
    """Shrink a spider family (one leaf and length vector) to a strong sub-spider.

    Each round takes a maximal internally disjoint subfamily M.  If M (or a
    greedy packing in ``g`` with the same vectors) reaches the threshold, the
    vectors are strong.  Otherwise the internal vertex of M lying on most
    spiders is taken with its most frequent non-centre position, spiders are
    cut there, and the shorter family is processed the same way.
    """
    fam = list(dict.fromkeys(spiders))
    if not fam:
        raise InputError("find_strong_subspider needs a nonempty family")
    trace: list[dict] = []
    while True:
        leaves, lengths = fam[0].leaf_vector, fam[0].length_vector
        if any(sp.leaf_vector != leaves or sp.length_vector != lengths for sp in fam):
            raise InputError("spiders in the family must share leaf and length vectors")
        s = len(leaves)
        thr = strongness_threshold(s, k, lengths, tt)
        M = _maximal_disjoint(fam)
        step = {"leaves": list(leaves), "lengths": list(lengths), "family": len(fam), "disjoint": len(M),
                "threshold": _fmt_int(thr)}
        trace.append(step)
        if len(M) >= thr:
            return StrongSubspiderResult(StrongnessCertificate(leaves, lengths, M, thr), M[0], trace)
        # Each spider needs its own centre, so more than n disjoint spiders is impossible.
        if search_graph and thr <= g.n:
            pack = greedy_disjoint_packing(g, leaves, lengths, limit=thr, threshold=thr)
            step["packing"] = pack.size
            if pack.strong:
                return StrongSubspiderResult(pack, fam[0], trace)
        if sum(lengths) == s:
            return StrongSubspiderResult(None, None, trace, "all legs have length 1; nothing left to cut")
        hits = Counter(v for sp in fam for v in sp.internal_vertices)
        U = set().union(*(sp.internal_vertices for sp in M))
        u = min(U, key=lambda v: (-hits[v], v))
        roles: Counter = Counter()
        for sp in fam:
            for i, leg in enumerate(sp.legs):
                if u in leg[1:-1]:
                    roles[(i, leg.index(u))] += 1
        if not roles:
            return StrongSubspiderResult(None, None, trace, f"vertex {u} is only ever a centre")
        (i, d) = min(roles, key=lambda r: (-roles[r], r))
        step.update({"pivot": u, "leg": i, "depth": d, "pivot_hits": roles[(i, d)]})
        cut = []
        for sp in fam:
            if len(sp.legs[i]) > d and sp.legs[i][d] == u:
                legs = list(sp.legs)
                legs[i] = legs[i][: d + 1]
                cut.append(Spider(sp.center, tuple(legs)))
        fam = list(dict.fromkeys(cut))


# -- assembly around a strong centre --------------------------------------

@dataclass(frozen=True)
class StrongTuple:
    """A strong leaf vector with a witness spider at the common centre."""

    spider: Spider
    packing: tuple[Spider, ...] = ()

    @property
    def leaves(self) -> tuple[int, ...]:
        return self.spider.leaf_vector


_STAGES = ("coloring", "clean", "spider", "matching", "completion", "verify")


def _hyper_matching(edges: Sequence[tuple[int, ...]], t: int, node_cap: int = 100_000) -> list[tuple[int, ...]] | None:
    masks = [_mask(e) for e in edges]
    pick = _disjoint_choice(masks, t, node_cap)
    return None if pick is None else [edges[i] for i in sorted(pick)]


def assemble_from_strong_center(
    g: Graph,
    w: int,
    strong_tuples: Sequence[StrongTuple],
    p: PatternSpec,
    tt: ThresholdTable | None = None,
    seed: int = 0,
    retries: int = 200,
) -> BuildResult:
    """Build K_{s,t}^k from tuples that are strong with one length vector at centre ``w``.

    Legs are processed shortest first.  Per colouring attempt: keep tuples
    whose i-th leg is coloured i; clean the resulting s-partite hypergraph
    part by part while cutting a balanced spider of height ``k - l_i`` out of
    the i-th legs; match ``t`` tuples (fixing the full-length parts at their
    most popular values first); finally attach one completion spider per
    matched tuple, disjoint from everything else.  ``tt`` is accepted for
    interface symmetry; the tuples already carry their strongness.
    """
    s, t, k = p.s, p.t, p.k
    if not strong_tuples:
        return _fail("coloring", tuples=0)
    lengths = strong_tuples[0].spider.length_vector
    for st in strong_tuples:
        if st.spider.center != w or st.spider.length_vector != lengths or len(lengths) != s:
            raise InputError("every witness must be centred at w with one common length vector of size s")
    order = sorted(range(s), key=lambda i: (lengths[i], i))  # leg order, shortest first
    ell = [lengths[i] for i in order]
    tuples = list({st.leaves: st for st in strong_tuples}.values())

    if all(x == k for x in ell):
        for st in tuples:
            pack = list(st.packing) or greedy_disjoint_packing(g, st.leaves, lengths, limit=t).spiders
            if len(pack) >= t:
                res = _checked(g, p, _union_embedding(pack[:t]), "verify")
                if res.found:
                    res.counts = {"tuples": len(tuples), "shortcut": True}
                    return res
        return _fail("matching", tuples=len(tuples), shortcut=True)

    q = sum(1 for x in ell if x < k)
    mlen = [k - x for x in ell]
    if any(mlen[i] > ell[i] for i in range(q)):
        return _fail("spider", reason="a leg is shorter than k/2")
    rng = random.Random(seed)
    verts = sorted({v for st in tuples for v in st.spider.vertices} - {w})
    reached = 0
    counts: dict = {"tuples": len(tuples), "attempts": 0}
    for attempt in range(retries):
        counts["attempts"] = attempt + 1
        colour = {v: rng.randrange(s) for v in verts}
        good = [st for st in tuples
                if all(colour[v] == pos for pos, i in enumerate(order) for v in st.spider.legs[i][1:])]
        if not good:
            continue
        reached = max(reached, 1)
        legs_of = {}
        for st in good:
            for pos, i in enumerate(order):
                legs_of.setdefault((pos, st.spider.legs[i][-1]), st.spider.legs[i])
        parts = [frozenset(st.spider.legs[i][-1] for st in good) for i in order]
        edges = tuple(sorted({tuple(st.spider.legs[i][-1] for i in order) for st in good}))
        F = PartiteHypergraph(tuple(parts), edges)
        spiders_built: list[Spider] = []
        ok = True
        for pos in range(q):
            alpha = Fraction(len(F), F.volume()) / 2
            F = min_degree_clean(F, pos, alpha)
            if not len(F):
                ok = False
                break
            reached = max(reached, 2)
            alive = sorted(F.degrees(pos))
            bal = balanced_spider_from_paths(g, w, [legs_of[(pos, v)] for v in alive], mlen[pos])
            if bal is None:
                ok = False
                break
            reached = max(reached, 3)
            spiders_built.append(bal.spider)
            F = F.restrict(pos, bal.spider.leaf_vector)
            F = PartiteHypergraph(F.parts[:pos] + (frozenset(bal.spider.leaf_vector),) + F.parts[pos + 1:], F.edges)
        if not ok:
            continue
        if q == s:
            fixed: tuple[int, ...] = ()
            pool = list(F.edges)
        else:
            tails = Counter(e[q:] for e in F.edges)
            fixed = min(tails, key=lambda x: (-tails[x], x))
            pool = [e[:q] for e in F.edges if e[q:] == fixed]
        match = _hyper_matching(pool, t)
        if match is None:
            counts["matching_pool"] = len(pool)
            continue
        reached = max(reached, 4)
        Z = []
        zverts: set[int] = set(fixed)
        for pos in range(q):
            sp = spiders_built[pos]
            keep = [idx for idx, leaf in enumerate(sp.leaf_vector) if leaf in {e[pos] for e in match}]
            Z.append(sp.restrict(keep))
            zverts |= sp.restrict(keep).vertices
        T: list[Spider] = []
        used = set(zverts)
        for e in match:
            leaves_sorted = tuple(e) + fixed
            leaves = [0] * s
            for pos, i in enumerate(order):
                leaves[i] = leaves_sorted[pos]
            blocked = used - set(leaves)
            cand = None
            for st in tuples:
                if st.leaves == tuple(leaves):
                    cand = next((sp for sp in st.packing if not (sp.internal_vertices & blocked)), None)
                    break
            if cand is None:
                cand = find_spider(g, leaves, lengths, blocked)
            if cand is None:
                break
            T.append(cand)
            used |= cand.internal_vertices
        if len(T) < t:
            continue
        reached = max(reached, 5)
        left = [0] * s
        paths = [[()] * t for _ in range(s)]
        for pos, i in enumerate(order):
            for j, (e, sp) in enumerate(zip(match, T)):
                tail = tuple(reversed(sp.legs[i]))  # leaf -> right root
                if pos < q:
                    head = next(leg for leg in Z[pos].legs if leg[-1] == e[pos])
                    paths[i][j] = head + tail[1:]
                    left[i] = Z[pos].center
                else:
                    paths[i][j] = tail
                    left[i] = fixed[pos - q]
        emb = Embedding(tuple(left), tuple(sp.center for sp in T), tuple(tuple(r) for r in paths))
        res = _checked(g, p, emb, "verify")
        if res.found:
            counts["case"] = 1 if q == s else 2
            res.counts = counts
            return res
    return BuildResult(None, _STAGES[reached], counts)


# -- bipartite core ---------------------------------------------------------

def _grow_spider(h: Graph, centre: int, legs: int, height: int, leaf_ok: Callable[[int], bool], blocked: set[int]) -> Spider | None:
    """Greedy (with backtracking) spider with ``legs`` legs of length ``height``."""
    used = set(blocked) | {centre}
    committed: set[int] = set()
    out: list[tuple[int, ...]] = []

    def leg_from(path: list[int]) -> Iterable[tuple[int, ...]]:
        u = path[-1]
        if len(path) - 1 == height:
            if leaf_ok(u):
                yield tuple(path)
            return
        for x in h.neighbors(u):
            if x in used:
                continue
            used.add(x)
            path.append(x)
            yield from leg_from(path)
            path.pop()
            if x not in committed:
                used.discard(x)

    def place_fixed(n_done: int) -> bool:
        if n_done == legs:
            return True
        gen = leg_from([centre])
        for leg in gen:
            snapshot = set(leg[1:])
            out.append(leg)
            committed.update(snapshot)
            if place_fixed(n_done + 1):
                return True
            committed.difference_update(snapshot)
            out.pop()
        return False

    return Spider(centre, tuple(out)) if place_fixed(0) else None


def build_from_bipartite_core(
    g: Graph,
    H: Graph,
    U: Iterable[int],
    W: Iterable[int],
    a: Sequence[int],
    p: PatternSpec,
    strong_oracle: Callable[[int], Iterable[Spider]] | None = None,
    tt: ThresholdTable | None = None,
) -> BuildResult:
    """Copy of K_{s,t}^k from a bipartite graph ``H`` (parts U, W) of strong leaves.

    ``H`` lives on the vertex ids of ``g``.  It is peeled to minimum degree
    ``k t``; a t-legged spider of height ``k - 1`` with leaves ``u_i`` in U is
    grown inside it; each ``u_i`` then receives a (1,k,...,k) spider on leaf
    vector ``(u_i, a_1, ..., a_{s-1})``, taken from ``strong_oracle(u_i)``
    when it offers one that fits, or searched for directly.
    """
    s, t, k = p.s, p.t, p.k
    a = tuple(a)
    if len(a) != s - 1:
        raise InputError(f"expected {s - 1} fixed leaves, got {len(a)}")
    if H.n != g.n:
        raise InputError("H must use the vertex ids of g")
    U, W = set(U), set(W)
    core = peel_to_min_degree(H, k * t)
    if core.graph.n == 0:
        return _fail("peel", min_degree=k * t, H_edges=H.edge_count)
    lift = core.vertices
    local_U = {i for i, v in enumerate(lift) if v in U}
    local_a = {i for i, v in enumerate(lift) if v in a}
    height = k - 1
    centre_side_U = height % 2 == 0
    T = None
    for c in range(core.graph.n):
        if c in local_a or (c in local_U) != centre_side_U:
            continue
        T = _grow_spider(core.graph, c, t, height, lambda v: v in local_U, local_a)
        if T is not None:
            break
    if T is None:
        return _fail("spider", core_vertices=core.graph.n)
    T = Spider(lift[T.center], tuple(tuple(lift[v] for v in leg) for leg in T.legs))
    x = T.center
    used = set(T.vertices)
    lengths = (1,) + (k,) * (s - 1)
    completions: list[Spider] = []
    for leg in T.legs:
        u = leg[-1]
        leaves = (u,) + a
        blocked = used - {u}
        cand = None
        if strong_oracle is not None:
            for sp in strong_oracle(u):
                if sp.leaf_vector == leaves and sp.length_vector == lengths and not (sp.internal_vertices & blocked) \
                        and sp.is_valid(g):
                    cand = sp
                    break
        if cand is None:
            cand = find_spider(g, leaves, lengths, blocked)
        if cand is None:
            return _fail("completion", attached=len(completions))
        completions.append(cand)
        used |= cand.internal_vertices
    paths = [[] for _ in range(s)]
    for leg, sp in zip(T.legs, completions):
        paths[0].append(leg + (sp.center,))
        for j in range(1, s):
            paths[j].append(tuple(reversed(sp.legs[j])))
    emb = Embedding((x,) + a, tuple(sp.center for sp in completions), tuple(tuple(r) for r in paths))
    res = _checked(g, p, emb, "verify")
    res.counts = {"core_vertices": core.graph.n}
    return res


# -- end-to-end pipeline ------------------------------------------------------

@dataclass(frozen=True)
class PipelineConfig:
    L: int = 3
    epsilon: Fraction | None = None  # default 1/k - 1/(sk)
    c: Fraction = Fraction(1)
    enum_budget: int = 500_000
    leaf_vectors: int = 25
    seed: int = 0
    assemble_retries: int = 200
    strong_tuple_cap: int = 2000
    regularize: bool = True

    def to_json(self) -> dict:
        return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in self.__dict__.items()}


def _fmt_int(x: int) -> int | str:
    return x if x.bit_length() <= 53 else f"10^{x.bit_length() * math.log10(2):.1f}"


def _fmt_log10(lg: float) -> float | str:
    return 10 ** lg if lg < 15 else f"10^{lg:.1f}"


def _paths_from(g: Graph, w: int, length: int) -> list[tuple[int, ...]]:
    out = []
    path = [w]
    on = {w}

    def walk():
        if len(path) - 1 == length:
            out.append(tuple(path))
            return
        for x in g.neighbors(path[-1]):
            if x not in on:
                on.add(x)
                path.append(x)
                walk()
                path.pop()
                on.discard(x)

    walk()
    return out


def enumerate_balanced_spiders(g: Graph, s: int, k: int, budget: int):
    """Balanced s-legged spiders of height k, grouped by sorted leaf vector.

    Returns ``(buckets, count, exhausted)`` with ``buckets[leaves]`` a list of
    spiders whose legs are ordered by leaf.  Stops after ``budget`` spiders.
    """
    buckets: dict[tuple[int, ...], list[Spider]] = defaultdict(list)
    count = 0
    for w in range(g.n):
        paths = sorted(_paths_from(g, w, k), key=lambda P: (P[-1], P))
        masks = [_mask(P[1:]) for P in paths]
        chosen: list[int] = []

        def combos(start: int, used: int):
            nonlocal count
            if len(chosen) == s:
                legs = tuple(paths[i] for i in chosen)
                buckets[tuple(P[-1] for P in legs)].append(Spider(w, legs))
                count += 1
                return count >= budget
            last_leaf = paths[chosen[-1]][-1] if chosen else -1
            for i in range(start, len(paths)):
                if paths[i][-1] == last_leaf or masks[i] & used:
                    continue
                chosen.append(i)
                stop = combos(i + 1, used | masks[i])
                chosen.pop()
                if stop:
                    return True
            return False

        if combos(0, 0):
            return buckets, count, True
    return buckets, count, False


def _has_heavy_tree_path(sp: Spider, pc: PathClassifier, k: int) -> bool:
    return any(pc.path_is_heavy(P) for P in sp.tree_paths(k))


def strong_tuples_at(g: Graph, w: int, lengths: tuple[int, ...], k: int, tt: ThresholdTable, cap: int) -> list[StrongTuple]:
    """Leaf vectors strong with the given lengths that have a witness at ``w``."""
    s = len(lengths)
    thr = strongness_threshold(s, k, lengths, tt)
    if thr > g.n:
        return []
    by_len = {ell: _paths_from(g, w, ell) for ell in set(lengths)}
    out: list[StrongTuple] = []
    seen: set[tuple[int, ...]] = set()

    def rec(i: int, legs: list, used: set[int]):
        if len(out) >= cap:
            return
        if i == s:
            sp = Spider(w, tuple(legs))
            if sp.leaf_vector in seen:
                return
            seen.add(sp.leaf_vector)
            pack = greedy_disjoint_packing(g, sp.leaf_vector, lengths, limit=thr, threshold=thr)
            if pack.strong:
                out.append(StrongTuple(sp, tuple(pack.spiders)))
            return
        for P in by_len[lengths[i]]:
            if used.isdisjoint(P[1:]):
                legs.append(P)
                rec(i + 1, legs, used | set(P[1:]))
                legs.pop()

    rec(0, [], set())
    return out


def find_subdivision_pipeline(g: Graph, p: PatternSpec, config: PipelineConfig | None = None) -> BuildResult:
    """Constructive search on ``g``: stage thresholds are logged, not enforced."""
    cfg = config or PipelineConfig()
    s, k = p.s, p.k
    tt = threshold_table(cfg.L, max(k, 2))
    trace: list[dict] = []
    thresholds: dict = {}
    if g.n < p.vertex_count:
        trace.append({"stage": "input", "n": g.n, "pattern_vertices": p.vertex_count})
        return BuildResult(None, "input", {"n": g.n}, thresholds, trace)
    if g.edge_count == 0:
        trace.append({"stage": "enumerate", "spiders": 0})
        return BuildResult(None, "enumerate", {"spiders": 0}, thresholds, trace)

    hosts: list[tuple[str, Subgraph]] = []
    if cfg.regularize:
        eps = cfg.epsilon if cfg.epsilon is not None else Fraction(1, k) - Fraction(1, s * k)
        reg = extract_almost_regular(g, RegularizationParams(eps, cfg.c))
        trace.append({"stage": "regularize", **{key: reg.to_json()[key] for key in
                                                ("m", "edges", "K_target", "K_achieved", "bounds_met", "fallback")}})
        hosts.append(("regularized", reg.subgraph))
    full = induced_subgraph(g, range(g.n))
    if not hosts or hosts[0][1].graph.n != g.n or hosts[0][1].graph.edge_count != g.edge_count:
        hosts.append(("input", full))

    last = BuildResult(None, "enumerate", {}, thresholds, trace)
    for name, sub in hosts:
        res = _pipeline_on(sub.graph, p, cfg, tt, trace, thresholds, name)
        if res.found:
            lift = sub.vertices
            e = res.embedding
            emb = Embedding(tuple(lift[v] for v in e.left), tuple(lift[v] for v in e.right),
                            tuple(tuple(tuple(lift[v] for v in P) for P in row) for row in e.paths))
            out = _checked(g, p, emb, "verify")
            assert out.found, "pipeline produced an invalid embedding"
            out.counts, out.thresholds, out.trace = res.counts, thresholds, trace
            return out
        last = res
    last.trace, last.thresholds = trace, thresholds
    return last


def _pipeline_on(h: Graph, p: PatternSpec, cfg: PipelineConfig, tt: ThresholdTable,
                 trace: list, thresholds: dict, host: str) -> BuildResult:
    s, t, k = p.s, p.t, p.k
    n = h.n
    delta = h.min_degree
    c = Fraction(1, math.factorial(s))
    lg_nd = math.log10(n) + s * k * math.log10(delta) if delta > 0 else -math.inf
    lg_c = math.log10(c)
    thresholds.update({
        "c": str(c),
        "c/2*n*delta^sk": _fmt_log10(lg_c - math.log10(2) + lg_nd),
        "c/4*n*delta^sk": _fmt_log10(lg_c - math.log10(4) + lg_nd),
        "C_1": _fmt_log10(s * k * (s * k * math.log10(s * k) + 2 * tt.log2_lower(k) * math.log10(2))),
    })
    buckets, count, exhausted = enumerate_balanced_spiders(h, s, k, cfg.enum_budget)
    trace.append({"stage": "enumerate", "host": host, "spiders": count, "budget_exhausted": exhausted})
    if count == 0:
        return _fail("enumerate", spiders=0)

    pc = PathClassifier(h, tt)
    if pc.heavy_possible(k):
        kept = {}
        for key, fam in buckets.items():
            light = [sp for sp in fam if not _has_heavy_tree_path(sp, pc, k)]
            if light:
                kept[key] = light
        buckets = kept
        filtered = sum(len(f) for f in buckets.values())
    else:
        filtered = count
    trace.append({"stage": "filter", "host": host, "kept": filtered, "heavy_possible": pc.heavy_possible(k)})
    if not buckets:
        return _fail("filter", kept=0)

    ranked = sorted(buckets, key=lambda key: (-len(buckets[key]), key))[: cfg.leaf_vectors]
    trace.append({"stage": "pigeonhole", "host": host, "leaf_vectors": len(buckets),
                  "top": [{"leaves": list(key), "spiders": len(buckets[key])} for key in ranked[:5]]})
    best_stage = "pigeonhole"
    for key in ranked:
        fam = buckets[key]
        pick = _disjoint_choice([_mask(sp.internal_vertices) for sp in fam], t)
        if pick is not None:
            trace.append({"stage": "disjoint", "host": host, "leaves": list(key), "family": len(fam)})
            return BuildResult(_union_embedding([fam[i] for i in pick]), counts={"spiders": count, "family": len(fam)})
        sub = find_strong_subspider(fam, h, tt, k)
        if not sub.found:
            continue
        best_stage = "strong"
        cert = sub.certificate
        lengths = cert.lengths
        verdict = validate_length_vector(lengths, k)
        trace.append({"stage": "strong", "host": host, "leaves": list(cert.leaves), "lengths": list(lengths),
                      "size": cert.size, "length_vector": verdict.status})
        if all(x == k for x in lengths) and cert.size >= t:
            return BuildResult(_union_embedding(cert.spiders[:t]), counts={"spiders": count, "family": len(fam)})
        w = sub.member.center
        tuples = strong_tuples_at(h, w, lengths, k, tt, cfg.strong_tuple_cap)
        res = assemble_from_strong_center(h, w, tuples, p, tt, seed=cfg.seed, retries=cfg.assemble_retries)
        trace.append({"stage": "assemble", "host": host, "centre": w, "tuples": len(tuples),
                      "result": "found" if res.found else res.stage})
        if res.found:
            return res
        best_stage = "assemble"
    return _fail(best_stage, spiders=count, leaf_vectors=len(buckets))
