"""Extraction of a K-almost-regular subgraph from a dense host graph.

Dyadic degree-class strategy: while ``max_degree > K * min_degree``, split
the current vertices into classes ``[2^i d0, 2^(i+1) d0)`` by current degree,
keep the union of the two classes (or one class) spanning the most edges, and
drop isolated vertices.  The loop is capped at ``ceil(log2 n)`` rounds; if it
still fails, the densest passing fallback is returned (a k-core that passes,
or a single edge), so the ratio postcondition is never violated.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError, InputError
from .graph import Graph, Subgraph, drop_isolated, induced_subgraph, peel_to_min_degree

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RegularizationParams:
    epsilon: Fraction
    c: Fraction = Fraction(1)

    def __post_init__(self):
        eps, c = Fraction(self.epsilon), Fraction(self.c)
        if not 0 < eps < 1:
            raise InputError(f"epsilon must lie in (0, 1), got {eps}")
        if c < 1:
            raise InputError(f"c must be >= 1, got {c}")
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "c", c)

    @property
    def K_target(self) -> int | float:
        """``20 * 2^(1/eps^2 + 1)``; exact when the exponent is an integer."""
        e = 1 / self.epsilon ** 2 + 1
        if e.denominator == 1:
            return 20 * 2 ** int(e)
        try:
            return 20 * 2.0 ** float(e)
        except OverflowError:
            return math.inf


@dataclass(frozen=True)
class RegularizationResult:
    subgraph: Subgraph
    K_target: int | float
    K_achieved: Fraction
    density_ratio: float
    precondition_met: bool
    edge_bound_met: bool
    size_bound_met: bool
    rounds: int
    fallback: str | None = None
    trace: list[dict] = field(default_factory=list)

    @property
    def graph(self) -> Graph:
        return self.subgraph.graph

    @property
    def m(self) -> int:
        return self.subgraph.graph.n

    @property
    def bounds_met(self) -> bool:
        return self.edge_bound_met and self.size_bound_met

    def to_json(self) -> dict:
        K = self.K_target
        return {
            "m": self.m,
            "edges": self.graph.edge_count,
            "K_target": "inf" if isinstance(K, float) and math.isinf(K) else K,
            "K_achieved": float(self.K_achieved),
            "density_ratio": self.density_ratio,
            "bounds_met": {
                "precondition": self.precondition_met,
                "edges": self.edge_bound_met,
                "vertices": self.size_bound_met,
            },
            "rounds": self.rounds,
            "fallback": self.fallback,
            "vertices": list(self.subgraph.vertices),
        }


def _ratio_ok(g: Graph, K: int | float) -> bool:
    if g.n == 0:
        return False
    lo, hi = g.min_degree, g.max_degree
    if lo == 0:
        return hi == 0
    return hi <= K * lo


def _compose(outer: Subgraph, inner: Subgraph) -> Subgraph:
    return Subgraph(inner.graph, tuple(outer.vertices[v] for v in inner.vertices))


def _density(g: Graph, eps: Fraction) -> float:
    if g.n == 0:
        return 0.0
    return g.edge_count / g.n ** (1 + float(eps))


def _dyadic_step(g: Graph) -> Subgraph:
    d0 = g.min_degree
    classes: dict[int, list[int]] = {}
    for v in range(g.n):
        i = int(math.floor(math.log2(g.degree(v) / d0)))
        classes.setdefault(i, []).append(v)
    keys = sorted(classes)
    best = None
    for a_pos, a in enumerate(keys):
        for b in keys[a_pos:]:
            verts = set(classes[a]) | set(classes[b])
            kept = sum(1 for u, v in g.edges() if u in verts and v in verts)
            if best is None or kept > best[0]:
                best = (kept, verts)
    return _restrict(g, best[1])


def _restrict(g: Graph, vertices) -> Subgraph:
    sub = induced_subgraph(g, vertices)
    return _compose(sub, drop_isolated(sub.graph))


def extract_almost_regular(g: Graph, params: RegularizationParams) -> RegularizationResult:
    if g.n == 0:
        raise DomainError("cannot regularize the empty graph")
    eps, c = params.epsilon, params.c
    K = params.K_target
    n = g.n
    precondition = g.edge_count >= float(c) * n ** (1 + float(eps))
    if not precondition:
        log.info("density precondition fails: e=%d < c*n^(1+eps)", g.edge_count)

    current = drop_isolated(g)
    trace = [{"round": 0, "m": current.graph.n, "edges": current.graph.edge_count}]
    cap = max(1, math.ceil(math.log2(n))) if n > 1 else 1
    rounds = 0
    fallback = None
    while current.graph.n and current.graph.edge_count and not _ratio_ok(current.graph, K) and rounds < cap:
        current = _compose(current, _dyadic_step(current.graph))
        rounds += 1
        trace.append({"round": rounds, "m": current.graph.n, "edges": current.graph.edge_count})

    if current.graph.edge_count == 0 or not _ratio_ok(current.graph, K):
        current, fallback = _fallback(g, K, eps)

    out = current.graph
    assert _ratio_ok(out, K), "almost-regular postcondition violated"
    K_achieved = Fraction(out.max_degree, out.min_degree) if out.min_degree else Fraction(1)
    m = out.n
    edge_bound = out.edge_count >= float(2 * c / 5) * m ** (1 + float(eps))
    size_bound = m >= n ** (float(eps - eps ** 2) / float(2 + 2 * eps))
    if precondition and not (edge_bound and size_bound):
        log.warning("bounds not met on a graph satisfying the precondition (m=%d, e=%d)", m, out.edge_count)
    return RegularizationResult(
        subgraph=current,
        K_target=K,
        K_achieved=K_achieved,
        density_ratio=_density(out, eps),
        precondition_met=precondition,
        edge_bound_met=edge_bound,
        size_bound_met=size_bound,
        rounds=rounds,
        fallback=fallback,
        trace=trace,
    )


def _fallback(g: Graph, K, eps) -> tuple[Subgraph, str]:
    best: tuple[float, Subgraph] | None = None
    d = 1
    while True:
        core = peel_to_min_degree(g, d)
        if core.graph.n == 0:
            break
        if _ratio_ok(core.graph, K):
            score = _density(core.graph, eps)
            if best is None or score > best[0]:
                best = (score, core)
        d += 1
    if best is not None:
        return best[1], "core"
    edge = next(g.edges(), None)
    if edge is None:
        return induced_subgraph(g, [0]), "single-vertex"
    return induced_subgraph(g, edge), "single-edge"
