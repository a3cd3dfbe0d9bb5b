"""Exact and heuristic Turán numbers of subdivision patterns at desk scale."""

from __future__ import annotations

import math
import random
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .canon import canonical_code
from .errors import InputError
from .graph import Graph, build_graph, complete_graph
from .subdivision import DEFAULT_BUDGET, PatternSpec, contains_subdivision

EXACT_MAX_N = 9
EXACT, HEURISTIC, DELETION = "exact", "heuristic", "deletion-bound"


@dataclass
class ExtremalRecord:
    n: int
    pattern: PatternSpec
    lo: int | float
    hi: int | float
    witness: Graph | None
    method: str
    stats: dict = field(default_factory=dict)

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    @property
    def value(self):
        return self.lo if self.is_exact else (self.lo, self.hi)

    def to_json(self) -> dict:
        out = {
            "schema": 1,
            "n": self.n,
            "pattern": self.pattern.to_json(),
            "method": self.method,
            "lo": self.lo,
            "hi": self.hi,
            "exact": self.is_exact,
        }
        if self.is_exact:
            out["value"] = self.lo
        if self.witness is not None:
            out["witness_edges"] = [list(e) for e in self.witness.edges()]
        out["stats"] = self.stats
        return out


def _pairs(n: int) -> int:
    return n * (n - 1) // 2


def _free(g: Graph, p: PatternSpec, budget: int):
    """Embedding edges if the pattern is present, None if absent."""
    out = contains_subdivision(g, p, budget)
    if not out.definitive:
        raise InputError(f"containment search exceeded its budget of {budget} nodes on an {g.n}-vertex graph")
    return None if out.embedding is None else sorted(out.embedding.edges())


def exact_ex(
    n: int,
    p: PatternSpec,
    budget: int | None = None,
    max_n: int = EXACT_MAX_N,
    containment_budget: int = DEFAULT_BUDGET,
) -> ExtremalRecord:
    """ex(n, pattern) by deletion search from K_n with isomorph rejection.

    Level ``d`` holds canonical graphs with ``C(n,2) - d`` edges.  A graph
    containing the pattern branches into its copies minus one pattern edge;
    every pattern-free graph stays below some member of every earlier level,
    so the first level with a pattern-free member gives the answer.
    ``budget`` caps the number of graphs examined; running out yields an
    interval whose lower end comes from the heuristic.
    """
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    if n > max_n:
        raise InputError(f"exact search is limited to n <= {max_n}; use heuristic mode for n={n}")
    top = _pairs(n)
    if n < p.min_vertices:
        return ExtremalRecord(n, p, top, top, complete_graph(n), EXACT, {"levels": 0, "graphs": 0})
    level = {canonical_code(complete_graph(n)): complete_graph(n)}
    examined = 0
    for depth in range(top + 1):
        children: dict[int, Graph] = {}
        for code in sorted(level):
            g = level[code]
            if budget is not None and examined >= budget:
                heur = heuristic_lower_bound(n, p, restarts=2, seed=0)
                return ExtremalRecord(n, p, heur.lo, top - depth, heur.witness, EXACT,
                                      {"levels": depth, "graphs": examined, "budget_exhausted": True})
            examined += 1
            copy = _free(g, p, containment_budget)
            if copy is None:
                return ExtremalRecord(n, p, top - depth, top - depth, g, EXACT, {"levels": depth, "graphs": examined})
            edges = g.edge_list()
            for e in copy:
                child = build_graph([f for f in edges if f != e], n)
                children.setdefault(canonical_code(child), child)
        level = children
    raise AssertionError("the empty graph is pattern-free")


def _block_seed(n: int, p: PatternSpec) -> list[tuple[int, int]]:
    """Chain of cliques on ``min_vertices - 1`` vertices glued at cut vertices.

    Every member of the pattern family is 2-connected, so it would have to sit
    inside one block, and every block is too small.
    """
    b = p.min_vertices - 1
    edges = []
    start, nxt = 0, 1
    while nxt < n:
        block = [start] + list(range(nxt, min(n, nxt + b - 1)))
        edges.extend((u, v) for i, u in enumerate(block) for v in block[i + 1:])
        start = block[-1]
        nxt = block[-1] + 1
    return edges


def _local_search(n: int, p: PatternSpec, seed: int, steps: int, tabu_len: int, budget: int) -> list[tuple[int, int]]:
    rng = random.Random(seed)
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    if seed % 2 == 0:
        edges = set(_block_seed(n, p))
    else:
        edges = set()
    perm = list(range(n))
    rng.shuffle(perm)
    edges = {(min(perm[a], perm[b]), max(perm[a], perm[b])) for a, b in edges}

    def copy_with(es) -> list | None:
        return _free(build_graph(es, n), p, budget)

    def saturate(es: set) -> None:
        order = [e for e in pairs if e not in es]
        rng.shuffle(order)
        for e in order:
            if e in tabu:
                continue
            es.add(e)
            if copy_with(es) is not None:
                es.discard(e)

    tabu: list = []
    saturate(edges)
    best = set(edges)
    for _ in range(steps):
        missing = [e for e in pairs if e not in edges and e not in tabu]
        if not missing:
            break
        e = rng.choice(missing)
        edges.add(e)
        copy = copy_with(edges)
        if copy is None:
            best = set(edges) if len(edges) > len(best) else best
            continue
        # Repair swap: drop one pattern edge other than the new one.
        f = rng.choice([x for x in copy if x != e])
        edges.discard(f)
        tabu.append(f)
        if len(tabu) > tabu_len:
            tabu.pop(0)
        if copy_with(edges) is not None:
            edges.add(f)
            edges.discard(e)
            continue
        saturate(edges)
        if len(edges) > len(best):
            best = set(edges)
    return sorted(best)


def _restart(args) -> list[tuple[int, int]]:
    return _local_search(*args)


def heuristic_lower_bound(
    n: int,
    p: PatternSpec,
    restarts: int = 4,
    seed: int = 0,
    steps: int = 150,
    tabu: int = 50,
    workers: int = 1,
    containment_budget: int = DEFAULT_BUDGET,
) -> ExtremalRecord:
    """Best verified pattern-free graph found by randomized local search.

    Restart ``r`` uses seed ``seed + r``; even seeds start from the clique
    chain, odd seeds from the empty graph.  The winner is the largest edge
    count, earliest restart first, so the result does not depend on ``workers``.
    """
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    if restarts < 1:
        raise InputError("restarts must be >= 1")
    top = _pairs(n)
    if n < p.min_vertices:
        return ExtremalRecord(n, p, top, top, complete_graph(n), HEURISTIC, {"restarts": 0})
    jobs = [(n, p, seed + r, steps, tabu, containment_budget) for r in range(restarts)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_restart, jobs))
    else:
        results = [_restart(j) for j in jobs]
    best = max(range(restarts), key=lambda r: (len(results[r]), -r))
    witness = build_graph(results[best], n)
    if _free(witness, p, containment_budget) is not None:
        raise AssertionError("heuristic witness contains the pattern")
    return ExtremalRecord(n, p, witness.edge_count, top, witness, HEURISTIC,
                          {"restarts": restarts, "best_restart": best, "per_restart": [len(r) for r in results]})


@dataclass(frozen=True)
class DeletionBound:
    exponent: Fraction
    value: float

    def to_json(self) -> dict:
        return {"exponent": str(self.exponent), "value": self.value}


def deletion_lower_bound(n: int, p: PatternSpec) -> DeletionBound:
    """Probabilistic-deletion reference line ``n^(2 - (v-2)/(e-1)) / 4``."""
    v, e = p.vertex_count, p.edge_count
    if v < 3 or e < 2:
        raise InputError("pattern too small for the deletion bound")
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    expo = 2 - Fraction(v - 2, e - 1)
    return DeletionBound(expo, n ** float(expo) / 4)


def deletion_record(n: int, p: PatternSpec) -> ExtremalRecord:
    b = deletion_lower_bound(n, p)
    return ExtremalRecord(n, p, b.value, _pairs(n), None, DELETION, {"exponent": str(b.exponent)})


@dataclass(frozen=True)
class ExponentFit:
    fitted_exponent: float
    intercept: float
    conjectured: Fraction
    ns: tuple[int, ...]
    values: tuple[float, ...]
    residuals: tuple[float, ...]
    ratios: tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "fitted_exponent": self.fitted_exponent,
            "conjectured": str(self.conjectured),
            "points": [
                {"n": n, "value": v, "residual": r, "ratio": q}
                for n, v, r, q in zip(self.ns, self.values, self.residuals, self.ratios)
            ],
        }


def exponent_fit(records: Sequence[ExtremalRecord]) -> ExponentFit:
    """Least-squares slope of log(value) against log(n); value is ``lo``."""
    ns = [r.n for r in records]
    if len(set(ns)) < 3 or len(ns) != len(set(ns)):
        raise InputError("exponent_fit needs at least 3 records with distinct n")
    if any(r.lo <= 0 or r.n <= 0 for r in records):
        raise InputError("values and n must be positive for a log-log fit")
    xs = [math.log(r.n) for r in records]
    ys = [math.log(r.lo) for r in records]
    slope, intercept = statistics.linear_regression(xs, ys)
    conj = records[0].pattern.conjectured_exponent
    residuals = tuple(y - (slope * x + intercept) for x, y in zip(xs, ys))
    ratios = tuple(r.lo / r.n ** float(conj) for r in records)
    return ExponentFit(slope, intercept, conj, tuple(ns), tuple(float(r.lo) for r in records), residuals, ratios)
