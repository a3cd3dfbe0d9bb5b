import itertools

import pytest

from turanlab.assembly import (
    PipelineConfig,
    StrongTuple,
    strong_tuples_at,
    assemble_from_strong_center,
    build_from_bipartite_core,
    enumerate_balanced_spiders,
    find_strong_subspider,
    find_subdivision_pipeline,
)
from turanlab.errors import InputError
from turanlab.graph import build_graph, complete_bipartite, cycle_graph, empty_graph, gnp_graph
from turanlab.paths import ThresholdTable, threshold_table
from turanlab.spiders import Spider
from turanlab.subdivision import PatternSpec, plant_subdivision, verify_embedding


def pairwise_disjoint(spiders):
    return all(a.internal_vertices.isdisjoint(b.internal_vertices) for a, b in itertools.combinations(spiders, 2))


# -- strong sub-spiders -----------------------------------------------------------

def test_strong_at_top_level():
    tt = threshold_table(1, 2)
    g = complete_bipartite(2, 32)
    fam = [Spider(c, ((c, 0), (c, 1))) for c in range(2, 34)]
    res = find_strong_subspider(fam, g, tt, 2)
    assert res.found and len(res.trace) == 1
    assert res.certificate.size >= 32 and res.certificate.verify(g)


def test_single_spider_below_threshold():
    tt = threshold_table(1, 2)
    g = complete_bipartite(2, 3)
    res = find_strong_subspider([Spider(2, ((2, 0), (2, 1)))], g, tt, 2)
    assert not res.found and res.reason


def test_funnel_truncates_to_strong_vector():
    # Spiders c_i - u - p and c_i - b: every spider passes through u.
    p, u, b = 0, 1, 2
    centres = list(range(3, 35))
    edges = [(u, p)] + [(c, u) for c in centres] + [(c, b) for c in centres]
    g = build_graph(edges, 35)
    fam = [Spider(c, ((c, u, p), (c, b))) for c in centres]
    tt = threshold_table(1, 2)
    res = find_strong_subspider(fam, g, tt, 2)
    assert res.found
    cert = res.certificate
    assert cert.leaves == (u, b) and cert.lengths == (1, 1) and cert.threshold == 32
    assert cert.size >= 32 and pairwise_disjoint(cert.spiders) and cert.verify(g)
    assert res.trace[0]["pivot"] == u


def test_strong_subspider_inputs():
    tt = threshold_table(1, 2)
    g = complete_bipartite(2, 3)
    with pytest.raises(InputError):
        find_strong_subspider([], g, tt, 2)
    with pytest.raises(InputError):
        find_strong_subspider([Spider(2, ((2, 0), (2, 1))), Spider(3, ((3, 1), (3, 0)))], g, tt, 2)


# -- assembly around a centre --------------------------------------------------------

def planted_tuples(p, seed=0):
    g, emb = plant_subdivision(p.vertex_count + 10, p, 15, seed)
    spiders = [Spider(r, tuple(tuple(reversed(emb.paths[i][j])) for i in range(p.s))) for j, r in enumerate(emb.right)]
    return g, emb, spiders


def test_assemble_full_length_shortcut():
    p = PatternSpec(2, 3, 3)
    g, emb, spiders = planted_tuples(p)
    w = spiders[0].center
    res = assemble_from_strong_center(g, w, [StrongTuple(spiders[0], tuple(spiders))], p)
    assert res.found and verify_embedding(g, p, res.embedding)
    assert res.counts["shortcut"]


def test_assemble_empty_and_matching_failures():
    p = PatternSpec(2, 3, 3)
    g, emb, spiders = planted_tuples(p)
    assert assemble_from_strong_center(g, 0, [], p).stage == "coloring"
    bigger = PatternSpec(2, 30, 3)
    res = assemble_from_strong_center(g, spiders[0].center, [StrongTuple(spiders[0], tuple(spiders))], bigger)
    assert not res.found and res.stage == "matching"
    assert res.to_json()["status"] == "failure"


def test_assemble_short_legs():
    tt = ThresholdTable.from_values([1, 1, 1, 1])
    p = PatternSpec(2, 2, 2)
    found = 0
    for seed in range(6):
        g = gnp_graph(30, 0.35, seed)
        tuples = strong_tuples_at(g, 0, (1, 2), 2, tt, 300)
        assert tuples and all(t.spider.center == 0 for t in tuples)
        res = assemble_from_strong_center(g, 0, tuples, p, tt, seed=seed, retries=30)
        if res.found:
            found += 1
            assert verify_embedding(g, p, res.embedding)
            again = assemble_from_strong_center(g, 0, tuples, p, tt, seed=seed, retries=30)
            assert again.embedding == res.embedding
    assert found == 6


def test_assemble_rejects_mixed_centres():
    p = PatternSpec(2, 2, 2)
    g = complete_bipartite(2, 3)
    a = StrongTuple(Spider(2, ((2, 0), (2, 1))))
    b = StrongTuple(Spider(3, ((3, 0), (3, 1))))
    with pytest.raises(InputError):
        assemble_from_strong_center(g, 2, [a, b], p)


# -- bipartite core -----------------------------------------------------------------

def core_instance(k=2, t=2):
    side = k * t + 1
    U = list(range(side))
    W = list(range(side, 2 * side))
    A = 2 * side
    edges = [(u, w) for u in U for w in W]
    nxt = A + 1
    gadgets = {}
    for u in U:
        c, y = nxt, nxt + 1
        nxt += 2
        edges += [(c, u), (c, y), (y, A)]
        gadgets[u] = Spider(c, ((c, u), (c, y, A)))
    g = build_graph(edges, nxt)
    H = build_graph([(u, w) for u in U for w in W], nxt)
    return g, H, U, W, A, gadgets


def test_core_with_oracle():
    g, H, U, W, A, gadgets = core_instance()
    p = PatternSpec(2, 2, 2)
    res = build_from_bipartite_core(g, H, U, W, (A,), p, strong_oracle=lambda u: [gadgets[u]])
    assert res.found and verify_embedding(g, p, res.embedding)
    assert res.embedding.left[1] == A and res.embedding.left[0] in W


def test_core_without_oracle_searches_directly():
    g, H, U, W, A, _ = core_instance()
    p = PatternSpec(2, 2, 2)
    res = build_from_bipartite_core(g, H, U, W, (A,), p)
    assert res.found and verify_embedding(g, p, res.embedding)


def test_core_peel_failures():
    p = PatternSpec(2, 2, 2)
    g = build_graph([(0, 1), (2, 3)], 5)
    assert build_from_bipartite_core(g, g, [0, 2], [1, 3], (4,), p).stage == "peel"
    c4 = cycle_graph(4)
    g = build_graph(c4.edge_list(), 5)
    assert build_from_bipartite_core(g, g, [0, 2], [1, 3], (4,), p).stage == "peel"
    with pytest.raises(InputError):
        build_from_bipartite_core(g, g, [0, 2], [1, 3], (), p)


# -- pipeline ---------------------------------------------------------------------------

def test_enumerate_balanced_spiders():
    g = complete_bipartite(2, 4)
    buckets, count, exhausted = enumerate_balanced_spiders(g, 2, 1, 10 ** 6)
    assert not exhausted
    assert len(buckets[(0, 1)]) == 4
    # centre 0 with legs to two of the four right vertices, and the same at 1
    assert count == 4 + 2 * 6 + 0
    _, count, exhausted = enumerate_balanced_spiders(g, 2, 1, 3)
    assert exhausted and count == 3


def test_pipeline_planted():
    p = PatternSpec(2, 2, 3)
    for seed in range(3):
        g, _ = plant_subdivision(40, p, 80, seed)
        res = find_subdivision_pipeline(g, p, PipelineConfig(L=3, seed=seed))
        assert res.found and verify_embedding(g, p, res.embedding)
        stages = [t["stage"] for t in res.trace]
        assert stages[:2] == ["regularize", "enumerate"]
        assert set(res.thresholds) >= {"c", "c/2*n*delta^sk", "c/4*n*delta^sk", "C_1"}


def test_pipeline_empty_and_tiny():
    p = PatternSpec(2, 2, 3)
    res = find_subdivision_pipeline(empty_graph(20), p)
    assert res.stage == "enumerate" and res.counts["spiders"] == 0
    out = res.to_json()
    assert out["status"] == "failure" and {"stage", "counts", "thresholds"} <= set(out)
    res = find_subdivision_pipeline(cycle_graph(5), p)
    assert res.stage == "input" and len(res.trace) == 1


def test_pipeline_json_found():
    p = PatternSpec(2, 2, 2)
    g, _ = plant_subdivision(16, p, 10, 4)
    out = find_subdivision_pipeline(g, p).to_json()
    assert out["schema"] == 1 and out["status"] == "found" and "roots" in out
