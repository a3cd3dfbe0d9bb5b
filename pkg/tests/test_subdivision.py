import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from turanlab.errors import InputError
from turanlab.graph import build_graph, complete_bipartite, complete_graph, cycle_graph, gnp_graph, path_graph
from turanlab.subdivision import (
    ABSENT,
    ADMISSIBLE,
    ADMISSIBLE_1K,
    AT_MOST,
    BUDGET_EXHAUSTED,
    INADMISSIBLE,
    Embedding,
    PatternSpec,
    contains_subdivision,
    embedding_problems,
    is_pattern_free,
    pattern_graph,
    plant_subdivision,
    validate_length_vector,
    verify_embedding,
)

C8 = PatternSpec(2, 2, 2)


def test_pattern_spec():
    p = PatternSpec(2, 3, 4)
    assert p.vertex_count == 2 + 3 + 6 * 3 and p.edge_count == 24
    assert PatternSpec(2, 2, 2).conjectured_exponent == pytest.approx(1.25)
    assert PatternSpec(2, 2, 3, AT_MOST).min_vertices == 4
    for bad in [(1, 2, 2), (2, 1, 2), (2, 2, 1)]:
        with pytest.raises(InputError):
            PatternSpec(*bad)
    with pytest.raises(InputError):
        PatternSpec(2, 2, 2, "sometimes")


def test_containment_examples():
    out = contains_subdivision(cycle_graph(8), C8)
    assert out.found and verify_embedding(cycle_graph(8), C8, out.embedding)
    assert contains_subdivision(complete_graph(7), C8).status == ABSENT
    out = contains_subdivision(complete_bipartite(4, 4), C8)
    assert out.found and verify_embedding(complete_bipartite(4, 4), C8, out.embedding)


def test_budget_is_a_third_outcome():
    g = gnp_graph(12, 0.5, seed=3)
    out = contains_subdivision(g, PatternSpec(2, 3, 2), budget=1)
    assert out.status in (BUDGET_EXHAUSTED, "found")
    assert not out.definitive or out.found
    with pytest.raises(InputError):
        contains_subdivision(g, C8, budget=0)
    big = gnp_graph(16, 0.4, seed=1)
    assert contains_subdivision(big, PatternSpec(3, 3, 2), budget=1).status == BUDGET_EXHAUSTED
    with pytest.raises(InputError):
        is_pattern_free(big, PatternSpec(3, 3, 2), budget=1)


def test_verify_examples():
    g, emb = plant_subdivision(20, C8, 10, seed=2)
    assert verify_embedding(g, C8, emb)
    # two paths share an interior vertex
    p0 = emb.paths[0][0]
    paths = [list(map(list, row)) for row in emb.paths]
    paths[1][1][1] = p0[1]
    bad = Embedding(emb.left, emb.right, tuple(tuple(map(tuple, row)) for row in paths))
    assert not verify_embedding(g, C8, bad)
    # a non-edge step
    cyc = cycle_graph(8)
    e = Embedding((0, 4), (2, 6), (((0, 1, 2), (0, 7, 6)), ((4, 3, 2), (4, 5, 6))))
    assert verify_embedding(cyc, C8, e)
    e2 = Embedding((0, 4), (2, 6), (((0, 1, 2), (0, 7, 6)), ((4, 3, 2), (4, 1, 6))))
    assert not verify_embedding(cyc, C8, e2)
    assert any("non-edge" in msg for msg in embedding_problems(cyc, C8, e2))
    assert not verify_embedding(cyc, C8, Embedding((0,), (1,), ()))


def test_embedding_json_roundtrip():
    g, emb = plant_subdivision(30, PatternSpec(2, 3, 3), 5, seed=1)
    again = Embedding.from_json(emb.to_json())
    assert again == emb and emb.to_json()["schema"] == 1
    with pytest.raises(InputError):
        Embedding.from_json({"roots": {}})


def test_plant_examples():
    g, emb = plant_subdivision(8, C8, 0, seed=5)
    assert g.edge_count == 8 and all(d == 2 for d in g.degrees)
    assert contains_subdivision(g, C8).found
    with pytest.raises(InputError):
        plant_subdivision(7, C8, 0)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([(2, 2, 2), (2, 3, 2), (2, 2, 3), (3, 2, 2)]), st.integers(0, 30), st.integers(0, 10 ** 6))
def test_planted_always_found(params, noise, seed):
    p = PatternSpec(*params)
    g, emb = plant_subdivision(p.vertex_count + 6, p, noise, seed)
    assert verify_embedding(g, p, emb)
    out = contains_subdivision(g, p)
    assert out.status != ABSENT
    if out.found:
        assert verify_embedding(g, p, out.embedding)


def test_pattern_graph_contains_itself():
    for params in [(2, 2, 2), (2, 3, 3), (3, 3, 2)]:
        p = PatternSpec(*params)
        h, emb = pattern_graph(p)
        assert h.n == p.vertex_count and h.edge_count == p.edge_count
        assert verify_embedding(h, p, emb)


def test_oracle_equivalence_random_graphs():
    rng = random.Random(2024)
    disagreements = []
    for i in range(500):
        n = rng.randint(4, 12)
        g = gnp_graph(n, rng.uniform(0.15, 0.6), rng.randrange(10 ** 6))
        out = contains_subdivision(g, C8)
        if not out.definitive:
            continue
        ref = oracles.contains_subdivision_ref(g.n, g.edge_list(), 2, 2, 2)
        if out.found != ref:
            disagreements.append(g.edge_list())
    assert not disagreements


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 8), st.floats(0.2, 0.8), st.integers(0, 10 ** 6))
def test_at_most_mode_matches_oracle(n, p, seed):
    g = gnp_graph(n, p, seed)
    pat = PatternSpec(2, 2, 2, AT_MOST)
    out = contains_subdivision(g, pat)
    assert out.found == oracles.contains_subdivision_ref(g.n, g.edge_list(), 2, 2, 2, at_most=True)
    if out.found:
        assert verify_embedding(g, pat, out.embedding)


def test_at_most_contains_c4():
    pat = PatternSpec(2, 2, 3, AT_MOST)
    assert contains_subdivision(cycle_graph(4), pat).found
    assert not contains_subdivision(path_graph(10), pat).found


def test_length_vector_examples():
    assert validate_length_vector((3, 3, 3), 3).status == ADMISSIBLE
    v = validate_length_vector((1, 1, 3), 3)
    assert v.status == INADMISSIBLE and "k + 1" in v.reason
    assert validate_length_vector((3, 1, 3), 3).status == ADMISSIBLE_1K
    with pytest.raises(InputError):
        validate_length_vector((0, 2), 2)
    with pytest.raises(InputError):
        validate_length_vector((5, 2), 4)


def test_length_vector_exhaustive():
    cases = 0
    for k in range(2, 5):
        for s in range(2, 5):
            for lv in itertools.product(range(1, k + 1), repeat=s):
                cases += 1
                a, b = sorted(lv)[:2]
                first = a + b >= k + 1
                special = k in (3, 4) and sorted(lv) == [1] + [k] * (s - 1)
                second = k not in (3, 4) or a >= k / 2 or special
                got = validate_length_vector(lv, k).status
                if not (first and second):
                    assert got == INADMISSIBLE
                elif special:
                    assert got == ADMISSIBLE_1K
                else:
                    assert got == ADMISSIBLE
    assert cases == sum(k ** s for k in range(2, 5) for s in range(2, 5))


def test_small_graph_too_small():
    g = build_graph([(0, 1)], 7)
    assert contains_subdivision(g, C8).status == ABSENT
