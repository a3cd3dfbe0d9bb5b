from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from turanlab.errors import DomainError, InputError
from turanlab.graph import (
    build_graph,
    complete_graph,
    cycle_graph,
    degree_stats,
    disjoint_union,
    empty_graph,
    gnp_graph,
    induced_subgraph,
    is_almost_regular,
    path_graph,
    peel_to_min_degree,
    relabel,
    star_graph,
)
from turanlab.io import format_edge_list, from_graph6, parse_edge_list, read_graph, to_graph6, write_graph


@st.composite
def graphs(draw, max_n=12):
    n = draw(st.integers(0, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), max_size=40)) if pairs else []
    return build_graph(edges, n)


def test_build_graph_examples():
    g = build_graph([], 3)
    assert (g.n, g.edge_count) == (3, 0)
    assert build_graph([(0, 1), (1, 0)], 2).edge_count == 1
    c8 = build_graph([(i, (i + 1) % 8) for i in range(8)], 8)
    assert c8.degrees == (2,) * 8 and c8 == cycle_graph(8)


@pytest.mark.parametrize("edges,n", [([(0, 3)], 3), ([(-1, 0)], 2), ([(1, 1)], 2), ([(0, 1, 2)], 3)])
def test_build_graph_rejects(edges, n):
    with pytest.raises(InputError):
        build_graph(edges, n)


def test_degree_stats_examples():
    s = degree_stats(cycle_graph(8))
    assert (s.min_degree, s.max_degree, s.average_degree) == (2, 2, 2)
    s = degree_stats(star_graph(4))
    assert (s.min_degree, s.max_degree, s.average_degree) == (1, 4, Fraction(8, 5))
    s = degree_stats(complete_graph(4))
    assert (s.min_degree, s.max_degree, s.average_degree) == (3, 3, 3)
    with pytest.raises(DomainError):
        degree_stats(empty_graph(0))


def test_almost_regular_examples():
    assert is_almost_regular(cycle_graph(8), 1)
    assert not is_almost_regular(star_graph(4), 2)
    assert is_almost_regular(star_graph(4), 4)


def test_peel_examples():
    assert peel_to_min_degree(complete_graph(4), 3).graph == complete_graph(4)
    assert peel_to_min_degree(path_graph(5), 2).graph.n == 0
    k4_pendant = build_graph(complete_graph(4).edge_list() + [(3, 4)], 5)
    sub = peel_to_min_degree(k4_pendant, 3)
    assert sub.graph == complete_graph(4) and sub.vertices == (0, 1, 2, 3)
    with pytest.raises(InputError):
        peel_to_min_degree(k4_pendant, 0)


def test_induced_examples():
    c8 = cycle_graph(8)
    assert induced_subgraph(c8, range(8)).graph == c8
    p3 = induced_subgraph(c8, [2, 3, 4])
    assert p3.graph == path_graph(3) and p3.vertices == (2, 3, 4)
    assert induced_subgraph(complete_graph(4), [1, 3]).graph.edge_count == 1
    with pytest.raises(InputError):
        induced_subgraph(c8, [9])


@given(graphs())
def test_graph_invariants(g):
    assert g.check_invariants()
    assert sum(g.degrees) == 2 * g.edge_count
    for u, v in g.edges():
        assert u != v and g.has_edge(v, u)


@given(graphs(), st.integers(1, 4))
def test_peel_is_maximal(g, d):
    sub = peel_to_min_degree(g, d)
    h = sub.graph
    if h.n:
        assert h.min_degree >= d
    kept = set(sub.vertices)
    for v in range(g.n):
        if v not in kept:
            # Adding v back alone cannot give it degree >= d.
            assert sum(1 for w in g.neighbors(v) if w in kept) < d
    for u, v in h.edges():
        assert g.has_edge(sub.vertices[u], sub.vertices[v])


@settings(max_examples=60)
@given(st.integers(4, 30), st.floats(0.1, 0.9), st.integers(0, 10_000))
def test_average_degree_forces_core(n, p, seed):
    g = gnp_graph(n, p, seed)
    if g.n == 0 or g.edge_count == 0:
        return
    avg = degree_stats(g).average_degree
    d = int(avg // 2)
    if d >= 1:
        assert peel_to_min_degree(g, d).graph.n > 0


@given(graphs())
def test_relabel_preserves_degrees(g):
    perm = list(reversed(range(g.n)))
    h = relabel(g, perm)
    assert sorted(h.degrees) == sorted(g.degrees) and h.edge_count == g.edge_count


def test_disjoint_union():
    u = disjoint_union(cycle_graph(3), path_graph(2))
    assert (u.n, u.edge_count) == (5, 4) and u.has_edge(3, 4)


def test_edge_list_roundtrip_and_labels(tmp_path):
    g, labels = parse_edge_list("# hello\n a b\n\nb c  # tail\n")
    assert g.n == 3 and g.edge_count == 2 and labels == ["a", "b", "c"]
    g = build_graph([(0, 1)], 4)
    path = tmp_path / "g.el"
    write_graph(path, g)
    assert read_graph(path) == g
    assert "# vertices: 4" in format_edge_list(g)


def test_edge_list_errors():
    with pytest.raises(InputError):
        parse_edge_list("0 1 2\n")
    with pytest.raises(InputError):
        parse_edge_list("3 3\n")


@given(graphs(max_n=20))
def test_graph6_roundtrip(g):
    assert from_graph6(to_graph6(g)) == g


def test_graph6_known_strings(tmp_path):
    assert to_graph6(complete_graph(4)) == "C~"
    assert from_graph6(">>graph6<<C~") == complete_graph(4)
    p = tmp_path / "k4.g6"
    p.write_text("C~\n")
    assert read_graph(p) == complete_graph(4)
    with pytest.raises(InputError):
        from_graph6("C")
