import itertools
import json
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from grassnp.graphs import (
    Graph, GraphError, clique_number, find_k_clique, generate, has_k_clique, load_graph,
    max_clique, parse_graph, stability_number,
)


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(1, g.n + 1))
    h.add_edges_from(g.edges)
    return h


def nx_clique_number(g):
    return max(len(c) for c in nx.find_cliques(to_nx(g)))


@st.composite
def graphs(draw, nmax=10):
    n = draw(st.integers(1, nmax))
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph(n, frozenset(p for p, keep in zip(pairs, mask) if keep))


def test_parse_triangle():
    g = parse_graph("3 3\n1 2\n2 3\n1 3")
    assert g == generate("complete", 3)


def test_parse_empty():
    g = parse_graph("4 0")
    assert g.n == 4 and g.m == 0


@pytest.mark.parametrize("text, fragment", [
    ("2 1\n1 1", "line 2: self-loop"),
    ("3 2\n1 2\n2 1", "line 3: duplicate"),
    ("3 1\n1 4", "line 2: endpoint out of range"),
    ("3 1\n1 x", "line 2: expected two integers"),
    ("3 2\n1 2", "announces 2 edges"),
    ("", "empty input"),
])
def test_parse_errors_name_the_line(text, fragment):
    with pytest.raises(GraphError, match=fragment):
        parse_graph(text)


def test_parse_skips_comments_and_orients_edges():
    g = parse_graph("# triangle minus one\n3 2\n2 1\n\n3 2\n")
    assert g.sorted_edges() == [(1, 2), (2, 3)]


def test_graph_rejects_bad_edges():
    with pytest.raises(GraphError):
        Graph(3, frozenset({(1, 1)}))
    with pytest.raises(GraphError):
        Graph(3, frozenset({(1, 5)}))
    with pytest.raises(GraphError):
        Graph.from_edges(3, [(1, 2), (2, 1)])


def test_json_round_trip(tmp_path):
    g = generate("petersen")
    path = tmp_path / "p.json"
    path.write_text(json.dumps(g.to_json_dict()))
    assert load_graph(path) == g
    txt = tmp_path / "p.txt"
    txt.write_text(g.to_edge_list())
    assert load_graph(txt) == g


@pytest.mark.parametrize("g, omega", [
    (generate("complete", 5), 5),
    (generate("cycle", 5), 2),
    (generate("petersen"), 2),
    (generate("empty", 4), 1),
    (generate("path", 1), 1),
])
def test_clique_number_examples(g, omega):
    assert clique_number(g) == omega
    assert len(max_clique(g)) == omega
    assert g.is_clique(max_clique(g))


@pytest.mark.parametrize("g, alpha", [
    (generate("complete", 4), 1),
    (generate("empty", 6), 6),
    (generate("cycle", 5), 2),
    (generate("petersen"), 4),
])
def test_stability_number_examples(g, alpha):
    assert stability_number(g) == alpha


def test_has_k_clique_examples():
    assert has_k_clique(generate("complete", 3), 3)
    assert not has_k_clique(generate("cycle", 5), 3)
    for g in (generate("empty", 3), generate("cycle", 4), generate("petersen")):
        assert has_k_clique(g, 1)
    with pytest.raises(GraphError):
        has_k_clique(generate("cycle", 5), 6)
    with pytest.raises(GraphError):
        has_k_clique(generate("cycle", 5), 0)


def test_generate_examples():
    assert generate("complete", 4).m == 6
    assert generate("cycle", 5).m == 5
    assert generate("path", 5).m == 4
    assert generate("petersen").m == 15
    a = generate("gnp", 8, Fraction(1, 2), seed=7)
    b = generate("gnp", 8, "1/2", seed=7)
    assert a == b and a.edges == b.edges


def test_gnp_edge_set_is_frozen():
    # regression value: the PCG64 raw stream makes this edge set stable
    g = generate("gnp", 6, Fraction(1, 2), seed=3)
    assert g.sorted_edges() == [(1, 2), (1, 3), (1, 6), (2, 3), (2, 4), (2, 5),
                                (3, 4), (3, 5), (4, 5)]
    assert g == generate("gnp", 6, (1, 2), seed=3)
    assert generate("gnp", 6, 0, seed=3).m == 0
    assert generate("gnp", 6, 1, seed=3).m == 15


def test_gnp_frequency_matches_p():
    total = sum(generate("gnp", 20, Fraction(1, 3), seed=s).m for s in range(20))
    assert abs(total / (20 * 190) - 1 / 3) < 0.03


@pytest.mark.parametrize("family, kw", [
    ("cycle", {"n": 2}), ("complete", {"n": 0}), ("gnp", {"n": 4}),
    ("gnp", {"n": 4, "p": Fraction(3, 2)}), ("star", {"n": 3}),
])
def test_generate_rejects_bad_params(family, kw):
    with pytest.raises(GraphError):
        generate(family, **kw)


def test_oracle_size_cap():
    with pytest.raises(GraphError):
        clique_number(generate("empty", 30))


@settings(max_examples=150, deadline=None)
@given(graphs())
def test_complement_is_an_involution(g):
    assert g.complement().complement() == g


@settings(max_examples=150, deadline=None)
@given(graphs())
def test_clique_and_stability_are_dual(g):
    assert clique_number(g) == stability_number(g.complement())


@settings(max_examples=150, deadline=None)
@given(graphs())
def test_clique_number_matches_networkx(g):
    assert clique_number(g) == nx_clique_number(g)


@settings(max_examples=100, deadline=None)
@given(graphs(nmax=9))
def test_has_k_clique_agrees_with_clique_number(g):
    omega = clique_number(g)
    for k in range(1, g.n + 1):
        assert has_k_clique(g, k) == (k <= omega)
        c = find_k_clique(g, k)
        assert (c is not None) == (k <= omega)
        if c is not None:
            assert len(c) == k and g.is_clique(c)
