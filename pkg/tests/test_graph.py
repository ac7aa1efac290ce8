import math
import random

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from genuspls.graph import (
    DisconnectedGraphError,
    DuplicateEdgeError,
    DuplicateVertexError,
    Graph,
    LoopError,
    MalformedLineError,
    bfs_tree,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    degeneracy_order,
    edge_key,
    format_graph,
    heawood_bound,
    parse_graph,
    path_graph,
    reroot,
    star_graph,
    tree_from_edges,
)

from strategies import connected_graphs


def test_parse_path():
    g = parse_graph("graph 3 2\nv 1\nv 2\nv 3\ne 1 2\ne 2 3\n")
    assert g.vertices == (1, 2, 3)
    assert g.sorted_edges == ((1, 2), (2, 3))
    assert g.is_tree()


@pytest.mark.parametrize("text, err", [
    ("graph 1 1\nv 5\ne 5 5\n", LoopError),
    ("graph 4 2\nv 1\nv 2\nv 3\nv 4\ne 1 2\ne 3 4\n", DisconnectedGraphError),
    ("graph 2 2\nv 1\nv 2\ne 1 2\ne 2 1\n", DuplicateEdgeError),
    ("graph 2 1\nv 1\nv 1\ne 1 2\n", DuplicateVertexError),
    ("graph 2 1\nv 1\nv 2\ne 1 x\n", MalformedLineError),
    ("v 1\n", MalformedLineError),
    ("graph 3 1\nv 1\nv 2\ne 1 2\n", MalformedLineError),
    ("graph 2 1\nv 1\nv 2\ne 1 3\n", MalformedLineError),
    ("graph 1 0\nv 0\n", MalformedLineError),
])
def test_parse_errors(text, err):
    with pytest.raises(err):
        parse_graph(text)


def test_comments_and_blank_lines():
    g = parse_graph("# triangle\n\ngraph 3 3\nv 1\nv 2\nv 3\ne 1 2\ne 2 3\ne 1 3\n")
    assert g == cycle_graph(3)


@given(connected_graphs())
def test_format_round_trip(g):
    assert parse_graph(format_graph(g)) == g


def test_graph_rejects_bad_construction():
    with pytest.raises(LoopError):
        Graph.from_edges([(1, 1)])
    with pytest.raises(DisconnectedGraphError):
        Graph.from_edges([(1, 2)], vertices=[1, 2, 3])


def test_generators():
    assert complete_graph(5).m == 10
    assert complete_bipartite(3, 3).m == 9
    assert star_graph(6).n == 7 and star_graph(6).degree(1) == 6
    assert path_graph(4).is_tree()
    assert edge_key(5, 2) == (2, 5)


@pytest.mark.parametrize("g, k", [
    (cycle_graph(8), 2),
    (complete_graph(5), 4),
    (star_graph(6), 1),
])
def test_degeneracy_examples(g, k):
    assert degeneracy_order(g)[1] == k


def _back_degrees(g, order):
    pos = {v: i for i, v in enumerate(order)}
    return max(sum(pos[u] < pos[v] for u in g.neighbors(v)) for v in g.vertices)


@given(connected_graphs(max_n=10))
def test_degeneracy_matches_core_number(g):
    """Ordering witnesses k, and k equals the maximum core number."""
    order, k = degeneracy_order(g)
    assert sorted(order) == list(g.vertices)
    assert _back_degrees(g, order) <= k
    h = nx.Graph(list(g.edges))
    h.add_nodes_from(g.vertices)
    assert k == max(nx.core_number(h).values())


@pytest.mark.parametrize("g, k", [(0, 5), (1, 5), (2, 6), (3, 6), (4, 7)])
def test_heawood_values(g, k):
    assert heawood_bound(g) == k


@given(st.integers(0, 10**6))
def test_heawood_matches_float_formula(g):
    x = (5 + math.sqrt(1 + 24 * g)) / 2
    if abs(x - round(x)) > 1e-9:  # away from integers the float floor is reliable
        assert heawood_bound(g) == max(5, math.floor(x))


def test_heawood_negative():
    with pytest.raises(ValueError):
        heawood_bound(-1)


def test_bfs_examples():
    t = bfs_tree(path_graph(3), 1)
    assert t.parent == {2: 1, 3: 2} and t.depth == {1: 0, 2: 1, 3: 2}
    t = bfs_tree(complete_graph(5), 1)
    assert set(t.parent.values()) == {1} and [t.depth[v] for v in range(1, 6)] == [0, 1, 1, 1, 1]
    assert bfs_tree(cycle_graph(4), 1).depth[3] == 2


def test_reroot_examples():
    p3 = path_graph(3)
    t = reroot(bfs_tree(p3, 1), p3, 3)
    assert t.root == 3 and t.parent == {2: 3, 1: 2}
    t0 = bfs_tree(p3, 1)
    assert reroot(t0, p3, 1) == t0
    star = star_graph(4)
    t = reroot(bfs_tree(star, 1), star, 3)
    assert t.parent[1] == 3


@given(connected_graphs(), st.data())
def test_reroot_gives_spanning_tree(g, data):
    t = bfs_tree(g, g.vertices[0])
    r = data.draw(st.sampled_from(g.vertices))
    t2 = reroot(t, g, r)
    t2.check(g)
    assert t2.root == r and t2.edges == t.edges


def test_tree_from_edges_rejects_cycles():
    with pytest.raises(ValueError):
        tree_from_edges([(1, 2), (2, 3), (1, 3)], 1)


def test_relabeled_preserves_structure():
    g = complete_bipartite(2, 3)
    mp = {v: 10 * v for v in g.vertices}
    h = g.relabeled(mp)
    assert h.m == g.m and h.has_edge(10, 30) and not h.has_edge(10, 20)


def test_random_connected_graph_is_seeded():
    a = [random_connected(s) for s in range(5)]
    b = [random_connected(s) for s in range(5)]
    assert a == b


def random_connected(seed):
    from genuspls.graph import random_connected_graph

    return random_connected_graph(6, random.Random(seed))
