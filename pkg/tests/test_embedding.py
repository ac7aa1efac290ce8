import pytest
from hypothesis import assume, given, strategies as st

from genuspls.embedding import (
    EmbeddingScheme,
    InconsistentGenusError,
    SchemeError,
    diagnostics,
    euler_genus,
    find_odd_negative_cycle,
    format_embedding,
    is_orientable_scheme,
    parse_embedding,
    phi_genus,
    phi_successor,
    trace_faces_doubled,
    trace_faces_phi,
    validate_scheme,
)
from genuspls.fixtures import fixture, negative_triangle
from genuspls.graph import complete_graph, cycle_graph, edge_key, path_graph

from oracles import cover_is_connected, orientable_face_count, signed_face_count
from strategies import graph_and_scheme


def natural(g, negative=(), orientable_mode=None):
    return EmbeddingScheme.from_rotation({v: g.adjacency[v] for v in g.vertices}, negative, orientable_mode)


# validation -----------------------------------------------------------------

def test_validate_examples():
    validate_scheme(cycle_graph(4), natural(cycle_graph(4)))
    k4 = complete_graph(4)
    bad = EmbeddingScheme.from_rotation({1: (2, 4), 2: (1, 3, 4), 3: (1, 2, 4), 4: (1, 2, 3)})
    with pytest.raises(SchemeError):
        validate_scheme(k4, bad)
    forced = EmbeddingScheme(natural(k4).rotation, {**natural(k4).sign, (1, 2): -1}, True)
    with pytest.raises(SchemeError):
        validate_scheme(k4, forced)


def test_validate_rejects_repeated_and_foreign_neighbours():
    c4 = cycle_graph(4)
    with pytest.raises(SchemeError):
        validate_scheme(c4, EmbeddingScheme.from_rotation({1: (2, 2), 2: (1, 3), 3: (2, 4), 4: (3, 1)}))
    with pytest.raises(SchemeError):
        validate_scheme(c4, EmbeddingScheme.from_rotation({1: (2, 3), 2: (1, 3), 3: (2, 4), 4: (3, 1)}))


# successor map ----------------------------------------------------------------

def test_phi_triangle_ascending():
    assert phi_successor(natural(cycle_graph(3)), (1, 2)) == (2, 3)


def test_phi_negative_edge_reads_predecessor():
    k4 = complete_graph(4)
    s = EmbeddingScheme.from_rotation({1: (2, 3, 4), 2: (1, 3, 4), 3: (1, 2, 4), 4: (1, 2, 3)}, [(1, 2)], False)
    assert phi_successor(s, (1, 2)) == (2, 4)
    assert validate_scheme(k4, s) is None


@given(graph_and_scheme(min_n=3))
def test_phi_ignores_sign_at_degree_two(gs):
    g, s = gs
    for v, u in s.half_edges():
        if g.degree(u) == 2:
            other = next(w for w in g.neighbors(u) if w != v)
            assert phi_successor(s, (v, u)) == (u, other)


# face tracing -----------------------------------------------------------------

def test_c4_faces():
    g = cycle_graph(4)
    fs = trace_faces_phi(g, natural(g))
    assert fs.face_count == 2 and sorted(fs.degree) == [4, 4]
    assert euler_genus(g, fs.face_count) == 0
    assert trace_faces_doubled(g, natural(g))[0] == 2


def test_c4_face_roots_and_opposite_indices():
    g = cycle_graph(4)
    fs = trace_faces_phi(g, natural(g))
    for h, i in fs.face_of.items():
        root = fs.root_of[i]
        assert fs.f_index[root] == 0
        members = [x for x, j in fs.face_of.items() if j == i]
        assert root == min(members)
    assert fs.f_index[(3, 4)] == 2 or fs.f_index[(3, 2)] == 2


def test_negative_triangle_discrepancy():
    g = cycle_graph(3)
    s = negative_triangle()
    assert trace_faces_phi(g, s).face_count == 2
    f, lengths = trace_faces_doubled(g, s)
    assert f == 1 and lengths == [6, 6]
    assert euler_genus(g, 1) == 1


def test_k4_planar_fixture_is_a_triangulation():
    fx = fixture("K4-planar")
    fs = trace_faces_phi(fx.graph, fx.scheme)
    assert fs.face_count == 4 and set(fs.degree) == {3}
    assert set(fs.f_index.values()) == {0, 1, 2}


@given(graph_and_scheme(min_n=2, signed=False))
def test_positive_schemes_agree_with_sigma_alpha(gs):
    g, s = gs
    expected = orientable_face_count(s.rotation)
    fs = trace_faces_phi(g, s)
    assert fs.phi_bijective and fs.face_count == expected
    assert trace_faces_doubled(g, s)[0] == expected
    assert euler_genus(g, expected) % 2 == 0


@given(graph_and_scheme(min_n=2, signed=True))
def test_doubled_tracer_matches_double_cover(gs):
    g, s = gs
    f, lengths = trace_faces_doubled(g, s)
    assert f == signed_face_count(s.rotation, s.sign)
    assert sum(lengths) == 4 * g.m
    assert euler_genus(g, f) >= 0


@given(graph_and_scheme(min_n=2, signed=True), st.data())
def test_switching_preserves_surface(gs, data):
    g, s = gs
    vs = data.draw(st.sets(st.sampled_from(g.vertices)))
    t = s.switched(vs)
    assert trace_faces_doubled(g, t)[0] == trace_faces_doubled(g, s)[0]
    assert is_orientable_scheme(g, t) == is_orientable_scheme(g, s)


@given(graph_and_scheme(min_n=2))
def test_phi_face_structure_invariants(gs):
    g, s = gs
    fs = trace_faces_phi(g, s)
    assert set(fs.face_of) == set(s.half_edges())
    for i, root in enumerate(fs.root_of):
        assert fs.face_of[root] == i and fs.f_index[root] == 0
    if fs.phi_bijective:
        assert sum(fs.degree) == 2 * g.m
        for i, d in enumerate(fs.degree):
            assert sorted(fs.f_index[h] for h, j in fs.face_of.items() if j == i) == list(range(d))
    for root in fs.root_of:
        # f-indices step by one along each cycle and wrap at the face degree
        h, k = root, 0
        d = fs.degree[fs.face_of[root]]
        while True:
            assert fs.f_index[h] == k
            h, k = phi_successor(s, h), k + 1
            if h == root:
                break
        assert k == d


def test_genus_helpers():
    assert euler_genus(cycle_graph(4), 2) == 0
    assert euler_genus(cycle_graph(3), 1) == 1
    assert euler_genus(complete_graph(7), 14) == 2
    with pytest.raises(InconsistentGenusError):
        euler_genus(cycle_graph(4), 3)
    g = cycle_graph(3)
    assert phi_genus(g, trace_faces_phi(g, negative_triangle())) == 0


# orientability ------------------------------------------------------------------

def test_orientability_examples():
    c3, c4 = cycle_graph(3), cycle_graph(4)
    assert is_orientable_scheme(c3, natural(c3, (), False))
    assert not is_orientable_scheme(c3, negative_triangle())
    assert is_orientable_scheme(c4, natural(c4, [(1, 2), (3, 4)], False))


@given(graph_and_scheme(min_n=2, signed=True))
def test_orientability_matches_cover(gs):
    g, s = gs
    assume(g.m > 0)
    assert is_orientable_scheme(g, s) == (not cover_is_connected(s.rotation, s.sign))


def test_odd_cycle_examples():
    c3 = cycle_graph(3)
    assert find_odd_negative_cycle(c3, natural(c3, (), False)) is None
    w = find_odd_negative_cycle(c3, negative_triangle())
    assert {w.root, w.partner} == {1, 3}
    c4 = cycle_graph(4)
    w = find_odd_negative_cycle(c4, natural(c4, [(1, 4)], False))
    assert (w.root, w.partner) == (1, 4)
    assert w.tree.edges == frozenset({(1, 2), (2, 3), (3, 4)})


@given(graph_and_scheme(min_n=3, signed=True))
def test_odd_cycle_witness_is_valid(gs):
    g, s = gs
    w = find_odd_negative_cycle(g, s)
    if is_orientable_scheme(g, s):
        assert w is None
        return
    assert w is not None
    w.tree.check(g)
    assert w.tree.root == w.root and g.has_edge(w.root, w.partner)
    assert edge_key(w.root, w.partner) not in w.tree.edges
    assert s.lam(w.root, w.partner) == -1
    # tree path partner -> root has an even number of negative edges
    path = w.tree.path_to_root(w.partner)
    neg = sum(s.lam(a, b) < 0 for a, b in zip(path, path[1:]))
    assert neg % 2 == 0


# file format ------------------------------------------------------------------

@given(graph_and_scheme())
def test_embedding_round_trip(gs):
    _, s = gs
    assert parse_embedding(format_embedding(s)) == s


@pytest.mark.parametrize("text", [
    "rot 1: 2\n",
    "embedding sideways\n",
    "embedding orientable\nrot 1: 2\nneg 1 2\n",
    "embedding nonorientable\nrot 1: 2\nrot 1: 2\n",
    "embedding nonorientable\nrot 1: 2\nrot 2: 1\nneg 1 3\n",
    "embedding orientable\nrot x: 2\n",
])
def test_embedding_parse_errors(text):
    with pytest.raises(SchemeError):
        parse_embedding(text)


def test_diagnostics_report_both_counts():
    d = diagnostics(cycle_graph(3), negative_triangle())
    assert (d.phi_face_count, d.doubled_face_count) == (2, 1)
    assert (d.euler_genus_phi, d.euler_genus_doubled) == (0, 1)
    assert not d.orientable
    d = diagnostics(path_graph(3), natural(path_graph(3)))
    assert d.phi_face_count == d.doubled_face_count == 1
