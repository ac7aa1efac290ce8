import random
from dataclasses import fields, replace

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from genuspls.certificates import EdgeCertificate, Mode, VertexCertificate, pack, prove, prove_tree
from genuspls.fixtures import fixture, fixtures
from genuspls.graph import complete_graph, cycle_graph, edge_key, heawood_bound, star_graph
from genuspls.harness import certify_fixture, honest_for, local_view, mutate, run_verification
from genuspls.oracle import min_genus_orientable
from genuspls.verifier import LocalView, VerifierParams, enumerate_rules, unpack_local, verify
from genuspls.verifier import Reject

from strategies import graph_and_scheme


def natural(g):
    from genuspls.embedding import EmbeddingScheme
    return EmbeddingScheme.from_rotation({v: g.adjacency[v] for v in g.vertices})


def test_catalog():
    rules = enumerate_rules()
    tags = [t for t, _ in rules]
    assert len(rules) >= 10
    assert len(set(tags)) == len(tags)
    assert "Euler" in dict(rules)["R5"]
    assert {f"R{i}" for i in range(1, 9)} <= set(tags)
    assert {"PACK_MISSING", "PACK_CONFLICT", "PACK_OVERFLOW"} <= set(tags)


def test_params_reject_negative_genus():
    with pytest.raises(ValueError):
        VerifierParams(-1)


def test_honest_c4_accepted_everywhere():
    g = cycle_graph(4)
    a = prove(g, natural(g), 0)
    for v in g.vertices:
        assert verify(VerifierParams(0), local_view(g, a, v, False)).accepted


def test_k5_torus_at_genus_zero_rejected_at_r5_everywhere():
    g = complete_graph(5)
    res = min_genus_orientable(g)
    # the oracle's best face count leaves 2 + 10 - 5 - F > 0
    assert res.faces == 5
    a = prove(g, res.witness, 2)
    rep = run_verification(g, a, VerifierParams(0))
    assert set(rep.reject_rules) == {"R5"}
    assert len(rep.rejecting()) == 5


def test_nu_increment_caught_locally():
    g = complete_graph(5)
    a = prove(g, min_genus_orientable(g).witness, 2)
    for v in g.vertices:
        c = a.vertex_certs[v]
        bad = replace(a, vertex_certs={**a.vertex_certs, v: replace(c, nu=c.nu + 1)})
        rep = run_verification(g, bad, VerifierParams(2))
        where = {x for x, _ in rep.rejecting()}
        assert where and where <= {v, c.parent}
        assert set(rep.reject_rules) == {"R4"}


def test_first_failure_order_is_stable():
    g = cycle_graph(4)
    a = prove(g, natural(g), 0)
    # an R1 fault masks the R5 fault that a zero target would also cause
    e = edge_key(1, 2)
    bad = replace(a, edge_certs={**a.edge_certs, e: replace(a.edge_certs[e], iu=7)})
    assert verify(VerifierParams(0), local_view(g, bad, 1, False)).rule == "R1"


def test_verdict_rule_present_iff_rejected():
    g = cycle_graph(5)
    a = prove(g, natural(g), 0)
    for p in (VerifierParams(0), VerifierParams(0, False)):
        for v in g.vertices:
            d = verify(p, local_view(g, a, v, False))
            assert d.accepted == (d.rule is None)


# ---------------------------------------------------------------------------
# packed stores
# ---------------------------------------------------------------------------

def test_packed_c8_round_trip():
    g = cycle_graph(8)
    a = prove(g, natural(g), 0)
    packed = pack(g, a)
    for v in g.vertices:
        view = unpack_local(VerifierParams(0, packed=True), local_view(g, packed, v, True))
        assert set(view.edge_certs) == set(g.neighbors(v))
        for u, c in view.edge_certs.items():
            assert c == a.edge_certs[edge_key(u, v)]
    assert run_verification(g, packed, VerifierParams(0, packed=True)).all_accepted


def test_deleted_edge_certificate_is_missing():
    g = cycle_graph(8)
    packed = pack(g, prove(g, natural(g), 0))
    k = edge_key(3, 4)
    stores = {v: tuple(c for c in cs if c.key != k) for v, cs in packed.stores.items()}
    rep = run_verification(g, replace(packed, stores=stores), VerifierParams(0, packed=True))
    assert {x for x, _ in rep.rejecting()} == {3, 4}
    assert set(rep.reject_rules) == {"PACK_MISSING"}


def test_conflicting_copies():
    g = cycle_graph(8)
    packed = pack(g, prove(g, natural(g), 0))
    holder = next(v for v, cs in packed.stores.items() if cs)
    c = packed.stores[holder][0]
    other = c.v if c.u == holder else c.u
    forged = replace(c, fu=c.fu + 1)
    stores = {**packed.stores, other: packed.stores.get(other, ()) + (forged,)}
    rep = run_verification(g, replace(packed, stores=stores), VerifierParams(0, packed=True))
    assert rep.verdicts[holder].rule == "PACK_CONFLICT"


def test_stray_store_entry():
    g = cycle_graph(8)
    packed = pack(g, prove(g, natural(g), 0))
    stray = EdgeCertificate(5, 7, 0, 0, (5, 7), 0, (7, 5), 0)
    stores = {**packed.stores, 1: packed.stores.get(1, ()) + (stray,)}
    rep = run_verification(g, replace(packed, stores=stores), VerifierParams(0, packed=True))
    assert rep.verdicts[1].rule == "PACK_CONFLICT"


def test_k5_store_bound():
    assert heawood_bound(0) == 5
    g = complete_graph(5)
    packed = pack(g, prove(g, min_genus_orientable(g).witness, 2))
    biggest = max(packed.stores, key=lambda v: len(packed.stores[v]))
    assert len(packed.stores[biggest]) == 4
    p0 = VerifierParams(0, packed=True)
    unpack_local(p0, local_view(g, packed, biggest, True))  # 4 <= 5: the count check passes
    filler = tuple(EdgeCertificate(biggest, 100 + i, 0, 0, (biggest, 100 + i), 0, (100 + i, biggest), 0)
                   for i in range(2))
    over = replace(packed, stores={**packed.stores, biggest: packed.stores[biggest] + filler})
    with pytest.raises(Reject) as exc:
        unpack_local(p0, local_view(g, over, biggest, True))
    assert exc.value.rule == "PACK_OVERFLOW"
    assert verify(p0, local_view(g, over, biggest, True)).rule == "PACK_OVERFLOW"


# ---------------------------------------------------------------------------
# modes
# ---------------------------------------------------------------------------

def test_tree_mode_accepts_trees_under_both_surfaces():
    g = star_graph(5)
    a = prove_tree(g)
    for orientable in (True, False):
        assert run_verification(g, a, VerifierParams(1, orientable)).all_accepted


def test_tree_mode_rejects_a_non_tree_edge():
    from genuspls.graph import Graph
    g = star_graph(3)
    a = prove_tree(g)
    h = Graph.from_edges(list(g.sorted_edges) + [(2, 3)])
    rep = run_verification(h, a, VerifierParams(1, False))
    assert "R7" in rep.reject_rules


def test_orientable_mode_rejects_signs():
    g = cycle_graph(4)
    a = prove(g, natural(g), 0)
    e = edge_key(1, 2)
    bad = replace(a, edge_certs={**a.edge_certs, e: replace(a.edge_certs[e], sign=1)})
    rep = run_verification(g, bad, VerifierParams(0))
    assert set(rep.reject_rules) == {"R8"}


def test_surface_mismatch_rejected():
    g = cycle_graph(4)
    a = prove(g, natural(g), 0)
    assert set(run_verification(g, a, VerifierParams(2, False)).reject_rules) == {"R8"}
    fx = fixture("K5-projective")
    a = certify_fixture(fx)
    assert set(run_verification(fx.graph, a, VerifierParams(fx.target + 2, True)).reject_rules) == {"R8"}


def test_nonorientable_floor():
    # the triangle with a negative edge certifies F = 2, and 2 + 3 - 3 - 2 = 0 is raised to 1
    fx = fixture("C3-negative")
    assert (fx.phi_faces, fx.doubled_faces) == (2, 1)
    a = prove(fx.graph, fx.scheme, 1)
    assert run_verification(fx.graph, a, VerifierParams(1, False)).all_accepted
    assert set(run_verification(fx.graph, a, VerifierParams(0, False)).reject_rules) == {"R5"}


def test_sign_flip_caught():
    fx = fixture("K6-projective")
    a = certify_fixture(fx)
    for e, c in list(a.edge_certs.items())[:5]:
        bad = replace(a, edge_certs={**a.edge_certs, e: replace(c, sign=-c.sign)})
        assert not run_verification(fx.graph, bad, VerifierParams(fx.target, False)).all_accepted


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------

@given(graph_and_scheme(min_n=2, max_n=7), st.integers(0, 2**32 - 1))
def test_monotone_genus(gs, seed):
    g, s = gs
    a = honest_for(g, s)
    assume(a is not None)
    rng = random.Random(seed)
    for cert in (a, mutate(g, a, rng, 1)):
        for packed in (False, True):
            c = pack(g, cert) if packed else cert
            for target in range(0, 4):
                p = VerifierParams(target, s.orientable_mode, packed)
                for v in g.vertices:
                    if verify(p, local_view(g, c, v, packed)).accepted:
                        p2 = VerifierParams(target + 1, s.orientable_mode, packed)
                        assert verify(p2, local_view(g, c, v, packed)).accepted


@given(graph_and_scheme(min_n=2, max_n=7))
def test_determinism(gs):
    g, s = gs
    a = honest_for(g, s)
    assume(a is not None)
    p = VerifierParams(8, s.orientable_mode)
    for v in g.vertices:
        assert verify(p, local_view(g, a, v, False)) == verify(p, local_view(g, a, v, False))


JUNK = st.one_of(st.none(), st.booleans(), st.integers(-3, 3), st.text(max_size=2),
                 st.tuples(st.integers(-1, 9), st.integers(-1, 9)), st.just(Mode.TREE), st.floats())


@given(st.data())
def test_malformed_certificates_never_crash(data):
    fx = data.draw(st.sampled_from([f for f in fixtures() if f.graph.n <= 6]))
    a = certify_fixture(fx)
    g = fx.graph
    v = data.draw(st.sampled_from(g.vertices))
    vc = a.vertex_certs[v]
    name = data.draw(st.sampled_from([f.name for f in fields(VertexCertificate)]))
    vcs = {**a.vertex_certs, v: replace(vc, **{name: data.draw(JUNK)})}
    ecs = dict(a.edge_certs)
    if ecs:
        e = data.draw(st.sampled_from(sorted(ecs)))
        ename = data.draw(st.sampled_from([f.name for f in fields(EdgeCertificate)]))
        ecs[e] = replace(ecs[e], **{ename: data.draw(JUNK)})
    if data.draw(st.booleans()):
        vcs[v] = data.draw(st.sampled_from([None, "junk", 3]))
    bad = replace(a, vertex_certs=vcs, edge_certs=ecs)
    for packed in (False, True):
        c = replace(bad, stores={u: tuple(ecs.values()) for u in g.vertices}) if packed else bad
        rep = run_verification(g, c, VerifierParams(fx.target, fx.orientable, packed))
        for d in rep.verdicts.values():
            assert d.accepted == (d.rule is None)


def test_view_without_certificates_rejected():
    v = LocalView(1, None, ((2, None),))
    d = verify(VerifierParams(0), v)
    assert not d.accepted and d.rule == "R1"
