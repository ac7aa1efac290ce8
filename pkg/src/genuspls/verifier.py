"""The one-round local verifier.

:func:`verify` is a pure function of a single vertex's view: its own
identifier and certificate, its neighbours' identifiers and certificates,
and the certificates of its incident edges (or, in packed mode, the edge
certificate stores of itself and its neighbours).  It never sees the graph.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping

from .certificates import EdgeCertificate, Mode, VertexCertificate
from .graph import edge_key, heawood_bound

RULES: dict[str, str] = {
    "PACK_OVERFLOW": "own edge-certificate store is larger than the degeneracy bound for the target genus",
    "PACK_MISSING": "an incident edge certificate is stored at neither endpoint",
    "PACK_CONFLICT": "two different stored copies of an edge certificate, or a stored certificate for a non-incident edge",
    "R1": "edge certificates name the right endpoints and the v-indices are exactly 0..d(v)-1",
    "R2": "consecutive half-edges of a face agree on its root and their f-indices step by one or restart at the root",
    "R3": "spanning tree: common root identifier, root has depth 0, others have a neighbouring parent one level up",
    "R4": "subtree counters for vertices, doubled edges and face roots add up and match the shared totals at the root",
    "R5": "Euler inequality 2 + m - n - F <= g on the certified totals (left side at least 1 in non-orientable mode)",
    "R6": "edge signs present; negative-edge parity along tree paths; root closes an odd cycle through a negative edge",
    "R7": "tree mode: every incident edge is a tree edge",
    "R8": "mode agrees with the neighbours and with the target surface; orientable mode carries no signs",
}


def enumerate_rules() -> list[tuple[str, str]]:
    return list(RULES.items())


@dataclass(frozen=True)
class VerifierParams:
    target_eg: int
    orientable: bool = True
    packed: bool = False

    def __post_init__(self):
        if self.target_eg < 0:
            raise ValueError("target Euler genus must be non-negative")


@dataclass(frozen=True)
class LocalView:
    own_id: int
    own_cert: VertexCertificate | None
    neighbors: tuple[tuple[int, VertexCertificate | None], ...]
    edge_certs: Mapping[int, EdgeCertificate] = field(default_factory=dict)
    own_store: tuple = ()
    neighbor_stores: Mapping[int, tuple] = field(default_factory=dict)


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    rule: str | None = None
    detail: str = ""


class Reject(Exception):
    def __init__(self, rule: str, detail: str):
        super().__init__(f"{rule}: {detail}")
        self.rule = rule
        self.detail = detail


def _nat(x, lo: int = 0) -> bool:
    return isinstance(x, int) and not isinstance(x, bool) and x >= lo


def _half_edge_ok(h) -> bool:
    return isinstance(h, tuple) and len(h) == 2 and _nat(h[0], 1) and _nat(h[1], 1)


def _edge_cert_ok(c) -> bool:
    return (isinstance(c, EdgeCertificate) and _nat(c.u, 1) and _nat(c.v, 1) and _nat(c.iu) and _nat(c.iv)
            and _half_edge_ok(c.ru) and _half_edge_ok(c.rv) and _nat(c.fu) and _nat(c.fv)
            and c.sign in (None, -1, 1))


def _vertex_cert_ok(c) -> bool:
    return (isinstance(c, VertexCertificate) and isinstance(c.mode, Mode) and _nat(c.own_id, 1)
            and _nat(c.root_id, 1) and _nat(c.depth) and (c.parent is None or _nat(c.parent, 1)))


def unpack_local(params: VerifierParams, view: LocalView) -> LocalView:
    """Recover incident edge certificates from the packed stores around ``view.own_id``."""
    v = view.own_id
    bound = heawood_bound(params.target_eg)
    if len(view.own_store) > bound:
        raise Reject("PACK_OVERFLOW", f"{len(view.own_store)} stored certificates > {bound}")
    nbr_ids = {u for u, _ in view.neighbors}
    for c in view.own_store:
        if not isinstance(c, EdgeCertificate) or v not in c.ends:
            raise Reject("PACK_CONFLICT", f"stray stored certificate {c!r}")
        if (c.ends[0] if c.ends[1] == v else c.ends[1]) not in nbr_ids:
            raise Reject("PACK_CONFLICT", f"stray stored certificate {c!r}")
    found: dict[int, EdgeCertificate] = {}
    for u, _ in view.neighbors:
        k = edge_key(v, u)
        copies = [c for c in view.own_store if c.key == k]
        copies += [c for c in view.neighbor_stores.get(u, ()) if isinstance(c, EdgeCertificate) and c.key == k]
        if not copies:
            raise Reject("PACK_MISSING", f"no stored certificate for edge {k}")
        if any(c != copies[0] for c in copies[1:]):
            raise Reject("PACK_CONFLICT", f"conflicting copies for edge {k}")
        found[u] = copies[0]
    return replace(view, edge_certs=found)


def verify(params: VerifierParams, view: LocalView) -> Verdict:
    own = view.own_cert
    if _vertex_cert_ok(own):
        mode = own.mode
    else:
        mode = Mode.ORIENTABLE if params.orientable else Mode.NONORIENTABLE
    try:
        if mode is Mode.TREE:
            _check_tree_mode(params, view)
        else:
            if params.packed:
                view = unpack_local(params, view)
            _check_cellular(params, view, mode)
    except Reject as r:
        return Verdict(False, r.rule, r.detail)
    return Verdict(True)


def _rotation(view: LocalView) -> list[int]:
    """R1; returns the neighbours listed by v-index."""
    v = view.own_id
    d = len(view.neighbors)
    by_index: dict[int, int] = {}
    for u, _ in view.neighbors:
        c = view.edge_certs.get(u)
        if c is None:
            raise Reject("R1", f"no certificate for edge {v}-{u}")
        if not _edge_cert_ok(c):
            raise Reject("R1", f"malformed certificate for edge {v}-{u}")
        if {c.u, c.v} != {v, u}:
            raise Reject("R1", f"certificate for edge {v}-{u} names endpoints {c.u}-{c.v}")
        i = c.seen_from(v)[0]
        if i >= d or i in by_index:
            raise Reject("R1", f"v-indices at {v} are not a permutation of 0..{d - 1}")
        by_index[i] = u
    return [by_index[i] for i in range(d)]


def _faces(view: LocalView, order: list[int], mode: Mode) -> None:
    """R2, the face succession check for every half-edge entering v."""
    v = view.own_id
    d = len(order)
    for j, u in enumerate(order):
        c = view.edge_certs[u]
        if mode is Mode.NONORIENTABLE:
            if c.sign is None:
                raise Reject("R6", f"edge {v}-{u} carries no sign")
            lam = c.sign
        else:
            lam = 1
        w = order[(j + lam) % d]
        _, _, _, _, root_in, f_in = c.seen_from(v)
        _, _, root_out, f_out, _, _ = view.edge_certs[w].seen_from(v)
        if root_in != root_out:
            raise Reject("R2", f"({u}->{v}) and ({v}->{w}) disagree on the face root")
        expected = 0 if root_out == (v, w) else f_in + 1
        if f_out != expected:
            raise Reject("R2", f"f-index of ({v}->{w}) is {f_out}, expected {expected}")


def _tree(view: LocalView) -> dict[int, VertexCertificate]:
    """R3; returns neighbour certificates by id."""
    v = view.own_id
    own = view.own_cert
    if not _vertex_cert_ok(own):
        raise Reject("R3", f"missing or malformed vertex certificate at {v}")
    if own.own_id != v:
        raise Reject("R3", f"certificate names vertex {own.own_id}, not {v}")
    nbrs: dict[int, VertexCertificate] = {}
    for u, c in view.neighbors:
        if not _vertex_cert_ok(c):
            raise Reject("R3", f"missing or malformed certificate at neighbour {u}")
        if c.root_id != own.root_id:
            raise Reject("R3", f"neighbour {u} names root {c.root_id}, own root is {own.root_id}")
        nbrs[u] = c
    if own.root_id == v:
        if own.depth != 0 or own.parent is not None:
            raise Reject("R3", "root must have depth 0 and no parent")
    else:
        if own.parent not in nbrs:
            raise Reject("R3", f"parent {own.parent} is not a neighbour")
        if own.depth != nbrs[own.parent].depth + 1:
            raise Reject("R3", f"depth {own.depth} != parent depth {nbrs[own.parent].depth} + 1")
    return nbrs


def _children(view: LocalView, nbrs: Mapping[int, VertexCertificate]) -> list[int]:
    return [u for u, c in nbrs.items() if c.parent == view.own_id]


def _counters(view: LocalView, nbrs, order: list[int] | None) -> None:
    """R4.  ``order`` is None in tree mode, where only the vertex count is certified."""
    own = view.own_cert
    v = view.own_id
    names = ("n", "nu") if order is None else ("n", "nu", "m2", "mu2", "F", "phi")
    for c in [own, *nbrs.values()]:
        if not all(_nat(getattr(c, f)) for f in names):
            raise Reject("R4", f"missing counters in the certificate of {c.own_id}")
    for u, c in nbrs.items():
        for f in names[::2]:
            if getattr(c, f) != getattr(own, f):
                raise Reject("R4", f"total {f} differs from neighbour {u}")
    ch = _children(view, nbrs)
    if own.nu != 1 + sum(nbrs[u].nu for u in ch):
        raise Reject("R4", "vertex counter is not 1 + sum over children")
    if order is not None:
        if own.mu2 != len(view.neighbors) + sum(nbrs[u].mu2 for u in ch):
            raise Reject("R4", "degree counter is not d(v) + sum over children")
        roots_here = 0
        for u in order:
            _, _, r, f, _, _ = view.edge_certs[u].seen_from(v)
            if r == (v, u) and f == 0:
                roots_here += 1
        if own.phi != roots_here + sum(nbrs[u].phi for u in ch):
            raise Reject("R4", "face counter is not (faces rooted here) + sum over children")
    if own.root_id == v:
        if own.nu != own.n:
            raise Reject("R4", "root vertex counter differs from n")
        if order is not None and (own.mu2 != own.m2 or own.phi != own.F):
            raise Reject("R4", "root counters differ from the totals")


def _euler(params: VerifierParams, own: VertexCertificate) -> None:
    if own.m2 % 2:
        raise Reject("R5", "doubled edge count is odd")
    eg = 2 + own.m2 // 2 - own.n - own.F
    if own.mode is Mode.NONORIENTABLE:
        eg = max(eg, 1)  # no non-orientable surface has Euler genus 0
    if eg > params.target_eg:
        raise Reject("R5", f"certified Euler genus {eg} > {params.target_eg}")


def _signs(view: LocalView, nbrs) -> None:
    """R6, negative-edge parity along the tree and the odd cycle at the root."""
    v = view.own_id
    own = view.own_cert
    if own.eta not in (0, 1):
        raise Reject("R6", "missing parity bit")
    if own.root_id == v:
        if own.eta != 0:
            raise Reject("R6", "root parity must be 0")
        w = own.er
        if w is None or w not in nbrs:
            raise Reject("R6", "root does not name a neighbour closing an odd cycle")
        if view.edge_certs[w].sign != -1:
            raise Reject("R6", f"closing edge {v}-{w} is not negative")
        if nbrs[w].parent == v:
            raise Reject("R6", f"closing edge {v}-{w} is a tree edge")
        if nbrs[w].eta != 0:
            raise Reject("R6", f"parity at {w} is not 0")
    else:
        if own.er is not None:
            raise Reject("R6", "only the root names a closing edge")
        p = own.parent
        if nbrs[p].eta not in (0, 1):
            raise Reject("R6", "parent has no parity bit")
        if own.eta != nbrs[p].eta ^ (view.edge_certs[p].sign == -1):
            raise Reject("R6", "parity does not follow the parent edge sign")


def _coherence(params: VerifierParams, view: LocalView, nbrs, mode: Mode) -> None:
    for u, c in nbrs.items():
        if c.mode is not mode:
            raise Reject("R8", f"neighbour {u} is in mode {c.mode.value}, own mode {mode.value}")
    allowed = (Mode.ORIENTABLE, Mode.TREE) if params.orientable else (Mode.NONORIENTABLE, Mode.TREE)
    if mode not in allowed:
        raise Reject("R8", f"mode {mode.value} cannot certify the target surface")
    if mode is Mode.ORIENTABLE:
        if any(view.edge_certs[u].sign is not None for u, _ in view.neighbors):
            raise Reject("R8", "orientable certificates carry edge signs")
        if view.own_cert.eta is not None or view.own_cert.er is not None:
            raise Reject("R8", "orientable certificates carry parity data")


def _check_cellular(params: VerifierParams, view: LocalView, mode: Mode) -> None:
    order = _rotation(view)
    _faces(view, order, mode)
    nbrs = _tree(view)
    _counters(view, nbrs, order)
    _euler(params, view.own_cert)
    if mode is Mode.NONORIENTABLE:
        _signs(view, nbrs)
    _coherence(params, view, nbrs, mode)


def _check_tree_mode(params: VerifierParams, view: LocalView) -> None:
    nbrs = _tree(view)
    _counters(view, nbrs, None)
    ch = set(_children(view, nbrs))
    for u in nbrs:
        if u != view.own_cert.parent and u not in ch:
            raise Reject("R7", f"edge {view.own_id}-{u} is not a tree edge")
    _coherence(params, view, nbrs, Mode.TREE)
