"""Certificate data model, the honest prover, degeneracy packing and the bundle format."""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Mapping

from .embedding import (
    EmbeddingScheme,
    FaceStructure,
    HalfEdge,
    find_odd_negative_cycle,
    is_orientable_scheme,
    phi_genus,
    trace_faces_phi,
    validate_scheme,
)
from .graph import Edge, Graph, RootedTree, bfs_tree, degeneracy_order, edge_key


class Mode(str, enum.Enum):
    ORIENTABLE = "orientable"
    NONORIENTABLE = "nonorientable"
    TREE = "tree"


@dataclass(frozen=True)
class EdgeCertificate:
    """Everything both endpoints of edge ``u v`` must agree on.

    ``iu`` is the position of ``v`` in the rotation at ``u`` and ``iv`` the
    position of ``u`` at ``v``.  ``ru``/``fu`` are the root and f-index of
    the face bounding the half-edge ``(u -> v)``; ``rv``/``fv`` likewise
    for ``(v -> u)``.  ``sign`` is ``None`` in orientable mode.
    """
    u: int
    v: int
    iu: int
    iv: int
    ru: HalfEdge
    fu: int
    rv: HalfEdge
    fv: int
    sign: int | None = None

    @property
    def ends(self) -> tuple[int, int]:
        return (self.u, self.v)

    @property
    def key(self) -> Edge:
        return edge_key(self.u, self.v)

    def seen_from(self, w: int) -> tuple[int, int, HalfEdge, int, HalfEdge, int]:
        """``(own index of other, other index of own, own root, own f, other root, other f)`` at ``w``."""
        if w == self.u:
            return self.iu, self.iv, self.ru, self.fu, self.rv, self.fv
        return self.iv, self.iu, self.rv, self.fv, self.ru, self.fu

    def relabeled(self, mp: Mapping[int, int]) -> "EdgeCertificate":
        he = lambda h: (mp.get(h[0], h[0]), mp.get(h[1], h[1]))  # noqa: E731
        return replace(self, u=mp.get(self.u, self.u), v=mp.get(self.v, self.v), ru=he(self.ru), rv=he(self.rv))


@dataclass(frozen=True)
class VertexCertificate:
    own_id: int
    mode: Mode
    root_id: int
    depth: int
    parent: int | None
    n: int
    nu: int
    m2: int | None = None
    mu2: int | None = None
    F: int | None = None
    phi: int | None = None
    eta: int | None = None
    er: int | None = None

    def relabeled(self, mp: Mapping[int, int]) -> "VertexCertificate":
        opt = lambda x: None if x is None else mp.get(x, x)  # noqa: E731
        return replace(self, own_id=mp.get(self.own_id, self.own_id), root_id=mp.get(self.root_id, self.root_id),
                       parent=opt(self.parent), er=opt(self.er))


@dataclass(frozen=True)
class CertificateAssignment:
    mode: Mode
    vertex_certs: Mapping[int, VertexCertificate]
    edge_certs: Mapping[Edge, EdgeCertificate]
    stores: Mapping[int, tuple[EdgeCertificate, ...]] | None = None

    @property
    def packed(self) -> bool:
        return self.stores is not None


class ProverError(Exception):
    """The honest prover refuses or cannot complete."""


class GenusTooLarge(ProverError):
    pass


class NotATree(ProverError):
    pass


class SchemeModeError(ProverError):
    pass


class FaceAssignmentError(ProverError):
    pass


class SelfCheckError(ProverError):
    def __init__(self, vertex: int, rule: str, detail: str):
        super().__init__(f"vertex {vertex} rejects honest certificates at {rule}: {detail}")
        self.vertex = vertex
        self.rule = rule
        self.detail = detail


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def assign_rotation_indices(g: Graph, s: EmbeddingScheme) -> dict[HalfEdge, int]:
    """v-index of every half-edge ``(v -> u)``, counted from v's least neighbour."""
    out = {}
    for v in g.vertices:
        rot = s.rotation[v]
        if not rot:
            continue
        k = rot.index(min(rot))
        for i in range(len(rot)):
            out[(v, rot[(k + i) % len(rot)])] = i
    return out


def assign_face_certificates(g: Graph, s: EmbeddingScheme, fs: FaceStructure) -> dict[HalfEdge, tuple[HalfEdge, int]]:
    """``(face root, f-index)`` for every half-edge."""
    if fs.unplaceable:
        bad = sorted(fs.root_of[i] for i in fs.unplaceable)
        raise FaceAssignmentError(
            f"no root placement keeps hanging f-indices non-negative on faces rooted at {bad}")
    return {h: (fs.root_of[i], fs.f_index[h]) for h, i in fs.face_of.items()}


def build_tree_counters(g: Graph, t: RootedTree, fs: FaceStructure | None = None,
                        s: EmbeddingScheme | None = None) -> dict[int, VertexCertificate]:
    if fs is None:
        mode = Mode.TREE
    else:
        mode = Mode.ORIENTABLE if s is None or s.orientable_mode else Mode.NONORIENTABLE
    nu: dict[int, int] = {}
    mu2: dict[int, int] = {}
    phi: dict[int, int] = {}
    for v in t.postorder():
        ch = t.children[v]
        nu[v] = 1 + sum(nu[c] for c in ch)
        mu2[v] = g.degree(v) + sum(mu2[c] for c in ch)
        if fs is not None:
            phi[v] = fs.roots_at(v) + sum(phi[c] for c in ch)
    eta: dict[int, int] = {}
    if mode is Mode.NONORIENTABLE:
        for v in sorted(t.depth, key=t.depth.__getitem__):
            eta[v] = 0 if v == t.root else eta[t.parent[v]] ^ (s.lam(v, t.parent[v]) < 0)
    r = t.root
    certs = {}
    for v in g.vertices:
        common = dict(own_id=v, mode=mode, root_id=r, depth=t.depth[v], parent=t.parent.get(v), n=nu[r], nu=nu[v])
        if mode is not Mode.TREE:
            common.update(m2=mu2[r], mu2=mu2[v], F=phi[r], phi=phi[v])
        if mode is Mode.NONORIENTABLE:
            common.update(eta=int(eta[v]))
        certs[v] = VertexCertificate(**common)
    return certs


def prove(g: Graph, s: EmbeddingScheme, target_eg: int, check: bool = True) -> CertificateAssignment:
    """Honest certificates that ``s`` embeds ``g`` with Euler genus at most ``target_eg``.

    The genus is counted with the memoryless successor map, exactly as the
    verifier will count it.  The result is run through the verifier before
    being returned.
    """
    validate_scheme(g, s)
    fs = trace_faces_phi(g, s)
    eg = phi_genus(g, fs)
    if not s.orientable_mode:
        eg = max(eg, 1)
    if eg > target_eg:
        raise GenusTooLarge(f"scheme has genus {eg} > target {target_eg} (n={g.n}, m={g.m}, F={fs.face_count})")
    if s.orientable_mode:
        tree = bfs_tree(g, g.vertices[0])
        special = None
        mode = Mode.ORIENTABLE
    else:
        if is_orientable_scheme(g, s):
            raise SchemeModeError("non-orientable mode needs a cycle with an odd number of negative edges")
        w = find_odd_negative_cycle(g, s)
        tree, special = w.tree, w.partner
        mode = Mode.NONORIENTABLE
    index = assign_rotation_indices(g, s)
    faces = assign_face_certificates(g, s, fs)
    edge_certs = {}
    for u, v in g.sorted_edges:
        (ru, fu), (rv, fv) = faces[(u, v)], faces[(v, u)]
        edge_certs[(u, v)] = EdgeCertificate(u, v, index[(u, v)], index[(v, u)], ru, fu, rv, fv,
                                             None if s.orientable_mode else s.sign[(u, v)])
    vcerts = build_tree_counters(g, tree, fs, s)
    if special is not None:
        vcerts[tree.root] = replace(vcerts[tree.root], er=special)
    a = CertificateAssignment(mode, vcerts, edge_certs)
    if check:
        self_check(g, a, target_eg, orientable=s.orientable_mode)
    return a


def prove_tree(g: Graph, check: bool = True) -> CertificateAssignment:
    if not g.is_tree():
        raise NotATree(f"graph has {g.m} edges on {g.n} vertices")
    t = bfs_tree(g, g.vertices[0])
    a = CertificateAssignment(Mode.TREE, build_tree_counters(g, t), {})
    if check:
        self_check(g, a, 0, orientable=False)
    return a


def self_check(g: Graph, a: CertificateAssignment, target_eg: int, orientable: bool) -> None:
    from .harness import run_verification
    from .verifier import VerifierParams

    report = run_verification(g, a, VerifierParams(target_eg, orientable, a.packed))
    for v, verdict in sorted(report.verdicts.items()):
        if not verdict.accepted:
            raise SelfCheckError(v, verdict.rule, verdict.detail)


# ---------------------------------------------------------------------------
# packing
# ---------------------------------------------------------------------------

def pack(g: Graph, a: CertificateAssignment) -> CertificateAssignment:
    """Store each edge certificate at the endpoint that comes later in a degeneracy order."""
    order, _ = degeneracy_order(g)
    pos = {v: i for i, v in enumerate(order)}
    stores: dict[int, list[EdgeCertificate]] = {v: [] for v in g.vertices}
    for (u, v), c in sorted(a.edge_certs.items()):
        stores[u if pos[u] > pos[v] else v].append(c)
    return replace(a, stores={v: tuple(cs) for v, cs in stores.items()})


def unpack(a: CertificateAssignment) -> dict[Edge, EdgeCertificate]:
    out: dict[Edge, EdgeCertificate] = {}
    for _, cs in sorted((a.stores or {}).items()):
        for c in cs:
            if c.key in out:
                raise ValueError(f"edge {c.key} stored twice")
            out[c.key] = c
    return out


# ---------------------------------------------------------------------------
# bundle text format
# ---------------------------------------------------------------------------

class BundleError(ValueError):
    pass


def _opt(x) -> str:
    return "-" if x is None else str(x)


def format_bundle(a: CertificateAssignment, target_eg: int, n: int, m: int) -> str:
    lines = [f"certs {a.mode.value} {target_eg} {n} {m}"]
    for v in sorted(a.vertex_certs):
        c = a.vertex_certs[v]
        lines.append(
            f"vc {v} root={c.root_id} depth={c.depth} parent={_opt(c.parent)} n={c.n} nu={c.nu} "
            f"m2={_opt(c.m2)} mu2={_opt(c.mu2)} F={_opt(c.F)} phi={_opt(c.phi)} eta={_opt(c.eta)} er={_opt(c.er)}")
    for k in sorted(a.edge_certs):
        c = a.edge_certs[k]
        line = (f"ec {c.u} {c.v} iu={c.iu} iv={c.iv} ru={c.ru[0]},{c.ru[1]} fu={c.fu} "
                f"rv={c.rv[0]},{c.rv[1]} fv={c.fv}")
        if c.sign is not None:
            line += " sign=" + ("+" if c.sign > 0 else "-")
        lines.append(line)
    if a.stores is not None:
        for v in sorted(a.stores):
            lines.append(" ".join([f"store {v}:", *(f"{c.u}-{c.v}" for c in a.stores[v])]))
    return "\n".join(lines) + "\n"


def _kv(tokens: list[str]) -> dict[str, str]:
    out = {}
    for t in tokens:
        if "=" not in t:
            raise BundleError(f"expected key=value, got {t!r}")
        k, v = t.split("=", 1)
        if k in out:
            raise BundleError(f"repeated field {k}")
        out[k] = v
    return out


def _int(s: str) -> int:
    try:
        return int(s, 10)
    except ValueError:
        raise BundleError(f"not an integer: {s!r}") from None


def _oint(s: str) -> int | None:
    return None if s == "-" else _int(s)


def _half_edge(s: str) -> HalfEdge:
    parts = s.split(",")
    if len(parts) != 2:
        raise BundleError(f"half-edge must be 'a,b', got {s!r}")
    return (_int(parts[0]), _int(parts[1]))


@dataclass(frozen=True)
class Bundle:
    assignment: CertificateAssignment
    target_eg: int
    n: int
    m: int


def parse_bundle(text: str) -> Bundle:
    header = None
    vcerts: dict[int, VertexCertificate] = {}
    ecerts: dict[Edge, EdgeCertificate] = {}
    store_lines: dict[int, list[Edge]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        try:
            if header is None:
                if tok[0] != "certs" or len(tok) != 5:
                    raise BundleError("expected 'certs <mode> <target_eg> <n> <m>' header")
                header = (Mode(tok[1]), _int(tok[2]), _int(tok[3]), _int(tok[4]))
            elif tok[0] == "vc":
                v = _int(tok[1])
                kv = _kv(tok[2:])
                need = {"root", "depth", "parent", "n", "nu", "m2", "mu2", "F", "phi", "eta", "er"}
                if set(kv) != need:
                    raise BundleError(f"vertex line fields {sorted(kv)} != {sorted(need)}")
                if v in vcerts:
                    raise BundleError(f"second certificate for vertex {v}")
                vcerts[v] = VertexCertificate(
                    own_id=v, mode=header[0], root_id=_int(kv["root"]), depth=_int(kv["depth"]),
                    parent=_oint(kv["parent"]), n=_int(kv["n"]), nu=_int(kv["nu"]), m2=_oint(kv["m2"]),
                    mu2=_oint(kv["mu2"]), F=_oint(kv["F"]), phi=_oint(kv["phi"]), eta=_oint(kv["eta"]),
                    er=_oint(kv["er"]))
            elif tok[0] == "ec":
                u, v = _int(tok[1]), _int(tok[2])
                kv = _kv(tok[3:])
                need = {"iu", "iv", "ru", "fu", "rv", "fv"}
                if not need <= set(kv) or set(kv) - need - {"sign"}:
                    raise BundleError(f"edge line fields {sorted(kv)}")
                sign = None
                if "sign" in kv:
                    if kv["sign"] not in ("+", "-"):
                        raise BundleError(f"sign must be + or -, got {kv['sign']!r}")
                    sign = 1 if kv["sign"] == "+" else -1
                c = EdgeCertificate(u, v, _int(kv["iu"]), _int(kv["iv"]), _half_edge(kv["ru"]), _int(kv["fu"]),
                                    _half_edge(kv["rv"]), _int(kv["fv"]), sign)
                if c.key in ecerts:
                    raise BundleError(f"second certificate for edge {c.key}")
                ecerts[c.key] = c
            elif tok[0] == "store" and tok[1].endswith(":"):
                v = _int(tok[1][:-1])
                edges = []
                for t in tok[2:]:
                    a, _, b = t.partition("-")
                    edges.append(edge_key(_int(a), _int(b)))
                store_lines[v] = edges
            else:
                raise BundleError(f"unrecognised line {line!r}")
        except (BundleError, ValueError, IndexError) as exc:
            raise BundleError(f"line {lineno}: {exc}") from None
    if header is None:
        raise BundleError("missing bundle header")
    mode, target, n, m = header
    stores = None
    if store_lines:
        stores = {}
        for v, edges in store_lines.items():
            missing = [e for e in edges if e not in ecerts]
            if missing:
                raise BundleError(f"store {v} names edges without certificates: {missing}")
            stores[v] = tuple(ecerts[e] for e in edges)
    return Bundle(CertificateAssignment(mode, vcerts, ecerts, stores), target, n, m)
