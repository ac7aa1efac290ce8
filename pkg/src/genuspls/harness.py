"""Distributed verification simulator and adversarial test bench."""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .certificates import (
    CertificateAssignment,
    EdgeCertificate,
    FaceAssignmentError,
    GenusTooLarge,
    Mode,
    VertexCertificate,
    format_bundle,
    pack,
    prove,
    prove_tree,
)
from .embedding import EmbeddingScheme, is_orientable_scheme, phi_genus, trace_faces_phi
from .graph import Graph, edge_key, format_graph, random_connected_graph
from .oracle import OracleBudget, is_embeddable, min_genus_nonorientable, min_genus_orientable
from .verifier import RULES, LocalView, Verdict, VerifierParams, verify


# ---------------------------------------------------------------------------
# one round of verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunReport:
    verdicts: Mapping[int, Verdict]

    @property
    def all_accepted(self) -> bool:
        return all(v.accepted for v in self.verdicts.values())

    @property
    def reject_rules(self) -> Counter:
        return Counter(v.rule for v in self.verdicts.values() if not v.accepted)

    def rejecting(self) -> list[tuple[int, Verdict]]:
        return [(x, v) for x, v in sorted(self.verdicts.items()) if not v.accepted]


def local_view(g: Graph, a: CertificateAssignment, v: int, packed: bool) -> LocalView:
    nbrs = tuple((u, a.vertex_certs.get(u)) for u in g.neighbors(v))
    if packed:
        stores = a.stores or {}
        return LocalView(v, a.vertex_certs.get(v), nbrs, own_store=tuple(stores.get(v, ())),
                         neighbor_stores={u: tuple(stores.get(u, ())) for u in g.neighbors(v)})
    edge_certs = {}
    for u in g.neighbors(v):
        c = a.edge_certs.get(edge_key(v, u))
        if c is not None:
            edge_certs[u] = c
    return LocalView(v, a.vertex_certs.get(v), nbrs, edge_certs)


def run_verification(g: Graph, a: CertificateAssignment, p: VerifierParams) -> RunReport:
    return RunReport({v: verify(p, local_view(g, a, v, p.packed)) for v in g.vertices})


# ---------------------------------------------------------------------------
# identifiers
# ---------------------------------------------------------------------------

def relabel_assignment(a: CertificateAssignment, mp: Mapping[int, int]) -> CertificateAssignment:
    vc = {mp.get(v, v): c.relabeled(mp) for v, c in a.vertex_certs.items()}
    ec = {}
    for c in a.edge_certs.values():
        c2 = c.relabeled(mp)
        ec[c2.key] = c2
    stores = None
    if a.stores is not None:
        stores = {mp.get(v, v): tuple(c.relabeled(mp) for c in cs) for v, cs in a.stores.items()}
    return CertificateAssignment(a.mode, vc, ec, stores)


def random_injection(g: Graph, seed: int) -> dict[int, int]:
    rng = random.Random(seed)
    ids = rng.sample(range(1, g.n ** 3 + 1), g.n)
    return dict(zip(g.vertices, ids))


def relabel_ids(g: Graph, a: CertificateAssignment, seed: int) -> tuple[Graph, CertificateAssignment]:
    """Apply a seeded injection into ``{1..n^3}`` to the graph and every certificate."""
    mp = random_injection(g, seed)
    return g.relabeled(mp), relabel_assignment(a, mp)


# ---------------------------------------------------------------------------
# certificate size
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Widths:
    id: int
    counter: int
    index: int

    @classmethod
    def for_graph(cls, g: Graph) -> "Widths":
        delta = max((g.degree(v) for v in g.vertices), default=1)
        return cls(max(g.vertices).bit_length(), (2 * g.m).bit_length(), max(delta - 1, 0).bit_length())


def _opt_bits(x, width: int) -> int:
    return 1 + (width if x is not None else 0)


def vertex_cert_bits(c: VertexCertificate, w: Widths) -> tuple[int, int]:
    """``(bits, id-width fields)`` of a vertex certificate."""
    bits = 2 * w.id + 2 + 3 * w.counter  # own_id, root, mode, depth, n, nu
    bits += _opt_bits(c.parent, w.id) + _opt_bits(c.er, w.id) + _opt_bits(c.eta, 1)
    bits += sum(_opt_bits(x, w.counter) for x in (c.m2, c.mu2, c.F, c.phi))
    ids = 2 + (c.parent is not None) + (c.er is not None)
    return bits, ids


def edge_cert_bits(c: EdgeCertificate, w: Widths) -> tuple[int, int]:
    bits = 6 * w.id + 2 * w.index + 2 * w.counter + _opt_bits(c.sign, 1)
    return bits, 6


@dataclass(frozen=True)
class SizeReport:
    per_vertex: Mapping[int, int]
    max_bits: int
    id_fields: int  # id-width fields held by the largest vertex
    n: int
    target_eg: int
    widths: Widths


def meter_sizes(a: CertificateAssignment, g: Graph, p: VerifierParams) -> SizeReport:
    """Bits each vertex holds under the canonical encoding (own certificate plus stored edges)."""
    w = Widths.for_graph(g)
    stores = a.stores if a.stores is not None else pack(g, a).stores
    per, ids = {}, {}
    for v in g.vertices:
        b, i = vertex_cert_bits(a.vertex_certs[v], w)
        for c in stores.get(v, ()):
            eb, ei = edge_cert_bits(c, w)
            b += eb
            i += ei
        per[v], ids[v] = b, i
    top = max(per, key=lambda v: (per[v], ids[v]))
    return SizeReport(per, per[top], ids[top], g.n, p.target_eg, w)


def growth_bound(report: SizeReport) -> int:
    """Allowed increase of ``max_bits`` when n doubles."""
    return 2 * report.id_fields + 4


# ---------------------------------------------------------------------------
# adversaries
# ---------------------------------------------------------------------------

KINDS = ("random-bits", "honest-mutate", "wrong-instance-graft", "stale-honest", "phi-collision", "structured")


@dataclass(frozen=True)
class AdversaryStrategy:
    kind: str
    seed: int = 0
    mutation_count: int = 1
    trials: int | None = None  # overrides the run-wide trial count

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown adversary {self.kind!r}")
        if self.mutation_count < 1:
            raise ValueError("mutation_count must be positive")


class PreconditionError(ValueError):
    """The instance is embeddable, so rejection cannot be demanded."""


def honest_for(g: Graph, scheme: EmbeddingScheme) -> CertificateAssignment | None:
    """Honest certificates for ``scheme`` at its own memoryless genus (unchecked if self-check fails)."""
    fs = trace_faces_phi(g, scheme)
    if fs.unplaceable:
        return None
    target = max(phi_genus(g, fs), 0 if scheme.orientable_mode else 1)
    if not scheme.orientable_mode and is_orientable_scheme(g, scheme):
        return None
    try:
        return prove(g, scheme, target)
    except FaceAssignmentError:
        return None
    except GenusTooLarge:  # pragma: no cover - target is the scheme's own genus
        return None
    except Exception:
        return prove(g, scheme, target, check=False)


def random_scheme(g: Graph, rng: random.Random, orientable: bool) -> EmbeddingScheme:
    rot = {}
    for v in g.vertices:
        ns = list(g.adjacency[v])
        rng.shuffle(ns)
        rot[v] = tuple(ns)
    if orientable:
        return EmbeddingScheme.from_rotation(rot)
    neg = [e for e in g.sorted_edges if rng.random() < 0.5]
    return EmbeddingScheme.from_rotation(rot, neg, orientable_mode=False)


class _Context:
    """Lazily built ingredients shared by the strategies on one instance."""

    def __init__(self, g: Graph, p: VerifierParams, budget: OracleBudget):
        self.g = g
        self.p = p
        self.budget = budget
        self._bases: list[CertificateAssignment] | None = None
        self._donors: dict[int, list[CertificateAssignment]] = {}

    def witness_schemes(self) -> list[EmbeddingScheme]:
        from .fixtures import best_switching, known_embeddings

        out = []
        for fx in known_embeddings():
            if fx.graph == self.g:
                out.append(fx.scheme)
        for search, orientable in ((min_genus_orientable, True), (min_genus_nonorientable, False)):
            try:
                w = search(self.g, self.budget).witness
            except Exception:
                continue
            if not orientable:
                try:
                    w = best_switching(self.g, w)
                except Exception:
                    pass
            out.append(w)
        return out

    def donors(self, seed: int, count: int = 4) -> list[CertificateAssignment]:
        """Honest certificates of other graphs on the same ids, found once per seed."""
        if seed not in self._donors:
            rng = random.Random(f"{seed}:donors")
            found = []
            for _ in range(count):
                a = _graft_source(self.g, self.p, rng, self.budget)
                if a is None:
                    break
                found.append(a)
            self._donors[seed] = found
        return self._donors[seed]

    def bases(self) -> list[CertificateAssignment]:
        """Honest assignments for this graph under weaker claims; own mode first."""
        if self._bases is None:
            found = []
            if self.g.is_tree():
                found.append(prove_tree(self.g))
            for s in self.witness_schemes():
                a = honest_for(self.g, s)
                if a is not None:
                    found.append(a)
            want = Mode.ORIENTABLE if self.p.orientable else Mode.NONORIENTABLE
            found.sort(key=lambda a: a.mode is not want)
            self._bases = found
        return self._bases


def _rand_width(rng: random.Random, width: int) -> int:
    return rng.getrandbits(width) if width > 0 else 0


def random_assignment(g: Graph, rng: random.Random, packed: bool) -> CertificateAssignment:
    """Uniformly random field values under the canonical widths; presence bits random too."""
    w = Widths.for_graph(g)
    modes = (Mode.ORIENTABLE, Mode.NONORIENTABLE, Mode.TREE, None)

    def rid():
        return _rand_width(rng, w.id)

    def cnt():
        return _rand_width(rng, w.counter)

    def opt(f):
        return f() if rng.random() < 0.5 else None

    vc = {}
    for v in g.vertices:
        vc[v] = VertexCertificate(own_id=rid(), mode=modes[rng.randrange(4)], root_id=rid(), depth=cnt(),
                                  parent=opt(rid), n=cnt(), nu=cnt(), m2=opt(cnt), mu2=opt(cnt), F=opt(cnt),
                                  phi=opt(cnt), eta=opt(lambda: rng.getrandbits(1)), er=opt(rid))
    ec = {}
    for u, v in g.sorted_edges:
        ec[(u, v)] = EdgeCertificate(rid(), rid(), _rand_width(rng, w.index), _rand_width(rng, w.index),
                                     (rid(), rid()), cnt(), (rid(), rid()), cnt(),
                                     opt(lambda: rng.choice((-1, 1))))
    a = CertificateAssignment(modes[0], vc, ec)
    if packed:
        stores = {v: [] for v in g.vertices}
        for (u, v), c in ec.items():
            r = rng.random()
            if r < 0.45:
                stores[u].append(c)
            elif r < 0.9:
                stores[v].append(c)
            elif r < 0.95:
                stores[u].append(c)
                stores[v].append(c)
        a = replace(a, stores={v: tuple(cs) for v, cs in stores.items()})
    return a


_VERTEX_FIELDS = ("own_id", "mode", "root_id", "depth", "parent", "n", "nu", "m2", "mu2", "F", "phi", "eta", "er")
_EDGE_FIELDS = ("u", "v", "iu", "iv", "ru", "fu", "rv", "fv", "sign")


def _mutate_value(rng: random.Random, name: str, old, g: Graph):
    ids = g.vertices
    if name == "mode":
        return rng.choice([m for m in Mode if m is not old])
    if name == "sign":
        return rng.choice([x for x in (None, -1, 1) if x != old])
    if name == "eta":
        return rng.choice([x for x in (None, 0, 1) if x != old])
    if name in ("ru", "rv"):
        h = (rng.choice(ids), rng.choice(ids))
        return h if h != old else (old[1], old[0])
    if name in ("own_id", "root_id", "parent", "er", "u", "v"):
        cands = [x for x in ids if x != old]
        if name in ("parent", "er") and old is not None:
            cands.append(None)
        return rng.choice(cands)
    if old is None:
        return rng.randrange(0, 2 * g.m + 2)
    new = old + rng.choice((-2, -1, 1, 2, rng.randrange(1, 2 * g.m + 2)))
    return new if new >= 0 else old + 1


def mutate(g: Graph, a: CertificateAssignment, rng: random.Random, count: int) -> CertificateAssignment:
    """Change ``count`` single fields (or store placements) of an assignment."""
    vc = dict(a.vertex_certs)
    ec = dict(a.edge_certs)
    stores = {v: list(cs) for v, cs in a.stores.items()} if a.stores is not None else None
    for _ in range(count):
        r = rng.random()
        if stores is not None and r < 0.1:
            v = rng.choice(g.vertices)
            op = rng.randrange(3)
            if op == 0 and stores[v]:
                stores[v].pop(rng.randrange(len(stores[v])))
            elif op == 1:
                stores[v].append(ec[rng.choice(g.sorted_edges)])
            elif stores[v]:
                c = stores[v].pop(rng.randrange(len(stores[v])))
                other = c.v if c.u == v else c.u
                stores.setdefault(other, []).append(c)
            continue
        if ec and r < 0.55:
            k = rng.choice(sorted(ec))
            fname = rng.choice(_EDGE_FIELDS)
            old = getattr(ec[k], fname)
            new = replace(ec[k], **{fname: _mutate_value(rng, fname, old, g)})
            if stores is not None:
                for v in stores:
                    stores[v] = [new if c == ec[k] else c for c in stores[v]]
            ec[k] = new
        else:
            v = rng.choice(g.vertices)
            fname = rng.choice(_VERTEX_FIELDS)
            old = getattr(vc[v], fname)
            vc[v] = replace(vc[v], **{fname: _mutate_value(rng, fname, old, g)})
    return CertificateAssignment(a.mode, vc, ec,
                                 None if stores is None else {v: tuple(cs) for v, cs in stores.items()})


def _path_to_root(a: CertificateAssignment, v: int) -> list[int]:
    path = [v]
    seen = {v}
    while a.vertex_certs[path[-1]].parent is not None:
        nxt = a.vertex_certs[path[-1]].parent
        if nxt in seen:
            break
        seen.add(nxt)
        path.append(nxt)
    return path


def structured_attacks(g: Graph, base: CertificateAssignment) -> list[tuple[str, CertificateAssignment]]:
    """Targeted forgeries of the global counters, the signs and the parity bits."""
    out = []
    vc = base.vertex_certs

    def with_vertices(changes: Mapping[int, VertexCertificate]) -> CertificateAssignment:
        return replace(base, vertex_certs={**vc, **changes})

    cellular = base.mode is not Mode.TREE
    for v in g.vertices:
        path = _path_to_root(base, v)
        for k in (1, 2, 5):
            if cellular:
                # more faces: bump the total everywhere and the counters on the path from v
                ch = {x: replace(c, F=c.F + k) for x, c in vc.items()}
                for x in path:
                    ch[x] = replace(ch[x], phi=ch[x].phi + k)
                out.append((f"fake-F+{k}@{v}", with_vertices(ch)))
                out.append((f"fake-F-total+{k}", with_vertices({x: replace(c, F=c.F + k) for x, c in vc.items()})))
            # fewer vertices or more vertices
            for d in (k, -k):
                ch = {x: replace(c, n=c.n + d) for x, c in vc.items() if c.n + d >= 1}
                if len(ch) == len(vc):
                    for x in path:
                        if ch[x].nu + d >= 1:
                            ch[x] = replace(ch[x], nu=ch[x].nu + d)
                    out.append((f"fake-n{d:+d}@{v}", with_vertices(ch)))
        # claim to be the root
        out.append((f"fake-root@{v}", with_vertices({x: replace(c, root_id=v) for x, c in vc.items()})))
    if cellular:
        # a face root claimed on an arbitrary half-edge
        for (u, v), c in sorted(base.edge_certs.items()):
            if c.ru != (u, v):
                ec = dict(base.edge_certs)
                ec[(u, v)] = replace(c, ru=(u, v), fu=0)
                ch = {x: replace(cc, F=cc.F + 1) for x, cc in vc.items()}
                for x in _path_to_root(base, u):
                    ch[x] = replace(ch[x], phi=ch[x].phi + 1)
                out.append((f"extra-face-root@{u}-{v}", replace(base, vertex_certs={**vc, **ch}, edge_certs=ec)))
    if base.mode is Mode.NONORIENTABLE:
        stripped = {k: replace(c, sign=None) for k, c in base.edge_certs.items()}
        out.append(("sign-strip", replace(base, edge_certs=stripped)))
        positive = {k: replace(c, sign=1) for k, c in base.edge_certs.items()}
        out.append(("sign-all-positive", replace(base, edge_certs=positive)))
        orient = {x: replace(c, mode=Mode.ORIENTABLE, eta=None, er=None) for x, c in vc.items()}
        out.append(("sign-strip-orientable", CertificateAssignment(Mode.ORIENTABLE, orient, stripped)))
        for v in g.vertices:
            out.append((f"eta-flip@{v}", with_vertices({v: replace(vc[v], eta=1 - vc[v].eta)})))
        out.append(("eta-all-zero", with_vertices({x: replace(c, eta=0) for x, c in vc.items()})))
        root = next(x for x, c in vc.items() if c.parent is None)
        for u in g.neighbors(root):
            if u != vc[root].er:
                out.append((f"fake-er@{u}", with_vertices({root: replace(vc[root], er=u)})))
        # pretend the closing edge is negative although it is not
        for (u, v), c in sorted(base.edge_certs.items()):
            if c.sign == 1:
                ec = dict(base.edge_certs)
                ec[(u, v)] = replace(c, sign=-1)
                out.append((f"sign-flip@{u}-{v}", replace(base, edge_certs=ec)))
    return out


GRAFT_BUDGET = OracleBudget(max_rotation_systems=10**5, max_sign_classes=2**10)


def _graft_source(g: Graph, p: VerifierParams, rng: random.Random, budget: OracleBudget) -> CertificateAssignment | None:
    """Honest certificates of another embeddable graph on the same vertex ids.

    Candidates are only looked at under a small oracle budget; the donor
    just has to be cheap to certify, not close to ``g``.
    """
    budget = OracleBudget(min(budget.max_rotation_systems, GRAFT_BUDGET.max_rotation_systems),
                          min(budget.max_sign_classes, GRAFT_BUDGET.max_sign_classes))
    for m in range(g.m, g.n - 2, -1):
        for _ in range(30):
            h = random_connected_graph(g.n, rng, p=0.5)
            if h.m < m:
                continue
            extra = sorted(set(h.edges) - _spanning_edges(h))
            rng.shuffle(extra)
            drop = set(extra[:h.m - m])
            h = Graph(h.vertices, frozenset(h.edges - drop))
            if h == g:
                continue
            mp = dict(zip(h.vertices, g.vertices))
            h = h.relabeled(mp)
            if h.is_tree():
                return prove_tree(h, check=False)
            try:
                if not is_embeddable(h, p.target_eg, p.orientable, budget):
                    continue
                res = (min_genus_orientable if p.orientable else min_genus_nonorientable)(h, budget)
            except Exception:
                continue
            a = honest_for(h, res.witness)
            if a is not None:
                return a
    return None


def _spanning_edges(h: Graph) -> set:
    from .graph import bfs_tree

    return set(bfs_tree(h, h.vertices[0]).edges)


def graft(g: Graph, src: CertificateAssignment, rng: random.Random) -> CertificateAssignment:
    """Copy certificates of another graph onto ``g``: vertices by id, edges by a random matching."""
    src_edges = sorted(src.edge_certs)
    targets = list(g.sorted_edges)
    rng.shuffle(targets)
    ec = {}
    for i, e in enumerate(targets):
        if src_edges:
            ec[e] = src.edge_certs[src_edges[i % len(src_edges)]]
    return CertificateAssignment(src.mode, dict(src.vertex_certs), ec)


def phi_collision_scheme(g: Graph, rng: random.Random, steps: int = 200) -> EmbeddingScheme:
    """Signed scheme whose memoryless tracer finds many cycles (local search)."""
    s = random_scheme(g, rng, orientable=False)
    best = trace_faces_phi(g, s).face_count
    for _ in range(steps):
        v = rng.choice(g.vertices)
        if rng.random() < 0.5 and g.degree(v) > 2:
            ns = list(s.rotation[v])
            i, j = rng.sample(range(len(ns)), 2)
            ns[i], ns[j] = ns[j], ns[i]
            cand = EmbeddingScheme({**s.rotation, v: tuple(ns)}, s.sign, False)
        else:
            e = rng.choice(g.sorted_edges)
            cand = EmbeddingScheme(s.rotation, {**s.sign, e: -s.sign[e]}, False)
        f = trace_faces_phi(g, cand).face_count
        if f >= best:
            s, best = cand, f
    return s


def mirrored(s: EmbeddingScheme) -> EmbeddingScheme:
    """All edges negative: the memoryless tracer then walks the faces of the mirror image."""
    return EmbeddingScheme(s.rotation, {e: -1 for e in s.sign}, False)


def _candidates(kind: str, ctx: _Context, rng: random.Random, trial: int, strategy: AdversaryStrategy):
    g, p = ctx.g, ctx.p
    if kind == "random-bits":
        return [("random", random_assignment(g, rng, p.packed))]
    if kind == "honest-mutate":
        bases = ctx.bases()
        if not bases:
            return []
        base = bases[trial % len(bases)] if trial % 4 == 3 else bases[0]
        if p.packed:
            base = pack(g, base)
        return [("mutate", mutate(g, base, rng, strategy.mutation_count))]
    if kind == "wrong-instance-graft":
        donors = ctx.donors(strategy.seed)
        if not donors:
            return []
        return [("graft", graft(g, donors[trial % len(donors)], rng))]
    if kind == "stale-honest":
        if trial < len(ctx.bases()):
            a = ctx.bases()[trial]
            label = "witness"
        else:
            a = honest_for(g, random_scheme(g, rng, orientable=p.orientable or rng.random() < 0.3))
            label = "random-scheme"
        if a is None:
            return []
        return [(label, pack(g, a) if p.packed else a)]
    if kind == "phi-collision":
        if trial == 0:
            schemes = [("mirror", mirrored(s)) for s in ctx.witness_schemes()]
        else:
            schemes = [("phi-collision", phi_collision_scheme(g, rng))]
        out = []
        for label, s in schemes:
            a = honest_for(g, s)
            if a is not None:
                out.append((label, pack(g, a) if p.packed else a))
        return out
    if kind == "structured":
        out = []
        for base in ctx.bases():
            for label, a in structured_attacks(g, base):
                out.append((label, pack(g, a) if p.packed else a))
        return out
    raise ValueError(kind)  # pragma: no cover


@dataclass
class StrategyStats:
    kind: str
    trials: int = 0
    rejected: int = 0
    skipped: int = 0
    rules: Counter = field(default_factory=Counter)
    violations: list = field(default_factory=list)


@dataclass
class FuzzReport:
    graph: Graph
    params: VerifierParams
    seed: int
    stats: list[StrategyStats]

    @property
    def violations(self) -> list:
        return [v for s in self.stats for v in s.violations]

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def trials(self) -> int:
        return sum(s.trials for s in self.stats)

    def format(self) -> str:
        p = self.params
        lines = [f"report fuzz seed={self.seed} trials={self.trials}",
                 f"instance n={self.graph.n} m={self.graph.m} target_eg={p.target_eg} "
                 f"surface={'orientable' if p.orientable else 'nonorientable'} packed={int(p.packed)}"]
        for s in self.stats:
            lines.append(f"strategy {s.kind} trials={s.trials} rejected={s.rejected} skipped={s.skipped} "
                         f"violations={len(s.violations)}")
            for rule in sorted(s.rules):
                lines.append(f"rule {s.kind} {rule} {s.rules[rule]}")
        for kind, label, trial, path in self.violations:
            lines.append(f"violation {kind} {label} trial={trial} artifact={path or '-'}")
        lines.append("RESULT " + ("pass" if self.passed else "fail"))
        return "\n".join(lines) + "\n"


def _persist(dirpath: Path | None, g: Graph, p: VerifierParams, a: CertificateAssignment, name: str) -> str | None:
    if dirpath is None:
        return None
    dirpath.mkdir(parents=True, exist_ok=True)
    path = dirpath / f"{name}.txt"
    body = (f"# soundness violation: every vertex accepted a false instance\n"
            f"# params target_eg={p.target_eg} orientable={p.orientable} packed={p.packed}\n")
    body += "".join("# " + line + "\n" for line in format_graph(g).splitlines())
    body += format_bundle(a, p.target_eg, g.n, g.m)
    path.write_text(body)
    return str(path)


def fuzz_soundness(g: Graph, p: VerifierParams, strategies: Sequence[AdversaryStrategy], trials: int,
                   artifacts: str | Path | None = None, budget: OracleBudget = OracleBudget(),
                   assume_false: bool = False) -> FuzzReport:
    """Attack a false instance; every produced assignment must be rejected by some vertex.

    ``assume_false`` skips the oracle precondition for instances whose
    non-embeddability is known from outside the oracle's reach.
    """
    if not assume_false and is_embeddable(g, p.target_eg, p.orientable, budget):
        raise PreconditionError("instance is embeddable; soundness cannot be tested on it")
    ctx = _Context(g, p, budget)
    art = Path(artifacts) if artifacts is not None else None
    stats = []
    for st in strategies:
        s = StrategyStats(st.kind)
        n_trials = st.trials if st.trials is not None else trials
        if st.kind == "structured":
            n_trials = 1
        for t in range(n_trials):
            rng = random.Random(f"{st.seed}:{st.kind}:{t}")
            cands = _candidates(st.kind, ctx, rng, t, st)
            if not cands:
                s.skipped += 1
                continue
            for label, a in cands:
                s.trials += 1
                rep = run_verification(g, a, p)
                if rep.all_accepted:
                    name = f"violation-{st.kind}-{st.seed}-{t}-{s.trials}"
                    s.violations.append((st.kind, label, t, _persist(art, g, p, a, name)))
                else:
                    s.rejected += 1
                    s.rules.update(rep.reject_rules.keys())
        stats.append(s)
    return FuzzReport(g, p, strategies[0].seed if strategies else 0, stats)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

@dataclass
class SuiteReport:
    kind: str
    seed: int
    cases: list[tuple[str, bool, str]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.cases)

    def format(self) -> str:
        lines = [f"report {self.kind} seed={self.seed} trials={len(self.cases)}"]
        for name, ok, detail in self.cases:
            lines.append(f"case {name} {'pass' if ok else 'fail'}" + (f" {detail}" if detail else ""))
        lines.append("RESULT " + ("pass" if self.passed else "fail"))
        return "\n".join(lines) + "\n"


def certify_fixture(fx) -> CertificateAssignment:
    if fx.tree_mode:
        return prove_tree(fx.graph)
    return prove(fx.graph, fx.scheme, fx.target)


def fixture_params(fx, packed: bool) -> VerifierParams:
    return VerifierParams(fx.target, fx.orientable, packed)


def completeness_suite(relabelings: int = 50, seed: int = 0, names: Iterable[str] | None = None) -> SuiteReport:
    """Every fixture proves and is accepted everywhere, logical and packed, under relabelings."""
    from .fixtures import fixtures

    rep = SuiteReport("completeness", seed)
    for fx in fixtures():
        if names is not None and fx.name not in names:
            continue
        try:
            a = certify_fixture(fx)
        except Exception as exc:
            rep.cases.append((fx.name, False, f"prover: {exc}"))
            continue
        failures = []
        for packed in (False, True):
            cert = pack(fx.graph, a) if packed else a
            p = fixture_params(fx, packed)
            for r in range(relabelings + 1):
                g2, a2 = (fx.graph, cert) if r == 0 else relabel_ids(fx.graph, cert, seed * 100003 + r)
                run = run_verification(g2, a2, p)
                if not run.all_accepted:
                    v, verdict = run.rejecting()[0]
                    failures.append(f"packed={int(packed)} relabel={r} vertex={v} {verdict.rule}")
        rep.cases.append((fx.name, not failures, "; ".join(failures[:3]) or f"target_eg={fx.target}"))
    return rep


CRITERION_BATTERY = (("random-bits", 10_000), ("honest-mutate", 1_000), ("structured", 1))
FULL_BATTERY = CRITERION_BATTERY + (("wrong-instance-graft", 50), ("stale-honest", 50), ("phi-collision", 30))


def soundness_instances():
    """(name, graph, params, known-false flag) pairs on which every forgery must fail."""
    from .graph import complete_bipartite, complete_graph, cycle_graph

    return [
        ("K5-g0-orientable", complete_graph(5), VerifierParams(0, True), False),
        ("K3,3-g0-orientable", complete_bipartite(3, 3), VerifierParams(0, True), False),
        ("C3-g0-nonorientable", cycle_graph(3), VerifierParams(0, False), False),
        ("K7-g1-nonorientable", complete_graph(7), VerifierParams(1, False), False),
    ]


def probe_instances():
    """False instances known from outside the oracle's reach; their findings are reported, not gated."""
    from .graph import complete_graph

    # K7 does not embed in the Klein bottle (Franklin)
    return [("K7-g2-nonorientable", complete_graph(7), VerifierParams(2, False), True)]


def soundness_suite(seed: int = 0, battery=FULL_BATTERY, artifacts: str | Path | None = None,
                    scale: float = 1.0, names: Iterable[str] | None = None,
                    probes: bool = False) -> tuple[SuiteReport, list[FuzzReport]]:
    rep = SuiteReport("probe" if probes else "soundness", seed)
    fuzz = []
    for name, g, p, known in (probe_instances() if probes else soundness_instances()):
        if names is not None and name not in names:
            continue
        strategies = [AdversaryStrategy(kind, seed, trials=max(1, int(n * scale))) for kind, n in battery]
        fr = fuzz_soundness(g, p, strategies, 1, artifacts=artifacts, assume_false=known)
        fuzz.append(fr)
        detail = ",".join(f"{s.kind}:{s.rejected}/{s.trials}" for s in fr.stats)
        if fr.violations:
            detail += " violations=" + ",".join(sorted({f"{k}/{lbl}" for k, lbl, _, _ in fr.violations}))
        rep.cases.append((name, fr.passed, detail))
    return rep, fuzz


def rule_catalog_lines() -> list[str]:
    return [f"{tag} {desc}" for tag, desc in RULES.items()]
