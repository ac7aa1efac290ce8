"""Reference embeddings used by the test suites and the CLI.

Each fixture records both face counts.  ``eg`` is the topological Euler
genus (direction-tracking tracer); ``target`` is the genus the protocol
certifies, counted with the memoryless successor map and clipped below
at 0 (orientable) or 1 (non-orientable).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .certificates import FaceAssignmentError, ProverError, prove
from .embedding import EmbeddingScheme, phi_genus, trace_faces_doubled, trace_faces_phi
from .graph import Graph, complete_graph, cycle_graph, path_graph, star_graph
from .oracle import min_genus_nonorientable, min_genus_orientable


@dataclass(frozen=True)
class Fixture:
    name: str
    graph: Graph
    scheme: EmbeddingScheme | None  # None: certified in tree mode
    orientable: bool
    eg: int
    phi_faces: int
    doubled_faces: int

    @property
    def tree_mode(self) -> bool:
        return self.scheme is None

    @property
    def phi_eg(self) -> int:
        return 2 + self.graph.m - self.graph.n - self.phi_faces

    @property
    def target(self) -> int:
        if self.scheme is None:
            return self.eg
        return max(self.phi_eg, 0 if self.orientable else 1)


def _fixture(name: str, g: Graph, s: EmbeddingScheme) -> Fixture:
    fd, _ = trace_faces_doubled(g, s)
    fp = trace_faces_phi(g, s).face_count
    return Fixture(name, g, s, s.orientable_mode, 2 + g.m - g.n - fd, fp, fd)


def _cycle(n: int) -> EmbeddingScheme:
    g = cycle_graph(n)
    return EmbeddingScheme.from_rotation({v: g.adjacency[v] for v in g.vertices})


def planar_k4() -> EmbeddingScheme:
    """First anchor-fixed rotation system of K4 with four faces."""
    g = complete_graph(4)
    choices = [[g.adjacency[v][:1] + p for p in itertools.permutations(g.adjacency[v][1:])] for v in g.vertices]
    for combo in itertools.product(*choices):
        s = EmbeddingScheme.from_rotation(dict(zip(g.vertices, combo)))
        if trace_faces_phi(g, s).face_count == 4:
            return s
    raise AssertionError("K4 is planar")  # pragma: no cover


def cyclic_k7() -> EmbeddingScheme:
    """Torus K7: rotation at i is ``i + a_1, ..., i + a_6 (mod 7)`` for one fixed offset pattern."""
    g = complete_graph(7)
    for rest in itertools.permutations(range(2, 7)):
        pattern = (1,) + rest
        rot = {i: tuple((i - 1 + a) % 7 + 1 for a in pattern) for i in g.vertices}
        s = EmbeddingScheme.from_rotation(rot)
        if trace_faces_doubled(g, s)[0] == 14:
            return s
    raise AssertionError("no cyclic torus embedding of K7")  # pragma: no cover


# hemi-icosahedron: the triangulation of the projective plane by K6
_K6_TRIANGLES = ((1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 6, 2),
                 (2, 3, 5), (3, 4, 6), (4, 5, 2), (5, 6, 3), (6, 2, 4))


def _link_rotation(triangles) -> dict[int, tuple[int, ...]]:
    links: dict[int, dict[int, list[int]]] = {}
    for tri in triangles:
        for v in tri:
            a, b = (x for x in tri if x != v)
            links.setdefault(v, {}).setdefault(a, []).append(b)
            links[v].setdefault(b, []).append(a)
    rot = {}
    for v, link in links.items():
        start = min(link)
        order = [start, min(link[start])]
        while len(order) < len(link):
            nxt = [x for x in link[order[-1]] if x != order[-2]]
            order.append(nxt[0])
        rot[v] = tuple(order)
    return rot


def _local_sign(rot: dict[int, tuple[int, ...]], tri: tuple[int, int, int], k: int) -> int:
    """+1 if the triangle, read cyclically, turns with the rotation at its k-th corner."""
    a, b, c = tri[k - 1], tri[k], tri[(k + 1) % 3]
    r = rot[b]
    return 1 if r[(r.index(a) + 1) % len(r)] == c else -1


def projective_k6_raw() -> EmbeddingScheme:
    """K6 rotations read off the hemi-icosahedron; an edge is negative when its two corners disagree."""
    rot = _link_rotation(_K6_TRIANGLES)
    neg = []
    for u, v in complete_graph(6).sorted_edges:
        tri = next(t for t in _K6_TRIANGLES if u in t and v in t)
        if _local_sign(rot, tri, tri.index(u)) != _local_sign(rot, tri, tri.index(v)):
            neg.append((u, v))
    return EmbeddingScheme.from_rotation(rot, neg, orientable_mode=False)


def best_switching(g: Graph, s: EmbeddingScheme) -> EmbeddingScheme:
    """Switching-equivalent scheme the honest prover can certify at the lowest genus.

    Switching preserves the surface but not the memoryless face count, so
    every vertex subset is tried (least bitmask wins ties).
    """
    best = None
    vs = g.vertices
    for mask in range(1 << len(vs)):
        cand = s.switched(v for i, v in enumerate(vs) if (mask >> i) & 1)
        fs = trace_faces_phi(g, cand)
        if fs.unplaceable:
            continue
        eg = phi_genus(g, fs)
        if best is not None and eg >= best[0]:
            continue
        try:
            prove(g, cand, max(eg, 0))
        except (FaceAssignmentError, ProverError):
            continue
        best = (eg, cand)
    if best is None:
        raise FaceAssignmentError("no switching of the scheme can be certified")
    return best[1]


@lru_cache(maxsize=None)
def fixtures() -> tuple[Fixture, ...]:
    k5 = complete_graph(5)
    k6 = complete_graph(6)
    tri = cycle_graph(3)
    out = [
        _fixture("C4", cycle_graph(4), _cycle(4)),
        _fixture("C6", cycle_graph(6), _cycle(6)),
        _fixture("K4-planar", complete_graph(4), planar_k4()),
        _fixture("K5-torus", k5, min_genus_orientable(k5).witness),
        _fixture("K7-torus", complete_graph(7), cyclic_k7()),
        _fixture("K5-projective", k5, best_switching(k5, min_genus_nonorientable(k5).witness)),
        _fixture("K6-projective", k6, best_switching(k6, projective_k6_raw())),
        _fixture("C3-negative", tri, negative_triangle()),
    ]
    for name, g in (("P4", path_graph(4)), ("K1,5", star_graph(5))):
        out.append(Fixture(name, g, None, False, 0, 1, 1))
    return tuple(out)


def negative_triangle() -> EmbeddingScheme:
    """Triangle with one negative edge: one face topologically, two memoryless cycles."""
    g = cycle_graph(3)
    return EmbeddingScheme.from_rotation({v: g.adjacency[v] for v in g.vertices}, [(3, 1)], orientable_mode=False)


def fixture(name: str) -> Fixture:
    for fx in fixtures():
        if fx.name == name:
            return fx
    raise KeyError(name)


def known_embeddings() -> tuple[Fixture, ...]:
    return tuple(fx for fx in fixtures() if fx.scheme is not None)
