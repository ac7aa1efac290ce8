"""Embedding schemes (rotation systems with edge signs) and face tracing.

A half-edge is the ordered pair ``(at, toward)`` of vertex identifiers; this
is unambiguous because graphs are simple.

Two face tracers live here:

* :func:`trace_faces_phi` follows the memoryless successor
  ``(v -> u)  |->  (u -> sigma_u^{lambda_uv}(v))``.  This is the map the
  certificates and the local verifier are built on.
* :func:`trace_faces_doubled` walks ``(half-edge, direction)`` states and
  flips the direction on every negative edge.  This is the classical
  facial-walk procedure and is the topological ground truth.

On all-positive schemes the two agree.  With negative edges they can
differ (see ``fixtures.negative_triangle``); :func:`diagnostics` reports both.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .graph import Edge, Graph, RootedTree, bfs_tree, edge_key, reroot, tree_from_edges

HalfEdge = tuple[int, int]


class SchemeError(ValueError):
    """The embedding scheme does not match the graph."""


class InconsistentGenusError(ValueError):
    """Euler's formula produced a negative genus."""


@dataclass(frozen=True)
class EmbeddingScheme:
    rotation: Mapping[int, tuple[int, ...]]
    sign: Mapping[Edge, int]
    orientable_mode: bool = True

    @classmethod
    def from_rotation(cls, rotation: Mapping[int, Iterable[int]], negative: Iterable[tuple[int, int]] = (),
                      orientable_mode: bool | None = None) -> "EmbeddingScheme":
        rot = {v: tuple(ns) for v, ns in rotation.items()}
        sign = {edge_key(v, u): 1 for v, ns in rot.items() for u in ns}
        neg = [edge_key(a, b) for a, b in negative]
        for e in neg:
            sign[e] = -1
        if orientable_mode is None:
            orientable_mode = not neg
        return cls(rot, sign, orientable_mode)

    @cached_property
    def _position(self) -> dict[HalfEdge, int]:
        return {(v, u): i for v, ns in self.rotation.items() for i, u in enumerate(ns)}

    def lam(self, u: int, v: int) -> int:
        return 1 if self.orientable_mode else self.sign[edge_key(u, v)]

    def rotate(self, at: int, frm: int, offset: int) -> int:
        """Neighbour of ``at`` found ``offset`` steps after ``frm`` in ``rotation(at)``."""
        ns = self.rotation[at]
        return ns[(self._position[(at, frm)] + offset) % len(ns)]

    def half_edges(self) -> list[HalfEdge]:
        return sorted(self._position)

    def switched(self, vertices: Iterable[int]) -> "EmbeddingScheme":
        """Reverse the rotation at each given vertex and negate the edges it touches."""
        sw = set(vertices)
        rot = {v: (tuple(reversed(ns)) if v in sw else ns) for v, ns in self.rotation.items()}
        sign = {e: (-s if (e[0] in sw) != (e[1] in sw) else s) for e, s in self.sign.items()}
        return EmbeddingScheme(rot, sign, False)

    def with_signs(self, negative: Iterable[tuple[int, int]], orientable_mode: bool = False) -> "EmbeddingScheme":
        return EmbeddingScheme.from_rotation(self.rotation, negative, orientable_mode)

    def negative_edges(self) -> list[Edge]:
        return sorted(e for e, s in self.sign.items() if s < 0)

    def relabeled(self, mapping: Mapping[int, int]) -> "EmbeddingScheme":
        rot = {mapping[v]: tuple(mapping[u] for u in ns) for v, ns in self.rotation.items()}
        sign = {edge_key(mapping[a], mapping[b]): s for (a, b), s in self.sign.items()}
        return EmbeddingScheme(rot, sign, self.orientable_mode)


def validate_scheme(g: Graph, s: EmbeddingScheme) -> None:
    if set(s.rotation) != set(g.vertices):
        raise SchemeError("rotation must be given for exactly the graph's vertices")
    for v in g.vertices:
        rot = s.rotation[v]
        if len(rot) != len(set(rot)):
            raise SchemeError(f"rotation at {v} repeats a neighbour")
        if set(rot) != set(g.adjacency[v]):
            missing = set(g.adjacency[v]) - set(rot)
            extra = set(rot) - set(g.adjacency[v])
            raise SchemeError(f"rotation at {v}: missing {sorted(missing)}, extra {sorted(extra)}")
    for e, lam in s.sign.items():
        if e not in g.edges:
            raise SchemeError(f"sign given for non-edge {e}")
        if lam not in (-1, 1):
            raise SchemeError(f"sign of {e} must be +1 or -1")
        if s.orientable_mode and lam != 1:
            raise SchemeError(f"negative edge {e} in orientable mode")
    if set(s.sign) != set(g.edges):
        raise SchemeError("every edge needs a sign")


def phi_successor(s: EmbeddingScheme, h: HalfEdge) -> HalfEdge:
    v, u = h
    if (v, u) not in s._position:
        raise KeyError(f"unknown half-edge {h}")
    return (u, s.rotate(u, v, s.lam(u, v)))


# ---------------------------------------------------------------------------
# memoryless tracing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FaceStructure:
    face_of: Mapping[HalfEdge, int]
    root_of: tuple[HalfEdge, ...]
    f_index: Mapping[HalfEdge, int]
    degree: tuple[int, ...]
    phi_bijective: bool
    # faces whose hanging half-edges admit no valid f-index for any root choice
    unplaceable: frozenset[int] = field(default_factory=frozenset)

    @property
    def face_count(self) -> int:
        # with no half-edges there are no cycles, but a point on the sphere still has one face
        return max(len(self.root_of), 1)

    def roots_at(self, v: int) -> int:
        return sum(1 for h in self.root_of if h[0] == v)


def trace_faces_phi(g: Graph, s: EmbeddingScheme) -> FaceStructure:
    """Faces as the cycles of the functional graph of :func:`phi_successor`.

    When the successor map is not injective some half-edges hang off the
    cycles.  They join the face of the cycle they run into, with f-index
    counting down towards the junction.  A face's root is the least
    half-edge of its cycle for which that count never goes negative.
    """
    hs = s.half_edges()
    succ = {h: phi_successor(s, h) for h in hs}
    bijective = len(set(succ.values())) == len(hs)

    state: dict[HalfEdge, int] = {}
    cycles: list[list[HalfEdge]] = []
    for h in hs:
        if h in state:
            continue
        path = []
        x = h
        while x not in state:
            state[x] = -1
            path.append(x)
            x = succ[x]
        if state[x] == -1 and x in path:
            cyc = path[path.index(x):]
            cycles.append(cyc)
            for y in cyc:
                state[y] = len(cycles) - 1
        for y in path:
            if state[y] == -1:
                state[y] = -2

    on_cycle = {h: i for i, cyc in enumerate(cycles) for h in cyc}
    # (junction, distance) for half-edges that hang off a cycle
    tail: dict[HalfEdge, tuple[HalfEdge, int]] = {}
    for h in hs:
        if h in on_cycle or h in tail:
            continue
        path = []
        x = h
        while x not in on_cycle and x not in tail:
            path.append(x)
            x = succ[x]
        junction, dist = (x, 0) if x in on_cycle else tail[x]
        for y in reversed(path):
            dist += 1
            tail[y] = (junction, dist)

    height: dict[HalfEdge, int] = {}
    for junction, dist in tail.values():
        height[junction] = max(height.get(junction, 0), dist)

    face_of: dict[HalfEdge, int] = {}
    f_index: dict[HalfEdge, int] = {}
    roots: list[HalfEdge] = []
    unplaceable = set()
    for i, cyc in enumerate(cycles):
        pos = {h: p for p, h in enumerate(cyc)}
        c = len(cyc)
        junctions = [j for j in cyc if j in height]
        chosen = None
        for r in sorted(cyc):
            p = pos[r]
            if all(j == r or (pos[j] - p) % c >= height[j] for j in junctions):
                chosen = r
                break
        if chosen is None:
            unplaceable.add(i)
            chosen = min(cyc)
        p = pos[chosen]
        roots.append(chosen)
        for h in cyc:
            face_of[h] = i
            f_index[h] = (pos[h] - p) % c
    for h, (junction, dist) in tail.items():
        i = on_cycle[junction]
        face_of[h] = i
        if i in unplaceable:
            continue
        if junction == roots[i]:
            f_index[h] = height[junction] - dist
        else:
            f_index[h] = f_index[junction] - dist
    return FaceStructure(face_of, tuple(roots), f_index, tuple(len(c) for c in cycles),
                         bijective, frozenset(unplaceable))


# ---------------------------------------------------------------------------
# direction-tracking tracing
# ---------------------------------------------------------------------------

def trace_faces_doubled(g: Graph, s: EmbeddingScheme) -> tuple[int, list[int]]:
    """Return ``(face_count, orbit_lengths)`` of the direction-tracking walk.

    Every facial walk is traced once in each direction, so the number of
    orbits must be even; an odd count raises instead of being rounded.
    A graph without edges is a point on the sphere and has one face.
    """
    if not s.half_edges():
        return 1, []
    seen: set[tuple[HalfEdge, int]] = set()
    lengths: list[int] = []
    for h in s.half_edges():
        for d in (1, -1):
            if (h, d) in seen:
                continue
            length = 0
            x = (h, d)
            while x not in seen:
                seen.add(x)
                length += 1
                (v, u), dd = x
                nd = dd * s.lam(u, v)
                x = ((u, s.rotate(u, v, nd)), nd)
            lengths.append(length)
    if len(lengths) % 2:
        raise InconsistentGenusError(f"odd number of doubled orbits ({len(lengths)})")
    return len(lengths) // 2, lengths


def euler_genus(g: Graph, face_count: int) -> int:
    if face_count < 1:
        raise ValueError("face count must be positive")
    eg = 2 + g.m - g.n - face_count
    if eg < 0:
        raise InconsistentGenusError(f"negative Euler genus {eg} (n={g.n}, m={g.m}, F={face_count})")
    return eg


def phi_genus(g: Graph, fs: FaceStructure) -> int:
    """``2 + m - n - F`` with F counted by the memoryless tracer (may be negative)."""
    return 2 + g.m - g.n - fs.face_count


# ---------------------------------------------------------------------------
# orientability
# ---------------------------------------------------------------------------

def _parities(g: Graph, s: EmbeddingScheme, t: RootedTree) -> dict[int, int]:
    par = {t.root: 0}
    for v in sorted(t.depth, key=t.depth.__getitem__):
        if v != t.root:
            p = t.parent[v]
            par[v] = par[p] ^ (s.lam(v, p) < 0)
    return par


def _odd_non_tree_edges(g: Graph, s: EmbeddingScheme, t: RootedTree) -> list[Edge]:
    par = _parities(g, s, t)
    return [e for e in g.sorted_edges
            if e not in t.edges and (s.lam(*e) < 0) != (par[e[0]] != par[e[1]])]


def is_orientable_scheme(g: Graph, s: EmbeddingScheme) -> bool:
    """True iff no cycle carries an odd number of negative edges."""
    if s.orientable_mode:
        return True
    return not _odd_non_tree_edges(g, s, bfs_tree(g, g.vertices[0]))


@dataclass(frozen=True)
class OddCycleWitness:
    root: int
    partner: int  # other endpoint of the special negative non-tree edge
    tree: RootedTree
    cycle: tuple[int, ...]  # tree path root..partner
    rebuilt: bool  # True when the BFS tree had no usable negative edge


def find_odd_negative_cycle(g: Graph, s: EmbeddingScheme) -> OddCycleWitness | None:
    """Spanning tree rooted on a cycle with an odd number of negative edges.

    The cycle closes through a negative non-tree edge at the root; the rest
    of the cycle is the tree path from the root to the other endpoint.
    First tries the BFS tree; if none of its odd fundamental cycles closes
    through a negative edge, the tree is regrown around such a cycle.
    """
    t = bfs_tree(g, g.vertices[0])
    odd = _odd_non_tree_edges(g, s, t)
    if s.orientable_mode or not odd:
        return None
    for u, v in odd:
        if s.lam(u, v) < 0:
            rt = reroot(t, g, u)
            return OddCycleWitness(u, v, rt, tuple(reversed(rt.path_to_root(v))), False)
    # odd cycle through a positive non-tree edge: it still holds a negative tree edge
    u, v = odd[0]
    pu, pv = t.path_to_root(u), t.path_to_root(v)
    common = set(pu) & set(pv)
    lca = next(x for x in pu if x in common)
    cyc = pu[:pu.index(lca) + 1] + list(reversed(pv[:pv.index(lca)]))  # u .. lca .. v
    ring = list(zip(cyc, cyc[1:])) + [(v, u)]
    k = next(i for i, (a, b) in enumerate(ring) if s.lam(a, b) < 0)
    # reopen the cycle at the negative edge ring[k]
    order = cyc[k + 1:] + cyc[:k + 1]
    x, y = order[0], order[-1]
    if x > y:
        order.reverse()
        x, y = y, x
    path_edges = list(zip(order, order[1:]))
    inside = set(order)
    extra = []
    queue = deque(sorted(inside))
    while queue:
        a = queue.popleft()
        for b in g.adjacency[a]:
            if b not in inside:
                inside.add(b)
                extra.append((a, b))
                queue.append(b)
    tree = tree_from_edges(path_edges + extra, x)
    return OddCycleWitness(x, y, tree, tuple(order), True)


# ---------------------------------------------------------------------------
# diagnostics and text format
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchemeDiagnostics:
    phi_face_count: int
    doubled_face_count: int
    phi_bijective: bool
    euler_genus_phi: int
    euler_genus_doubled: int
    orientable: bool


def diagnostics(g: Graph, s: EmbeddingScheme) -> SchemeDiagnostics:
    fs = trace_faces_phi(g, s)
    fd, _ = trace_faces_doubled(g, s)
    return SchemeDiagnostics(fs.face_count, fd, fs.phi_bijective, phi_genus(g, fs),
                             2 + g.m - g.n - fd, is_orientable_scheme(g, s))


def parse_embedding(text: str) -> EmbeddingScheme:
    orientable = None
    rotation: dict[int, tuple[int, ...]] = {}
    negative: list[Edge] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        try:
            if orientable is None:
                if tok[0] != "embedding" or len(tok) != 2 or tok[1] not in ("orientable", "nonorientable"):
                    raise SchemeError("expected 'embedding orientable|nonorientable' header")
                orientable = tok[1] == "orientable"
            elif tok[0] == "rot" and tok[1].endswith(":"):
                v = int(tok[1][:-1])
                if v in rotation:
                    raise SchemeError(f"second rotation for vertex {v}")
                rotation[v] = tuple(int(x) for x in tok[2:])
            elif tok[0] == "neg" and len(tok) == 3:
                negative.append(edge_key(int(tok[1]), int(tok[2])))
            else:
                raise SchemeError(f"unrecognised line {line!r}")
        except (ValueError, IndexError) as exc:
            raise SchemeError(f"line {lineno}: {exc}") from None
    if orientable is None:
        raise SchemeError("missing embedding header")
    if orientable and negative:
        raise SchemeError("negative edges in an orientable embedding file")
    s = EmbeddingScheme.from_rotation(rotation, (), orientable)
    sign = dict(s.sign)
    for e in negative:
        if e not in sign:
            raise SchemeError(f"neg line names a non-edge {e}")
        sign[e] = -1
    return EmbeddingScheme(s.rotation, sign, orientable)


def format_embedding(s: EmbeddingScheme) -> str:
    lines = ["embedding " + ("orientable" if s.orientable_mode else "nonorientable")]
    for v in sorted(s.rotation):
        lines.append(f"rot {v}: " + " ".join(map(str, s.rotation[v])))
    if not s.orientable_mode:
        lines += [f"neg {a} {b}" for a, b in s.negative_edges()]
    return "\n".join(lines) + "\n"
