"""Simple connected graphs, degeneracy orderings and rooted spanning trees.

Vertex identifiers are arbitrary positive integers; nothing here assumes
they are ``1..n``.  Neighbour iteration is always by ascending identifier
so every construction is deterministic.
"""
from __future__ import annotations

import heapq
import math
import random
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

Edge = tuple[int, int]


def edge_key(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class GraphError(ValueError):
    """Base class for malformed graph input."""


class MalformedLineError(GraphError):
    pass


class DuplicateEdgeError(GraphError):
    pass


class LoopError(GraphError):
    pass


class DisconnectedGraphError(GraphError):
    pass


class DuplicateVertexError(GraphError):
    pass


@dataclass(frozen=True)
class Graph:
    vertices: tuple[int, ...]
    edges: frozenset[Edge]

    def __post_init__(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise DuplicateVertexError("duplicate vertex identifier")
        for v in self.vertices:
            if not isinstance(v, int) or v < 1:
                raise GraphError(f"vertex identifier must be a positive integer, got {v!r}")
        for u, v in self.edges:
            if u == v:
                raise LoopError(f"loop at vertex {u}")
            if u > v:
                raise GraphError(f"edge {(u, v)} is not in canonical (low, high) order")
            if u not in vs or v not in vs:
                raise GraphError(f"edge {(u, v)} has an endpoint that is not a vertex")
        if not self.vertices:
            raise GraphError("graph has no vertices")
        if not _is_connected(self.vertices, self.adjacency):
            raise DisconnectedGraphError("graph is not connected")

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], vertices: Iterable[int] | None = None) -> "Graph":
        seen: set[Edge] = set()
        for u, v in edges:
            if u == v:
                raise LoopError(f"loop at vertex {u}")
            k = edge_key(u, v)
            if k in seen:
                raise DuplicateEdgeError(f"duplicate edge {k[0]}-{k[1]}")
            seen.add(k)
        if vertices is None:
            vertices = {x for e in seen for x in e}
        return cls(tuple(sorted(vertices)), frozenset(seen))

    @cached_property
    def adjacency(self) -> Mapping[int, tuple[int, ...]]:
        adj: dict[int, list[int]] = {v: [] for v in self.vertices}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return {v: tuple(sorted(ns)) for v, ns in adj.items()}

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def has_edge(self, u: int, v: int) -> bool:
        return edge_key(u, v) in self.edges

    @cached_property
    def sorted_edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.edges))

    def is_tree(self) -> bool:
        return self.m == self.n - 1

    def relabeled(self, mapping: Mapping[int, int]) -> "Graph":
        return Graph.from_edges(((mapping[u], mapping[v]) for u, v in self.edges),
                                vertices=(mapping[v] for v in self.vertices))


def _is_connected(vertices, adjacency) -> bool:
    start = vertices[0]
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adjacency[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(vertices)


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

def _ints(tokens: list[str], lineno: int) -> list[int]:
    try:
        vals = [int(t, 10) for t in tokens]
    except ValueError:
        raise MalformedLineError(f"line {lineno}: expected decimal integers, got {' '.join(tokens)!r}") from None
    return vals


def parse_graph(text: str) -> Graph:
    """Parse the line-based graph format (``graph n m`` / ``v id`` / ``e a b``)."""
    header = None
    vertices: list[int] = []
    edges: list[Edge] = []
    seen_v: set[int] = set()
    seen_e: set[Edge] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        if header is None:
            if tok[0] != "graph" or len(tok) != 3:
                raise MalformedLineError(f"line {lineno}: expected 'graph <n> <m>' header")
            header = _ints(tok[1:], lineno)
            if header[0] < 1 or header[1] < 0:
                raise MalformedLineError(f"line {lineno}: bad vertex/edge counts")
            continue
        if tok[0] == "v" and len(tok) == 2:
            (v,) = _ints(tok[1:], lineno)
            if v < 1:
                raise MalformedLineError(f"line {lineno}: identifiers must be positive")
            if v in seen_v:
                raise DuplicateVertexError(f"line {lineno}: duplicate vertex {v}")
            seen_v.add(v)
            vertices.append(v)
        elif tok[0] == "e" and len(tok) == 3:
            a, b = _ints(tok[1:], lineno)
            if a == b:
                raise LoopError(f"line {lineno}: loop at vertex {a}")
            k = edge_key(a, b)
            if k in seen_e:
                raise DuplicateEdgeError(f"line {lineno}: duplicate edge {a}-{b}")
            seen_e.add(k)
            edges.append(k)
        else:
            raise MalformedLineError(f"line {lineno}: unrecognised line {line!r}")
    if header is None:
        raise MalformedLineError("missing 'graph <n> <m>' header")
    n, m = header
    if len(vertices) != n or len(edges) != m:
        raise MalformedLineError(f"header announces {n} vertices/{m} edges, found {len(vertices)}/{len(edges)}")
    for a, b in edges:
        if a not in seen_v or b not in seen_v:
            raise MalformedLineError(f"edge {a}-{b} references an undeclared vertex")
    return Graph(tuple(sorted(vertices)), frozenset(edges))


def format_graph(g: Graph) -> str:
    lines = [f"graph {g.n} {g.m}"]
    lines += [f"v {v}" for v in g.vertices]
    lines += [f"e {u} {v}" for u, v in g.sorted_edges]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# degeneracy
# ---------------------------------------------------------------------------

def degeneracy_order(g: Graph) -> tuple[tuple[int, ...], int]:
    """Return ``(order, k)``: every vertex has at most ``k`` neighbours before it.

    Built by repeatedly deleting a minimum-degree vertex (least identifier on
    ties) and reversing the deletion sequence.
    """
    deg = {v: g.degree(v) for v in g.vertices}
    heap = [(d, v) for v, d in deg.items()]
    heapq.heapify(heap)
    removed: set[int] = set()
    removal: list[int] = []
    k = 0
    while heap:
        d, v = heapq.heappop(heap)
        if v in removed or d != deg[v]:
            continue
        removed.add(v)
        removal.append(v)
        k = max(k, d)
        for u in g.adjacency[v]:
            if u not in removed:
                deg[u] -= 1
                heapq.heappush(heap, (deg[u], u))
    return tuple(reversed(removal)), k


def heawood_bound(g: int) -> int:
    """Degeneracy bound ``floor(max(5, (5 + sqrt(1 + 24g)) / 2))`` for Euler genus ``g``.

    Exact in integers: ``floor((5 + x) / 2) == (5 + isqrt(x^2)) // 2``.
    """
    if g < 0:
        raise ValueError("Euler genus must be non-negative")
    return max(5, (5 + math.isqrt(1 + 24 * g)) // 2)


# ---------------------------------------------------------------------------
# rooted spanning trees
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RootedTree:
    root: int
    parent: Mapping[int, int]
    depth: Mapping[int, int] = field(compare=False)

    @cached_property
    def children(self) -> Mapping[int, tuple[int, ...]]:
        ch: dict[int, list[int]] = {v: [] for v in self.depth}
        for v, p in self.parent.items():
            ch[p].append(v)
        return {v: tuple(sorted(c)) for v, c in ch.items()}

    @cached_property
    def edges(self) -> frozenset[Edge]:
        return frozenset(edge_key(v, p) for v, p in self.parent.items())

    def path_to_root(self, v: int) -> list[int]:
        path = [v]
        while path[-1] != self.root:
            path.append(self.parent[path[-1]])
        return path

    def postorder(self) -> list[int]:
        order = sorted(self.depth, key=lambda v: (-self.depth[v], v))
        return order

    def check(self, g: Graph) -> None:
        """Raise ``ValueError`` unless this is a spanning tree of ``g``."""
        if set(self.depth) != set(g.vertices):
            raise ValueError("tree does not span the graph")
        if self.root in self.parent or self.depth[self.root] != 0:
            raise ValueError("root must have depth 0 and no parent")
        if len(self.parent) != g.n - 1:
            raise ValueError("a spanning tree has n-1 parent pointers")
        for v, p in self.parent.items():
            if not g.has_edge(v, p):
                raise ValueError(f"parent edge {v}-{p} is not a graph edge")
            if self.depth[v] != self.depth[p] + 1:
                raise ValueError(f"depth mismatch at {v}")


def _depths_from(root: int, adj: Mapping[int, Iterable[int]]) -> tuple[dict[int, int], dict[int, int]]:
    parent: dict[int, int] = {}
    depth = {root: 0}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in sorted(adj[x]):
            if y not in depth:
                depth[y] = depth[x] + 1
                parent[y] = x
                queue.append(y)
    return parent, depth


def bfs_tree(g: Graph, root: int) -> RootedTree:
    if root not in g.adjacency:
        raise KeyError(f"root {root} is not a vertex")
    parent, depth = _depths_from(root, g.adjacency)
    return RootedTree(root, parent, depth)


def tree_from_edges(edges: Iterable[tuple[int, int]], root: int) -> RootedTree:
    adj: dict[int, set[int]] = {root: set()}
    count = 0
    for u, v in edges:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
        count += 1
    parent, depth = _depths_from(root, adj)
    if len(depth) != len(adj):
        raise ValueError("edge set is not connected")
    if count != len(adj) - 1:
        raise ValueError("edge set contains a cycle")
    return RootedTree(root, parent, depth)


def reroot(t: RootedTree, g: Graph, new_root: int) -> RootedTree:
    """Same tree edges, rooted at ``new_root``."""
    if new_root not in g.adjacency:
        raise KeyError(f"{new_root} is not a vertex")
    if new_root == t.root:
        return t
    parent = dict(t.parent)
    path = t.path_to_root(new_root)
    del parent[new_root]
    for child, par in zip(path, path[1:]):
        parent[par] = child
    depth = {new_root: 0}
    queue = deque([new_root])
    children: dict[int, list[int]] = {}
    for v, p in parent.items():
        children.setdefault(p, []).append(v)
    while queue:
        x = queue.popleft()
        for y in children.get(x, ()):
            depth[y] = depth[x] + 1
            queue.append(y)
    return RootedTree(new_root, parent, depth)


# ---------------------------------------------------------------------------
# small graph families
# ---------------------------------------------------------------------------

def complete_graph(n: int, first: int = 1) -> Graph:
    vs = range(first, first + n)
    return Graph.from_edges(((a, b) for a in vs for b in vs if a < b), vertices=vs)


def cycle_graph(n: int, first: int = 1) -> Graph:
    if n < 3:
        raise ValueError("a simple cycle needs at least 3 vertices")
    vs = list(range(first, first + n))
    return Graph.from_edges(zip(vs, vs[1:] + vs[:1]), vertices=vs)


def path_graph(n: int, first: int = 1) -> Graph:
    vs = list(range(first, first + n))
    return Graph.from_edges(zip(vs, vs[1:]), vertices=vs)


def star_graph(leaves: int, center: int = 1) -> Graph:
    return Graph.from_edges((center, center + i) for i in range(1, leaves + 1))


def complete_bipartite(a: int, b: int) -> Graph:
    left = range(1, a + 1)
    right = range(a + 1, a + b + 1)
    return Graph.from_edges((x, y) for x in left for y in right)


def random_connected_graph(n: int, rng: random.Random, p: float = 0.4) -> Graph:
    """Random spanning tree plus independent extra edges with probability ``p``."""
    vs = list(range(1, n + 1))
    edges = set()
    for i in range(1, n):
        edges.add(edge_key(vs[i], vs[rng.randrange(i)]))
    for a in vs:
        for b in vs:
            if a < b and (a, b) not in edges and rng.random() < p:
                edges.add((a, b))
    return Graph(tuple(vs), frozenset(edges))
