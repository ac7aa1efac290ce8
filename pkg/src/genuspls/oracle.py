"""Brute-force minimum Euler genus for small graphs.

This is the ground truth the protocol is tested against, so it never uses
the memoryless successor map: orientable systems are traced as orbits of
``sigma . alpha`` and signed systems with the direction-tracking walk.

Search space reductions:

* each vertex's rotation is enumerated with its least neighbour fixed in
  front, ``(d - 1)!`` cyclic orders per vertex;
* signs are fixed to +1 on a BFS spanning tree (every scheme can be
  switched into that form), and only sign vectors with at least one
  negative cotree edge are kept, i.e. the non-orientable classes.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .embedding import EmbeddingScheme
from .graph import Graph, bfs_tree


class BudgetExceeded(RuntimeError):
    def __init__(self, what: str, required: int, allowed: int):
        super().__init__(f"{what}: {required} required, budget {allowed}")
        self.required = required
        self.allowed = allowed


@dataclass(frozen=True)
class OracleBudget:
    max_rotation_systems: int = 10**7
    max_sign_classes: int = 2**16

    def __post_init__(self):
        if self.max_rotation_systems < 1 or self.max_sign_classes < 1:
            raise ValueError("budgets must be positive")


@dataclass(frozen=True)
class OracleResult:
    min_eg: int
    witness: EmbeddingScheme
    systems_searched: int
    faces: int


def rotation_system_count(g: Graph) -> int:
    return math.prod(math.factorial(max(g.degree(v) - 1, 0)) for v in g.vertices)


def sign_class_count(g: Graph) -> int:
    return 2 ** (g.m - g.n + 1) - 1


def _tables(g: Graph):
    edge_index = {e: k for k, e in enumerate(g.sorted_edges)}

    def dart(v, u):
        k = edge_index[(v, u) if v < u else (u, v)]
        return 2 * k + (0 if v < u else 1)

    radix, base, vdeg, vstart, vdarts = [], [], [], [], []
    succ: list[int] = []
    pred: list[int] = []
    D = 2 * g.m
    dart_vertex = np.zeros(D, np.int64)
    dart_local = np.zeros(D, np.int64)
    orders: list[list[tuple[int, ...]]] = []
    for i, v in enumerate(g.vertices):
        ns = g.adjacency[v]
        local = {u: p for p, u in enumerate(ns)}
        vstart.append(len(vdarts))
        for u in ns:
            d = dart(v, u)
            vdarts.append(d)
            dart_vertex[d] = i
            dart_local[d] = local[u]
        choices = [ns[:1] + rest for rest in itertools.permutations(ns[1:])]
        orders.append(choices)
        radix.append(len(choices))
        base.append(len(succ))
        vdeg.append(len(ns))
        for order in choices:
            row_s = [0] * len(ns)
            row_p = [0] * len(ns)
            for j, u in enumerate(order):
                row_s[local[u]] = dart(v, order[(j + 1) % len(order)])
                row_p[local[u]] = dart(v, order[j - 1])
            succ += row_s
            pred += row_p
    tree = bfs_tree(g, g.vertices[0])
    cotree = [edge_index[e] for e in g.sorted_edges if e not in tree.edges]
    arr = lambda xs: np.asarray(xs, dtype=np.int64)  # noqa: E731
    tables = dict(radix=arr(radix), base=arr(base), succ=arr(succ), pred=arr(pred), vdarts=arr(vdarts),
                  vdeg=arr(vdeg), vstart=arr(vstart), cotree=arr(cotree), dart_vertex=dart_vertex,
                  dart_local=dart_local)
    return tables, orders, [g.sorted_edges[k] for k in cotree]


def _search(g: Graph, signed: bool, b: OracleBudget, limit: int | None, backend: str | None):
    if g.m == 0:
        return OracleResult(0, EmbeddingScheme.from_rotation({g.vertices[0]: ()}), 1, 1)
    rs = rotation_system_count(g)
    if rs > b.max_rotation_systems:
        raise BudgetExceeded("rotation systems", rs, b.max_rotation_systems)
    if signed:
        sc = sign_class_count(g)
        if sc < 1:
            raise ValueError("a tree has no non-orientable cellular embedding")
        if sc > b.max_sign_classes:
            raise BudgetExceeded("sign classes", sc, b.max_sign_classes)
    tables, orders, cotree_edges = _tables(g)
    cap = limit if limit is not None else 2 * g.m + 1
    faces, digits, mask, searched = _kernels.search_max_faces(tables, signed, cap, backend)
    rotation = {v: orders[i][digits[i]] for i, v in enumerate(g.vertices)}
    negative = [e for k, e in enumerate(cotree_edges) if (mask >> k) & 1]
    witness = EmbeddingScheme.from_rotation(rotation, negative, orientable_mode=not signed)
    return OracleResult(2 + g.m - g.n - faces, witness, searched, faces)


def min_genus_orientable(g: Graph, b: OracleBudget = OracleBudget(), backend: str | None = None) -> OracleResult:
    return _search(g, False, b, None, backend)


def min_genus_nonorientable(g: Graph, b: OracleBudget = OracleBudget(), backend: str | None = None) -> OracleResult:
    return _search(g, True, b, None, backend)


def euler_lower_bound(g: Graph, orientable: bool) -> int:
    """Genus lower bound from faces of length at least 3 (graphs with a cycle)."""
    if g.m < g.n:
        return 0
    lb = 2 + g.m - g.n - (2 * g.m) // 3
    if orientable and lb % 2:
        lb += 1
    return max(lb, 0 if orientable else 1)


def is_embeddable(g: Graph, target_eg: int, orientable: bool, b: OracleBudget = OracleBudget(),
                  backend: str | None = None) -> bool:
    """Whether ``g`` embeds in an (orientable / non-orientable) surface of Euler genus <= target."""
    if target_eg < 0:
        return False
    if g.is_tree():
        return True
    if euler_lower_bound(g, orientable) > target_eg:
        return False
    from .fixtures import known_embeddings  # fixtures depend on this module

    for fx in known_embeddings():
        if fx.graph == g and fx.orientable == orientable and fx.eg <= target_eg:
            return True
    needed = 2 + g.m - g.n - target_eg
    res = _search(g, not orientable, b, needed, backend)
    return res.min_eg <= target_eg
