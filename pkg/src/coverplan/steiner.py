"""
Kou-Markowsky-Berman Steiner tree and the coverage-edge trimming step.

``steiner_tree`` accepts either a :class:`CoverageGraph` or a square weight
matrix in which ``inf`` marks a missing edge.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import csgraph_from_dense, dijkstra

from .errors import GraphDisconnected, StructuralError
from .graph import DENSE_LIMIT, START, CoverageGraph

log = logging.getLogger(__name__)

Edge = tuple[int, int, float]


@dataclass(frozen=True)
class SteinerTree:
    edges: frozenset[Edge]  # (u, v, w) with u < v
    terminals: frozenset[int]
    cost: float

    @property
    def vertices(self) -> set[int]:
        vs = {u for u, _, _ in self.edges} | {v for _, v, _ in self.edges}
        return vs or set(self.terminals)

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = defaultdict(list)
        for u, v, _ in sorted(self.edges):
            adj[u].append(v)
            adj[v].append(u)
        return adj


@dataclass(frozen=True)
class TrimResult:
    selected: frozenset[int]  # viewpoint vertices kept in the residual tree
    selected_point_ids: frozenset[int]
    residual: frozenset[Edge]
    removed_weight: float
    left_cost: float
    connected: bool


def _edge(u, v, w) -> Edge:
    return (u, v, w) if u < v else (v, u, w)


class _DisjointSet:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def kruskal(edges) -> list[Edge]:
    """Minimum spanning forest; ties broken by (weight, smaller id, larger id)."""
    ds = _DisjointSet()
    out = []
    for u, v, w in sorted((_edge(*e) for e in edges), key=lambda e: (e[2], e[0], e[1])):
        if ds.union(u, v):
            out.append((u, v, w))
    return out


def _induced_edges(g, vertices) -> list[Edge]:
    vs = np.asarray(vertices)
    if isinstance(g, CoverageGraph):
        W = g.submatrix(vs)
    else:
        W = np.asarray(g, dtype=float)[np.ix_(vs, vs)]
    iu, ju = np.triu_indices(len(vs), k=1)
    w = W[iu, ju]
    ok = np.isfinite(w)
    return [(int(vs[i]), int(vs[j]), float(x)) for i, j, x in zip(iu[ok], ju[ok], w[ok])]


def _dense_dijkstra(g: CoverageGraph, source: int):
    V = g.n_vertices
    dist = np.full(V, np.inf)
    pred = np.full(V, -9999, dtype=int)
    done = np.zeros(V, dtype=bool)
    dist[source] = 0.0
    for _ in range(V):
        cand = np.where(done, np.inf, dist)
        u = int(np.argmin(cand))
        if not np.isfinite(cand[u]):
            break
        done[u] = True
        alt = dist[u] + g.row(u)
        better = (alt < dist) & ~done
        dist[better] = alt[better]
        pred[better] = u
    return dist, pred


def shortest_paths(g, sources):
    """Distances and predecessor rows from each source (scipy convention: -9999 = none)."""
    if isinstance(g, CoverageGraph) and g.n_vertices - g.n_sides - 1 > DENSE_LIMIT:
        rows = [_dense_dijkstra(g, s) for s in sources]
        return np.array([r[0] for r in rows]), np.array([r[1] for r in rows])
    W = g.dense_matrix() if isinstance(g, CoverageGraph) else np.asarray(g, dtype=float)
    W = np.where(np.eye(len(W), dtype=bool), np.inf, W)
    csg = csgraph_from_dense(W, null_value=np.inf)
    return dijkstra(csg, directed=False, indices=list(sources), return_predecessors=True)


def _prune(edges: set[Edge], terminals: set[int]) -> set[Edge]:
    edges = set(edges)
    while True:
        deg: dict[int, int] = defaultdict(int)
        for u, v, _ in edges:
            deg[u] += 1
            deg[v] += 1
        leaves = {x for x, d in deg.items() if d == 1 and x not in terminals}
        if not leaves:
            return edges
        edges = {e for e in edges if e[0] not in leaves and e[1] not in leaves}


def steiner_tree(g, terminals) -> SteinerTree:
    terms = sorted(set(terminals))
    if len(terms) <= 1:
        return SteinerTree(frozenset(), frozenset(terms), 0.0)
    dist, pred = shortest_paths(g, terms)
    closure = []
    for i, u in enumerate(terms):
        for v in terms[i + 1:]:
            d = dist[i, v]
            if not np.isfinite(d):
                raise GraphDisconnected(f"terminals {u} and {v} are not connected")
            closure.append((u, v, float(d)))
    row_of = {t: i for i, t in enumerate(terms)}
    reached = set(terms)
    for u, v, _ in kruskal(closure):
        row = pred[row_of[u]]
        x = v
        while x != u:
            x = int(row[x])
            reached.add(x)
    # MST over the subgraph induced by every vertex the expanded paths touch
    tree = _prune(set(kruskal(_induced_edges(g, sorted(reached)))), set(terms))
    return SteinerTree(frozenset(tree), frozenset(terms), sum(w for _, _, w in tree))


def repair_midpoint_leaves(tree: SteinerTree, g: CoverageGraph) -> tuple[SteinerTree, int]:
    """Reattach so that every midpoint is a leaf.

    For a midpoint with several incident viewpoints, one viewpoint keeps the
    coverage edge and the others are joined to it by direct edges; the keeper
    minimises the total reconnection length. Returns the tree and the number
    of midpoints that needed repair.
    """
    adj = tree.adjacency()
    edges = set(tree.edges)
    repaired = 0
    for q in sorted(v for v in adj if g.is_midpoint(v) and len(adj[v]) > 1):
        nbrs = sorted(adj[q])
        keeper = min(nbrs, key=lambda p: (sum(g.weight(p, o) for o in nbrs if o != p), p))
        for p in nbrs:
            if p == keeper:
                continue
            edges.discard(_edge(q, p, g.weight(q, p)))
            edges.add(_edge(keeper, p, g.weight(keeper, p)))
        repaired += 1
    if repaired:
        log.info("re-attached %d internal midpoint(s) as leaves", repaired)
        tree = SteinerTree(frozenset(edges), tree.terminals, sum(w for _, _, w in edges))
    return tree, repaired


def _is_connected(vertices: set[int], edges) -> bool:
    if len(vertices) <= 1:
        return True
    ds = _DisjointSet()
    for v in vertices:
        ds.find(v)
    for u, v, _ in edges:
        ds.union(u, v)
    return len({ds.find(v) for v in vertices}) == 1


def trim(tree: SteinerTree, g: CoverageGraph) -> TrimResult:
    """Drop every viewpoint-midpoint edge and report the residual tree."""
    adj = tree.adjacency()
    for q in range(1, g.n_sides + 1):
        if q in tree.terminals and not adj.get(q):
            raise StructuralError(f"midpoint vertex {q} is not attached to the tree")
        if len(adj.get(q, ())) > 1:
            log.warning("midpoint vertex %d is internal; keeping all %d incident viewpoints",
                        q, len(adj[q]))
    removed = [e for e in tree.edges if g.is_midpoint(e[0]) or g.is_midpoint(e[1])]
    residual = frozenset(tree.edges - set(removed))
    selected = {v for e in removed for v in e[:2] if g.is_viewpoint(v)}
    selected |= {v for e in residual for v in e[:2] if g.is_viewpoint(v)}
    keep = selected | ({START} if START in tree.vertices or START in tree.terminals else set())
    return TrimResult(
        selected=frozenset(selected),
        selected_point_ids=frozenset(g.point_ids[v - g.n_sides - 1] for v in selected),
        residual=residual,
        removed_weight=len(removed) * g.coverage_weight,
        left_cost=sum(w for _, _, w in residual),
        connected=_is_connected(keep, residual),
    )
