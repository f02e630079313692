"""Independent brute-force oracles shared by the test modules."""

from __future__ import annotations

import itertools
import math

import numpy as np

from coverplan.geometry import efficiently_observes


def brute_max_distance(centers) -> float:
    best = 0.0
    for a, b in itertools.combinations(centers, 2):
        best = max(best, math.dist(a, b))
    return best


def brute_tour(points, start) -> float:
    """Shortest closed tour from ``start`` by trying every permutation."""
    if not points:
        return 0.0
    best = math.inf
    for perm in itertools.permutations(range(len(points))):
        seq = [start] + [points[i] for i in perm] + [start]
        best = min(best, sum(math.dist(a, b) for a, b in zip(seq, seq[1:])))
    return best


def path_length(seq) -> float:
    return sum(math.dist(a, b) for a, b in zip(seq, seq[1:]))


def _mst_cost(vertices, W):
    vertices = list(vertices)
    if len(vertices) <= 1:
        return 0.0
    inside = {vertices[0]}
    cost = 0.0
    while len(inside) < len(vertices):
        best = math.inf
        pick = None
        for u in inside:
            for v in vertices:
                if v not in inside and W[u][v] < best:
                    best, pick = W[u][v], v
        if pick is None:
            return math.inf
        inside.add(pick)
        cost += best
    return cost


def brute_steiner_by_vertices(W, terminals) -> float:
    """Optimal Steiner cost: the best MST over every vertex superset of the terminals."""
    n = len(W)
    others = [v for v in range(n) if v not in set(terminals)]
    best = math.inf
    for k in range(len(others) + 1):
        for extra in itertools.combinations(others, k):
            best = min(best, _mst_cost(list(terminals) + list(extra), W))
    return best


def brute_steiner_by_edges(W, terminals) -> float:
    """Optimal Steiner cost by trying every edge subset (tiny graphs only)."""
    n = len(W)
    edges = [(u, v, W[u][v]) for u in range(n) for v in range(u + 1, n) if math.isfinite(W[u][v])]
    best = math.inf
    term = set(terminals)
    for mask in range(1 << len(edges)):
        chosen = [edges[i] for i in range(len(edges)) if mask >> i & 1]
        cost = sum(w for _, _, w in chosen)
        if cost >= best:
            continue
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v, _ in chosen:
            parent[find(u)] = find(v)
        roots = {find(t) for t in term}
        if len(roots) == 1:
            best = cost
    return best


def random_metric_graph(rng: np.random.Generator, n: int, density: float = 0.6):
    """Random connected graph with Euclidean-ish weights; ``inf`` marks missing edges."""
    pts = rng.uniform(0, 10, size=(n, 2))
    W = np.full((n, n), np.inf)
    np.fill_diagonal(W, 0.0)
    order = rng.permutation(n)
    for k in range(1, n):  # random spanning tree keeps it connected
        u, v = order[k], order[int(rng.integers(k))]
        W[u, v] = W[v, u] = round(float(np.linalg.norm(pts[u] - pts[v])), 6) + 0.1
    for u in range(n):
        for v in range(u + 1, n):
            if not np.isfinite(W[u, v]) and rng.random() < density:
                W[u, v] = W[v, u] = round(float(np.linalg.norm(pts[u] - pts[v])), 6) + 0.1
    return W


def sides_seen(positions, sides, params) -> set[int]:
    """Scalar re-check: ids of sides efficiently observed from any position."""
    seen = set()
    todo = list(sides)
    for p in positions:
        keep = []
        for s in todo:
            if efficiently_observes(p, s, params):
                seen.add(s.id)
            else:
                keep.append(s)
        todo = keep
        if not todo:
            break
    return seen
