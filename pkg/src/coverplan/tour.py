"""Closed tours from a fixed start: Christofides and exact Held-Karp."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .errors import InstanceTooLarge
from .geometry import Point2D
from .steiner import kruskal

MATCHING_EXACT_LIMIT = 30
HELD_KARP_LIMIT = 20


@dataclass(frozen=True)
class Tour:
    waypoints: tuple[Point2D, ...]  # first is the start; closing edge implicit
    length: float
    order: tuple[int, ...] = ()  # indices into the input point list, start excluded
    matching_exact: bool = True

    @property
    def closed(self) -> list[Point2D]:
        return list(self.waypoints) + [self.waypoints[0]]


def distance_matrix(coords) -> np.ndarray:
    c = np.asarray(coords, dtype=float).reshape(-1, 2)
    diff = c[:, None, :] - c[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def cycle_length(coords, order=None) -> float:
    c = np.asarray(coords, dtype=float).reshape(-1, 2)
    if order is not None:
        c = c[list(order)]
    if len(c) < 2:
        return 0.0
    nxt = np.roll(c, -1, axis=0)
    return float(np.hypot(*(nxt - c).T).sum())


def _make_tour(start, points, order, matching_exact=True) -> Tour:
    wps = (Point2D(*start),) + tuple(Point2D(*points[i]) for i in order)
    return Tour(wps, cycle_length(wps), tuple(order), matching_exact)


def min_weight_perfect_matching(nodes, W, exact_limit=MATCHING_EXACT_LIMIT):
    """Pairs covering ``nodes``; exact blossom matching up to ``exact_limit`` nodes, greedy beyond."""
    nodes = sorted(nodes)
    if len(nodes) <= exact_limit:
        g = nx.Graph()
        g.add_nodes_from(nodes)
        for i, u in enumerate(nodes):
            for v in nodes[i + 1:]:
                g.add_edge(u, v, weight=float(W[u, v]))
        pairs = nx.min_weight_matching(g)
        return sorted(tuple(sorted(p)) for p in pairs), True
    cand = sorted((float(W[u, v]), u, v) for i, u in enumerate(nodes) for v in nodes[i + 1:])
    used, pairs = set(), []
    for _, u, v in cand:
        if u not in used and v not in used:
            used.update((u, v))
            pairs.append((u, v))
    return pairs, False


def eulerian_circuit(edges, source: int) -> list[int]:
    """Hierholzer's algorithm on a multigraph given as a list of (u, v) pairs."""
    adj: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for k, (u, v) in enumerate(edges):
        adj[u].append((v, k))
        adj[v].append((u, k))
    for lst in adj.values():
        lst.sort(reverse=True)  # pop() then yields the smallest neighbour first
    used = [False] * len(edges)
    stack, circuit = [source], []
    while stack:
        u = stack[-1]
        lst = adj[u]
        while lst and used[lst[-1][1]]:
            lst.pop()
        if lst:
            v, k = lst.pop()
            used[k] = True
            stack.append(v)
        else:
            circuit.append(stack.pop())
    return circuit[::-1]


def christofides(points, start, exact_limit: int = MATCHING_EXACT_LIMIT) -> Tour:
    points = [tuple(map(float, p)) for p in points]
    if not points:
        return Tour((Point2D(*start),), 0.0)
    W = distance_matrix([start] + points)
    k = len(W)
    mst = kruskal((i, j, W[i, j]) for i in range(k) for j in range(i + 1, k))
    deg = [0] * k
    for u, v, _ in mst:
        deg[u] += 1
        deg[v] += 1
    odd = [v for v in range(k) if deg[v] % 2]
    matching, exact = min_weight_perfect_matching(odd, W, exact_limit)
    multi = [(u, v) for u, v, _ in mst] + list(matching)
    seen, order = set(), []
    for v in eulerian_circuit(multi, 0):
        if v not in seen:
            seen.add(v)
            order.append(v)
    return _make_tour(start, points, [v - 1 for v in order[1:]], exact)


def held_karp(points, start, max_points: int = HELD_KARP_LIMIT) -> Tour:
    """Exact shortest closed tour from ``start`` through every point."""
    points = [tuple(map(float, p)) for p in points]
    m = len(points)
    if m > max_points:
        raise InstanceTooLarge(f"{m} points exceed the Held-Karp limit of {max_points}")
    if m == 0:
        return Tour((Point2D(*start),), 0.0)
    W = distance_matrix([start] + points)
    full = 1 << m
    dp = np.full((full, m), np.inf)
    parent = np.full((full, m), -1, dtype=np.int64)
    for j in range(m):
        dp[1 << j, j] = W[0, j + 1]
    leg = W[1:, 1:]
    bits = 1 << np.arange(m)
    for mask in range(1, full):
        inside = np.nonzero(mask & bits)[0]
        if len(inside) < 2:
            continue
        prev = mask ^ bits[inside]  # mask without j, per j
        cand = dp[prev] + leg[:, inside].T  # [j, i]
        best = np.argmin(cand, axis=1)
        dp[mask, inside] = cand[np.arange(len(inside)), best]
        parent[mask, inside] = best
    closing = dp[full - 1] + W[1:, 0]
    last = int(np.argmin(closing))
    order, mask = [], full - 1
    while last >= 0:
        order.append(last)
        prev = int(parent[mask, last])
        mask ^= 1 << last
        last = prev
    return _make_tour(start, points, order[::-1])
