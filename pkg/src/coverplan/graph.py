"""
Coverage graph linking the start, side midpoints and candidate viewpoints.

Vertex numbering is fixed: 0 is the start, ``1..S`` are side midpoints in
side-id order (vertex id == side id when all sides of an instance are
present) and ``S+1..S+|P|`` are viewpoints in the order given.
Viewpoint-viewpoint and viewpoint-start edges form a complete Euclidean
graph and are evaluated on demand; only coverage edges are stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, TextIO

import numpy as np

from .errors import SideUncoverable

START = 0
MIDPOINT = 1
VIEWPOINT = 2

DENSE_LIMIT = 10_000


@dataclass
class CoverageGraph:
    coords: np.ndarray  # (V, 2)
    kind: np.ndarray  # (V,) START / MIDPOINT / VIEWPOINT
    D: float
    n_sides: int
    point_ids: list[int]  # viewpoint index -> ObservationPoint.id
    side_ids: list[int]  # midpoint vertex - 1 -> side id
    coverage: dict[int, list[int]] = field(default_factory=dict)  # midpoint -> viewpoint vertices

    @property
    def n_vertices(self) -> int:
        return len(self.coords)

    @property
    def terminals(self) -> list[int]:
        return [START] + list(range(1, self.n_sides + 1))

    @property
    def coverage_weight(self) -> float:
        return self.D / 2

    def viewpoint_vertex(self, index: int) -> int:
        return self.n_sides + 1 + index

    def is_midpoint(self, v: int) -> bool:
        return 1 <= v <= self.n_sides

    def is_viewpoint(self, v: int) -> bool:
        return v > self.n_sides

    def weight(self, u: int, v: int) -> float:
        if u == v:
            return 0.0
        if self.is_midpoint(u) or self.is_midpoint(v):
            q, p = (u, v) if self.is_midpoint(u) else (v, u)
            return self.coverage_weight if p in self._coverage_sets[q] else np.inf
        if u == START and v == START:
            return 0.0
        return float(np.hypot(*(self.coords[u] - self.coords[v])))

    @property
    def _coverage_sets(self) -> dict[int, set[int]]:
        sets = self.__dict__.get("_cov_sets")
        if sets is None:
            sets = {q: set(ps) for q, ps in self.coverage.items()}
            self.__dict__["_cov_sets"] = sets
        return sets

    def dense_matrix(self) -> np.ndarray:
        """Full weight matrix with ``inf`` marking absent edges."""
        V = self.n_vertices
        if V - self.n_sides - 1 > DENSE_LIMIT:
            raise MemoryError("viewpoint set too large for a dense matrix; use row()")
        return self.submatrix(np.arange(V))

    def submatrix(self, vertices) -> np.ndarray:
        """Weight matrix restricted to ``vertices`` (``inf`` where absent, including the diagonal)."""
        vs = np.asarray(vertices, dtype=int)
        c = self.coords[vs]
        diff = c[:, None, :] - c[None, :, :]
        W = np.hypot(diff[..., 0], diff[..., 1])
        mid = (vs >= 1) & (vs <= self.n_sides)
        W[mid, :] = np.inf
        W[:, mid] = np.inf
        pos = {int(v): i for i, v in enumerate(vs)}
        for i in np.nonzero(mid)[0]:
            for p in self.coverage[int(vs[i])]:
                j = pos.get(p)
                if j is not None:
                    W[i, j] = W[j, i] = self.coverage_weight
        np.fill_diagonal(W, np.inf)
        return W

    def row(self, u: int) -> np.ndarray:
        """Edge weights from ``u`` to every vertex (``inf`` where absent)."""
        out = np.full(self.n_vertices, np.inf)
        if self.is_midpoint(u):
            out[self.coverage[u]] = self.coverage_weight
            return out
        d = np.hypot(*(self.coords - self.coords[u]).T)
        out[0] = d[0]
        out[self.n_sides + 1:] = d[self.n_sides + 1:]
        for q, ps in self.coverage.items():
            if u in self._coverage_sets[q]:
                out[q] = self.coverage_weight
        out[u] = np.inf
        return out

    def edges(self) -> Iterator[tuple[int, int, float]]:
        V = self.n_vertices
        vp = [START] + list(range(self.n_sides + 1, V))
        for i, u in enumerate(vp):
            for v in vp[i + 1:]:
                yield u, v, float(np.hypot(*(self.coords[u] - self.coords[v])))
        for q in range(1, self.n_sides + 1):
            for p in self.coverage[q]:
                yield min(p, q), max(p, q), self.coverage_weight

    def dump(self, fh: TextIO) -> None:
        """Write the edge list as ``u v weight`` lines."""
        for u, v, w in sorted(self.edges()):
            fh.write(f"{u} {v} {w!r}\n")


def build_graph(points, sides, start, D: float) -> CoverageGraph:
    sides = sorted(sides, key=lambda s: s.id)
    S = len(sides)
    vertex_of = {s.id: v for v, s in enumerate(sides, start=1)}
    coords = np.empty((1 + S + len(points), 2))
    coords[0] = start
    coords[1:S + 1] = [s.midpoint for s in sides]
    if points:
        coords[S + 1:] = [p.pos for p in points]
    kind = np.array([START] + [MIDPOINT] * S + [VIEWPOINT] * len(points))
    coverage: dict[int, list[int]] = {q: [] for q in range(1, S + 1)}
    for i, p in enumerate(points):
        for sid in sorted(p.covers):
            if sid in vertex_of:
                coverage[vertex_of[sid]].append(S + 1 + i)
    missing = [sides[q - 1].id for q, ps in coverage.items() if not ps]
    if missing:
        raise SideUncoverable(missing)
    return CoverageGraph(coords, kind, float(D), S, [p.id for p in points],
                         [s.id for s in sides], coverage)
