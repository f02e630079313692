"""Candidate viewpoint generation on a per-object square mesh."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InstanceTooSmall, InvalidParameter, SideUncoverable
from .geometry import ANGLE_TOL, DIST_TOL, ObservationParams, Point2D, RectObject, Side, sides_of

DEDUP_DECIMALS = 9


@dataclass(frozen=True)
class ObservationPoint:
    id: int
    pos: Point2D
    covers: frozenset[int]


@dataclass(frozen=True)
class MeshSpec:
    epsilon: float
    D: float
    n: int

    @property
    def delta(self) -> float:
        return mesh_granularity(self.epsilon, self.n, self.D)


def max_object_distance(objects) -> float:
    """Largest center-to-center distance over all object pairs."""
    objects = list(objects)
    if len(objects) < 2:
        raise InstanceTooSmall("at least two objects are required")
    centers = np.array([o.center for o in objects])
    diff = centers[:, None, :] - centers[None, :, :]
    return float(np.sqrt((diff**2).sum(-1)).max())


def mesh_granularity(epsilon: float, n: int, D: float) -> float:
    if not (epsilon > 0 and D > 0):
        raise InvalidParameter("epsilon and D must be positive")
    if n < 2:
        raise InvalidParameter("mesh granularity needs n >= 2")
    return epsilon * D / (4 * n)


def observes_mask(points: np.ndarray, sides: list[Side], params: ObservationParams) -> np.ndarray:
    """Boolean (m, len(sides)) matrix of the observation predicate."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if not sides or len(points) == 0:
        return np.zeros((len(points), len(sides)), dtype=bool)
    A = np.array([s.a for s in sides])
    B = np.array([s.b for s in sides])
    T = np.array([s.normal for s in sides])
    ok = np.ones((len(points), len(sides)), dtype=bool)
    va = A[None] - points[:, None]
    ok &= np.einsum("msk,sk->ms", va, T) > 0
    for E in (A, B):
        v = E[None] - points[:, None]
        d = np.hypot(v[..., 0], v[..., 1])
        ok &= (d <= params.d_max + DIST_TOL) & (d >= params.d_min - DIST_TOL)
        dot = v[..., 0] * T[None, :, 0] + v[..., 1] * T[None, :, 1]
        cross = v[..., 0] * T[None, :, 1] - v[..., 1] * T[None, :, 0]
        ok &= np.arctan2(np.abs(cross), dot) <= params.theta + ANGLE_TOL
    return ok


def padded_grid(obj: RectObject, pad: float, delta: float) -> np.ndarray:
    """Mesh points of the object's bounding box grown by ``pad``, anchored at its lower-left corner."""
    if not delta > 0:
        raise InvalidParameter("delta must be positive")
    x0, y0, x1, y1 = obj.bounds
    x0, y0, x1, y1 = x0 - pad, y0 - pad, x1 + pad, y1 + pad
    nx = int(math.floor((x1 - x0) / delta + 1e-9)) + 1
    ny = int(math.floor((y1 - y0) / delta + 1e-9)) + 1
    xs = x0 + delta * np.arange(nx)
    ys = y0 + delta * np.arange(ny)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()])


def _inside_any(points: np.ndarray, objects) -> np.ndarray:
    inside = np.zeros(len(points), dtype=bool)
    for o in objects:
        x0, y0, x1, y1 = o.bounds
        inside |= (points[:, 0] > x0) & (points[:, 0] < x1) & (points[:, 1] > y0) & (points[:, 1] < y1)
    return inside


def _nearby_sides(obj: RectObject, sides: list[Side], reach: float) -> list[Side]:
    x0, y0, x1, y1 = obj.bounds
    x0, y0, x1, y1 = x0 - reach, y0 - reach, x1 + reach, y1 + reach
    return [
        s for s in sides
        if min(s.a.x, s.b.x) <= x1 and max(s.a.x, s.b.x) >= x0
        and min(s.a.y, s.b.y) <= y1 and max(s.a.y, s.b.y) >= y0
    ]


def object_viewpoints(obj, params, delta, sides, obstacles=()):
    """Mesh points around one object and the ids of the sides each observes.

    Returns ``(coords, covers)`` with points inside any obstacle and points
    that observe nothing already removed.
    """
    grid = padded_grid(obj, params.d_max, delta)
    grid = grid[~_inside_any(grid, obstacles)]
    near = _nearby_sides(obj, sides, 2 * params.d_max)
    mask = observes_mask(grid, near, params)
    keep = mask.any(axis=1)
    ids = np.array([s.id for s in near], dtype=int)
    covers = [frozenset(ids[row].tolist()) for row in mask[keep]]
    return grid[keep], covers


def generate_observation_points(objects, params: ObservationParams, delta: float,
                                sides=None, obstacles=None, check=True) -> list[ObservationPoint]:
    objects = list(objects)
    if sides is None:
        sides = [s for o in objects for s in sides_of(o)]
    if obstacles is None:
        obstacles = objects
    merged: dict[tuple[float, float], list] = {}
    for obj in objects:
        coords, covers = object_viewpoints(obj, params, delta, sides, obstacles)
        for (x, y), cov in zip(coords, covers):
            key = (round(float(x), DEDUP_DECIMALS), round(float(y), DEDUP_DECIMALS))
            if key in merged:
                merged[key][1] |= cov
            else:
                merged[key] = [Point2D(float(x), float(y)), set(cov)]
    points = [ObservationPoint(i, pos, frozenset(cov)) for i, (pos, cov) in enumerate(merged.values())]
    if check:
        covered = set().union(*(p.covers for p in points)) if points else set()
        missing = {s.id for s in sides} - covered
        if missing:
            raise SideUncoverable(missing)
    return points


def snap_to_mesh(points, delta: float, origin=(0.0, 0.0)) -> np.ndarray:
    """Round each point to the nearest node of a square mesh of pitch ``delta``."""
    pts = np.asarray(points, dtype=float)
    o = np.asarray(origin, dtype=float)
    return o + np.round((pts - o) / delta) * delta

