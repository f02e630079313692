"""
Euclidean primitives and the efficient-observation predicate.

Objects are axis-aligned rectangles. Every side carries the normal that
points from the open viewing half-plane into the object; a viewpoint sees a
side when both endpoint rays lie within ``theta`` of that normal and both
endpoints sit inside the ``[d_min, d_max]`` distance band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import InvalidParameter

ANGLE_TOL = 1e-9
DIST_TOL = 1e-9

SIDE_NAMES = ("bottom", "right", "top", "left")


class Point2D(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class RectObject:
    id: int
    center: Point2D
    length: float  # extent along x
    width: float  # extent along y

    def __post_init__(self):
        if not (self.length > 0 and self.width > 0):
            raise InvalidParameter(f"object {self.id}: length and width must be positive")
        if not all(math.isfinite(c) for c in self.center):
            raise InvalidParameter(f"object {self.id}: non-finite center")
        object.__setattr__(self, "center", Point2D(*map(float, self.center)))

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        cx, cy = self.center
        hl, hw = self.length / 2, self.width / 2
        return cx - hl, cy - hw, cx + hl, cy + hw

    def contains(self, p, strict: bool = True) -> bool:
        x0, y0, x1, y1 = self.bounds
        if strict:
            return x0 < p[0] < x1 and y0 < p[1] < y1
        return x0 <= p[0] <= x1 and y0 <= p[1] <= y1


@dataclass(frozen=True)
class Side:
    id: int
    object: int
    a: Point2D
    b: Point2D
    normal: Point2D  # inward unit normal
    midpoint: Point2D


@dataclass(frozen=True)
class ObservationParams:
    theta: float = math.radians(60.0)
    d_max: float = 4.0
    d_min: float = 1.0
    perception_radius: float = 40.0

    def __post_init__(self):
        if not 0 < self.theta < math.pi / 2:
            raise InvalidParameter("theta must lie in (0, pi/2)")
        if not 0 <= self.d_min < self.d_max:
            raise InvalidParameter("need 0 <= d_min < d_max")
        if not self.perception_radius > 0:
            raise InvalidParameter("perception_radius must be positive")


def distance(p, q) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def side_id(object_id: int, k: int) -> int:
    """Side ids run 1..4n, four per object in bottom/right/top/left order."""
    return 4 * object_id + k + 1


def sides_of(obj: RectObject) -> list[Side]:
    x0, y0, x1, y1 = obj.bounds
    corners = [
        (Point2D(x0, y0), Point2D(x1, y0), Point2D(0.0, 1.0)),
        (Point2D(x1, y0), Point2D(x1, y1), Point2D(-1.0, 0.0)),
        (Point2D(x1, y1), Point2D(x0, y1), Point2D(0.0, -1.0)),
        (Point2D(x0, y1), Point2D(x0, y0), Point2D(1.0, 0.0)),
    ]
    out = []
    for k, (a, b, t) in enumerate(corners):
        mid = Point2D((a.x + b.x) / 2, (a.y + b.y) / 2)
        out.append(Side(side_id(obj.id, k), obj.id, a, b, t, mid))
    return out


def angle_between(u, v) -> float:
    """Unsigned angle between two non-zero vectors, in radians."""
    cross = u[0] * v[1] - u[1] * v[0]
    dot = u[0] * v[0] + u[1] * v[1]
    return math.atan2(abs(cross), dot)


def efficiently_observes(p, side: Side, params: ObservationParams) -> bool:
    t = side.normal
    a, b = side.a, side.b
    # exterior half-plane: the viewpoint must be in front of the side
    if (a[0] - p[0]) * t[0] + (a[1] - p[1]) * t[1] <= 0:
        return False
    for e in (a, b):
        v = (e[0] - p[0], e[1] - p[1])
        d = math.hypot(*v)
        if d > params.d_max + DIST_TOL or d < params.d_min - DIST_TOL:
            return False
        if angle_between(t, v) > params.theta + ANGLE_TOL:
            return False
    return True
