"""Problem instance: objects, start point, sensing parameters and map bounds."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import cached_property

from .errors import InvalidParameter
from .geometry import ObservationParams, Point2D, RectObject, Side, sides_of


@dataclass(frozen=True)
class Instance:
    objects: tuple[RectObject, ...]
    start: Point2D
    params: ObservationParams = field(default_factory=ObservationParams)
    bounds: tuple[float, float, float, float] | None = None  # xmin, ymin, xmax, ymax

    def __post_init__(self):
        objs = tuple(self.objects)
        object.__setattr__(self, "objects", objs)
        object.__setattr__(self, "start", Point2D(*map(float, self.start)))
        if [o.id for o in objs] != list(range(len(objs))):
            raise InvalidParameter("object ids must be 0..n-1 in list order")
        if not all(math.isfinite(c) for c in self.start):
            raise InvalidParameter("non-finite start point")
        if self.bounds is None:
            object.__setattr__(self, "bounds", _fit_bounds(objs, self.start, self.params.d_max))

    @property
    def n(self) -> int:
        return len(self.objects)

    @cached_property
    def sides(self) -> list[Side]:
        return [s for o in self.objects for s in sides_of(o)]

    def side(self, sid: int) -> Side:
        return self.sides[sid - 1]

    @property
    def diagonal(self) -> float:
        x0, y0, x1, y1 = self.bounds
        return math.hypot(x1 - x0, y1 - y0)

    @property
    def perimeter(self) -> float:
        x0, y0, x1, y1 = self.bounds
        return 2 * ((x1 - x0) + (y1 - y0))

    def with_params(self, **changes) -> "Instance":
        p = self.params
        params = ObservationParams(
            theta=changes.get("theta", p.theta),
            d_max=changes.get("d_max", p.d_max),
            d_min=changes.get("d_min", p.d_min),
            perception_radius=changes.get("perception_radius", p.perception_radius),
        )
        return Instance(self.objects, self.start, params, self.bounds)

    def to_dict(self) -> dict:
        p = self.params
        return {
            "version": 1,
            "kind": "instance",
            "bounds": list(self.bounds),
            "start": list(self.start),
            "params": {
                "theta_rad": p.theta,
                "d_max": p.d_max,
                "d_min": p.d_min,
                "perception_radius": p.perception_radius,
            },
            "objects": [
                {"id": o.id, "center": list(o.center), "length": o.length, "width": o.width}
                for o in self.objects
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Instance":
        p = doc["params"]
        params = ObservationParams(
            theta=p["theta_rad"],
            d_max=p["d_max"],
            d_min=p["d_min"],
            perception_radius=p["perception_radius"],
        )
        objects = tuple(
            RectObject(o["id"], Point2D(*o["center"]), o["length"], o["width"])
            for o in doc["objects"]
        )
        return cls(objects, Point2D(*doc["start"]), params, tuple(doc["bounds"]))

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:16]


def _fit_bounds(objects, start, margin):
    xs = [start.x] + [c for o in objects for c in (o.bounds[0], o.bounds[2])]
    ys = [start.y] + [c for o in objects for c in (o.bounds[1], o.bounds[3])]
    return (min(xs) - margin, min(ys) - margin, max(xs) + margin, max(ys) + margin)

