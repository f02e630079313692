"""
Discrete-step online simulation with a finite perception radius.

Three policies share one state machine:

* ``nof``   - fly to the nearest viewpoint of the nearest uncovered known side
* ``ci``    - follow an initial tour, inserting viewpoints for new sides at
  the cheapest position
* ``batsp`` - follow an initial tour, re-solving it whenever objects appear

The mesh pitch is fixed from the objects visible at the start and the UAV
advances half a pitch per step.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .discretize import (DEDUP_DECIMALS, ObservationPoint, max_object_distance, mesh_granularity,
                         object_viewpoints)
from .errors import InvalidParameter, NonTerminating, SideUncoverable
from .geometry import Point2D, distance, side_id
from .instance import Instance
from .offline import select_and_tour
from .steiner import repair_midpoint_leaves, steiner_tree, trim
from .graph import build_graph
from .tour import christofides

POLICIES = ("nof", "ci", "batsp")
BUDGET_FACTOR = 10_000


@dataclass
class Stop:
    """A waypoint on the planned path; ``point`` is None for the home position."""

    pos: Point2D
    point: int | None = None


@dataclass
class SimState:
    uav_pos: Point2D
    delta: float
    step_len: float
    D: float
    known_objects: list[int] = field(default_factory=list)
    known_sides: set[int] = field(default_factory=set)
    known_points: dict[int, ObservationPoint] = field(default_factory=dict)
    uncovered: set[int] = field(default_factory=set)
    covered: set[int] = field(default_factory=set)
    trace: list[Point2D] = field(default_factory=list)
    path: list[Stop] = field(default_factory=list)
    covered_order: list[int] = field(default_factory=list)
    events: list[tuple[int, int]] = field(default_factory=list)  # (trace index, side id)
    object_points: dict[int, list[int]] = field(default_factory=dict)
    steps: int = 0
    max_steps: int = 0
    _by_coord: dict = field(default_factory=dict, repr=False)
    _by_side: dict = field(default_factory=dict, repr=False)  # side id -> point ids


@dataclass(frozen=True)
class SimResult:
    policy: str
    length: float
    trace: tuple[Point2D, ...]
    steps: int
    covered_order: tuple[int, ...]
    events: tuple[tuple[int, int], ...]
    delta: float
    D: float
    replans: int = 0
    runtime_s: float = 0.0


def polyline_length(pts) -> float:
    return sum(distance(a, b) for a, b in zip(pts, pts[1:]))


def _key(p) -> tuple[float, float]:
    return round(float(p[0]), DEDUP_DECIMALS), round(float(p[1]), DEDUP_DECIMALS)


def detect(state: SimState, instance: Instance) -> list[int]:
    r = instance.params.perception_radius + 1e-9
    known = set(state.known_objects)
    return [o.id for o in instance.objects
            if o.id not in known and distance(o.center, state.uav_pos) <= r]


def _add_object_points(state: SimState, instance: Instance, oid: int) -> None:
    coords, covers = object_viewpoints(instance.objects[oid], instance.params, state.delta,
                                       instance.sides, instance.objects)
    keys = np.round(coords, DEDUP_DECIMALS).tolist()
    ids = []
    for (x, y), k, cov in zip(coords.tolist(), keys, covers):
        k = tuple(k)
        pid = state._by_coord.get(k)
        if pid is None:
            pid = len(state.known_points)
            state._by_coord[k] = pid
            state.known_points[pid] = ObservationPoint(pid, Point2D(x, y), cov)
            added = cov
        else:
            old = state.known_points[pid]
            added = cov - old.covers
            if added:
                state.known_points[pid] = ObservationPoint(pid, old.pos, old.covers | cov)
        for sid in added:
            state._by_side.setdefault(sid, []).append(pid)
        ids.append(pid)
    state.object_points[oid] = ids


def perceive(state: SimState, instance: Instance) -> list[int]:
    """Mark objects within the perception radius as known; returns the new object ids."""
    new = detect(state, instance)
    for oid in new:
        _add_object_points(state, instance, oid)
        state.known_objects.append(oid)
        for k in range(4):
            sid = side_id(oid, k)
            state.known_sides.add(sid)
            if sid not in state.covered:
                state.uncovered.add(sid)
    return new


def step_towards(state: SimState, instance: Instance, target) -> list[int]:
    """Advance one step (clamped at the target), record it and run perception."""
    x, y = state.uav_pos
    dx, dy = target[0] - x, target[1] - y
    d = math.hypot(dx, dy)
    if d <= state.step_len:
        state.uav_pos = Point2D(float(target[0]), float(target[1]))
    else:
        f = state.step_len / d
        state.uav_pos = Point2D(x + dx * f, y + dy * f)
    state.trace.append(state.uav_pos)
    state.steps += 1
    if state.steps > state.max_steps:
        raise NonTerminating(f"step budget of {state.max_steps} exhausted")
    return perceive(state, instance)


def observe_here(state: SimState, point: ObservationPoint | None) -> list[int]:
    """Cover every uncovered known side seen from the viewpoint just reached."""
    if point is None:
        return []
    got = sorted(point.covers & state.uncovered)
    for sid in got:
        state.uncovered.discard(sid)
        state.covered.add(sid)
        state.covered_order.append(sid)
        state.events.append((len(state.trace) - 1, sid))
    return got


def _arrived(state: SimState, target) -> bool:
    return state.uav_pos[0] == target[0] and state.uav_pos[1] == target[1]


def online_D(instance: Instance, known: list[int]) -> float:
    """Largest center distance among the initially visible objects."""
    if len(known) < 2:
        return instance.params.d_max
    return max_object_distance([instance.objects[i] for i in known])


def init_state(instance: Instance, epsilon: float) -> SimState:
    if not 0 < epsilon <= 1:
        raise InvalidParameter("epsilon must lie in (0, 1]")
    visible = detect(SimState(instance.start, 1.0, 1.0, 0.0), instance)
    if not visible:
        raise InvalidParameter("no object is visible from the start")
    D = online_D(instance, visible)
    delta = mesh_granularity(epsilon, max(instance.n, 2), D)
    step = delta / 2
    state = SimState(instance.start, delta, step, D)
    state.max_steps = int(BUDGET_FACTOR * instance.perimeter / step)
    state.trace.append(instance.start)
    perceive(state, instance)
    return state


def _restricted(state: SimState, point_ids=None, sides=None) -> list[ObservationPoint]:
    sides = state.known_sides if sides is None else sides
    ids = sorted(state.known_points) if point_ids is None else sorted(set(point_ids))
    out = []
    for pid in ids:
        p = state.known_points[pid]
        cov = p.covers & sides
        if cov:
            out.append(ObservationPoint(p.id, p.pos, frozenset(cov)))
    return out


def _known_sides_list(state: SimState, instance: Instance, ids=None):
    ids = state.known_sides if ids is None else ids
    return [instance.side(s) for s in sorted(ids)]


def _initial_path(state: SimState, instance: Instance) -> list[Stop]:
    pts = _restricted(state)
    sel = select_and_tour(pts, _known_sides_list(state, instance), instance.start, state.D)
    ids = [p.id for p in sel.points]
    path = [Stop(instance.start)]
    path += [Stop(state.known_points[ids[k]].pos, ids[k]) for k in sel.tour.order]
    path.append(Stop(instance.start))
    return path


def _finish(state: SimState, instance: Instance, policy: str, t0: float, replans: int = 0) -> SimResult:
    missing = {s.id for s in instance.sides} - state.covered
    if missing:
        raise NonTerminating(f"back at start with sides {sorted(missing)} never observed")
    return SimResult(
        policy=policy,
        length=polyline_length(state.trace),
        trace=tuple(state.trace),
        steps=state.steps,
        covered_order=tuple(state.covered_order),
        events=tuple(state.events),
        delta=state.delta,
        D=state.D,
        replans=replans,
        runtime_s=time.perf_counter() - t0,
    )


def _nearest_side(state: SimState, instance: Instance) -> int | None:
    if not state.uncovered:
        return None
    sides = instance.sides
    return min(state.uncovered, key=lambda s: (distance(sides[s - 1].midpoint, state.uav_pos), s))


def _nearest_point_for(state: SimState, sid: int) -> ObservationPoint:
    cands = state._by_side.get(sid)
    if not cands:
        raise SideUncoverable([sid])
    pts = state.known_points
    return pts[min(cands, key=lambda i: (distance(pts[i].pos, state.uav_pos), i))]


def run_nof(instance: Instance, epsilon: float) -> SimResult:
    t0 = time.perf_counter()
    state = init_state(instance, epsilon)
    while True:
        while state.uncovered:
            side = _nearest_side(state, instance)
            target = _nearest_point_for(state, side)
            while not _arrived(state, target.pos):
                step_towards(state, instance, target.pos)
                cand = _nearest_side(state, instance)
                if cand != side:
                    side, target = cand, _nearest_point_for(state, cand)
            observe_here(state, target)
        while not _arrived(state, instance.start) and not state.uncovered:
            step_towards(state, instance, instance.start)
        if not state.uncovered:
            return _finish(state, instance, "nof", t0)


def _sides_of_object(oid: int) -> list[int]:
    return [side_id(oid, k) for k in range(4)]


def insertion_cost(u, p, v) -> float:
    return distance(u, p) + distance(p, v) - distance(u, v)


def _scheduled_covers(state: SimState) -> set[int]:
    out: set[int] = set()
    for stop in state.path[1:]:
        if stop.point is not None:
            out |= state.known_points[stop.point].covers
    return out


def _cheapest_insert(state: SimState, sid: int) -> tuple[int, int]:
    """(point id, path index) with the lowest insertion cost for a viewpoint of ``sid``."""
    cands = sorted(state._by_side.get(sid, ()))
    if not cands:
        raise SideUncoverable([sid])
    nodes = np.array([state.uav_pos] + [s.pos for s in state.path[1:]], dtype=float)
    u, v = nodes[:-1], nodes[1:]
    P = np.array([state.known_points[i].pos for i in cands], dtype=float)
    du = np.hypot(*(P[:, None, :] - u[None]).transpose(2, 0, 1))
    dv = np.hypot(*(P[:, None, :] - v[None]).transpose(2, 0, 1))
    cost = du + dv - np.hypot(*(v - u).T)[None]
    # row-major argmin keeps the (point id, position) tie-break
    i, k = np.unravel_index(int(np.argmin(cost)), cost.shape)
    return cands[i], int(k) + 1


def _traverse(state: SimState, instance: Instance, on_detect) -> int:
    """Fly along ``state.path`` until only the final stop remains."""
    replans = 0
    while len(state.path) >= 2:
        nxt = state.path[1]
        while not _arrived(state, nxt.pos):
            new = step_towards(state, instance, nxt.pos)
            if new:
                replans += on_detect(state, instance, new)
                nxt = state.path[1]
        point = state.known_points[nxt.point] if nxt.point is not None else None
        observe_here(state, point)
        state.path.pop(0)
    return replans


def _ci_detect(state: SimState, instance: Instance, new_objects) -> int:
    pending = sorted(s for o in new_objects for s in _sides_of_object(o) if s in state.uncovered)
    scheduled = _scheduled_covers(state)
    inserted = 0
    for sid in pending:
        if sid in scheduled:
            continue
        pid, k = _cheapest_insert(state, sid)
        state.path.insert(k, Stop(state.known_points[pid].pos, pid))
        scheduled |= state.known_points[pid].covers
        inserted += 1
    return int(inserted > 0)


def _batsp_detect(state: SimState, instance: Instance, new_objects) -> int:
    q_new = {s for o in new_objects for s in _sides_of_object(o) if s in state.uncovered}
    if not q_new:
        return 0
    p_new = _restricted(state, [pid for o in new_objects for pid in state.object_points[o]], q_new)
    g = build_graph(p_new, _known_sides_list(state, instance, q_new), state.uav_pos, state.D)
    tree = steiner_tree(g, g.terminals[1:])
    tree, _ = repair_midpoint_leaves(tree, g)
    local = trim(tree, g).selected_point_ids
    remaining = {s.point for s in state.path[1:] if s.point is not None}
    total = sorted(local | remaining)
    tour = christofides([state.known_points[i].pos for i in total], state.uav_pos)
    state.path = ([Stop(state.uav_pos)]
                  + [Stop(state.known_points[total[k]].pos, total[k]) for k in tour.order]
                  + [Stop(instance.start)])
    return 1


def run_ci(instance: Instance, epsilon: float) -> SimResult:
    t0 = time.perf_counter()
    state = init_state(instance, epsilon)
    state.path = _initial_path(state, instance)
    replans = _traverse(state, instance, _ci_detect)
    return _finish(state, instance, "ci", t0, replans)


def run_batsp(instance: Instance, epsilon: float) -> SimResult:
    t0 = time.perf_counter()
    state = init_state(instance, epsilon)
    state.path = _initial_path(state, instance)
    replans = _traverse(state, instance, _batsp_detect)
    return _finish(state, instance, "batsp", t0, replans)


def run_policy(name: str, instance: Instance, epsilon: float) -> SimResult:
    runners = {"nof": run_nof, "ci": run_ci, "batsp": run_batsp}
    if name not in runners:
        raise InvalidParameter(f"unknown policy {name!r}")
    return runners[name](instance, epsilon)
