"""
Exact small-instance optimum, lower bounds and LP model export.

Two exact routes are provided. ``"enumerate"`` picks one representative per
zone, removes duplicates and solves each distinct set with Held-Karp.
``"cover_dp"`` is a dynamic program over (covered-side mask, last viewpoint)
and reaches the same optimum without enumerating representatives; it is the
default because its cost does not grow with zone sizes multiplicatively.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .discretize import ObservationPoint, generate_observation_points, max_object_distance, mesh_granularity
from .errors import InstanceTooLarge, ModelTooLarge
from .geometry import Point2D
from .instance import Instance
from .tour import Tour, cycle_length, distance_matrix, held_karp


@dataclass(frozen=True)
class Caps:
    max_zones: int = 13
    max_combinations: int = 100_000
    max_dp_work: float = 2e9  # 2^S * |P|^2 scalar updates
    max_lp_variables: int = 2_000_000


@dataclass(frozen=True)
class Zone:
    id: int  # 1 is the start zone; side s lives in zone s + 1
    members: tuple[int, ...]  # point ids; -1 denotes the start


def candidate_points(instance: Instance, epsilon: float) -> list[ObservationPoint]:
    D = max_object_distance(instance.objects)
    return generate_observation_points(instance.objects, instance.params,
                                       mesh_granularity(epsilon, instance.n, D))


def zones_of(instance: Instance, points) -> list[Zone]:
    zones = [Zone(1, (-1,))]
    for s in instance.sides:
        members = tuple(p.id for p in points if s.id in p.covers)
        zones.append(Zone(s.id + 1, members))
    return zones


def exact_optimum(instance: Instance, epsilon: float, caps: Caps | None = None,
                  points=None, method: str = "cover_dp") -> Tour:
    """Shortest closed tour from the start observing every side, over the epsilon mesh."""
    caps = caps or Caps()
    if points is None:
        points = candidate_points(instance, epsilon)
    n_zones = 4 * instance.n + 1
    if n_zones > caps.max_zones:
        raise InstanceTooLarge(f"{n_zones} zones exceed the cap of {caps.max_zones}")
    if method == "enumerate":
        return _enumerate(instance, points, caps)
    if method == "cover_dp":
        return _cover_dp(instance, points, caps)
    raise ValueError(f"unknown method {method!r}")


def _tour_through(start, pts, ids_in_order) -> Tour:
    wps = (Point2D(*start),) + tuple(pts[i].pos for i in ids_in_order)
    return Tour(wps, cycle_length(wps), tuple(ids_in_order))


def _enumerate(instance: Instance, points, caps: Caps) -> Tour:
    zones = zones_of(instance, points)[1:]
    combos = math.prod(len(z.members) for z in zones)
    if combos > caps.max_combinations:
        raise InstanceTooLarge(f"{combos} representative combinations exceed {caps.max_combinations}")
    by_id = {p.id: p for p in points}
    best: Tour | None = None
    best_ids: tuple[int, ...] = ()
    solved: dict[tuple[int, ...], float] = {}
    for combo in itertools.product(*(z.members for z in zones)):
        ids = tuple(sorted(set(combo)))
        if ids in solved:
            continue
        t = held_karp([by_id[i].pos for i in ids], instance.start)
        solved[ids] = t.length
        if best is None or t.length < best.length - 1e-12:
            best, best_ids = t, ids
    order = [best_ids[k] for k in best.order]
    return Tour(best.waypoints, best.length, tuple(order))


def _cover_dp(instance: Instance, points, caps: Caps) -> Tour:
    S = 4 * instance.n
    pts = [p for p in points if p.covers]
    P = len(pts)
    work = float(2**S) * P * P
    if work > caps.max_dp_work:
        raise InstanceTooLarge(f"cover DP work {work:.3g} exceeds {caps.max_dp_work:.3g}")
    cov = np.array([sum(1 << (s - 1) for s in p.covers) for p in pts], dtype=np.int64)
    W = distance_matrix([instance.start] + [p.pos for p in pts])
    from_start, back, leg = W[0, 1:], W[1:, 0], W[1:, 1:]
    full = (1 << S) - 1
    dp = np.full((1 << S, P), np.inf)
    np.minimum.at(dp, (cov, np.arange(P)), from_start)
    for mask in range(1, full):
        row = dp[mask]
        fin = np.isfinite(row)
        if not fin.any():
            continue
        reach = (row[fin][:, None] + leg[fin]).min(axis=0)
        new = mask | cov
        gain = new != mask
        np.minimum.at(dp, (new[gain], np.nonzero(gain)[0]), reach[gain])
    closing = dp[full] + back
    j = int(np.argmin(closing))
    if not np.isfinite(closing[j]):
        raise InstanceTooLarge("no covering tour exists on this mesh")
    # walk back through the table
    seq, mask, val = [j], full, dp[full, j]
    while True:
        if mask == int(cov[j]) and abs(val - from_start[j]) <= 1e-9 * max(1.0, val):
            break
        found = False
        c = int(cov[j])
        base = mask & ~c
        overlap = mask & c
        for sub in _submasks(overlap):
            pm = base | sub
            if pm == mask:
                continue
            cand = dp[pm] + leg[:, j]
            i = int(np.argmin(cand))
            if abs(cand[i] - val) <= 1e-9 * max(1.0, val):
                seq.append(i)
                mask, val, j, found = pm, dp[pm, i], i, True
                break
        if not found:
            raise RuntimeError("cover DP reconstruction failed")
    order = [pts[i].id for i in reversed(seq)]
    by_id = {p.id: p for p in pts}
    wps = (Point2D(*instance.start),) + tuple(by_id[i].pos for i in order)
    return Tour(wps, cycle_length(wps), tuple(order))


def _submasks(m: int):
    sub = m
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & m


def lower_bound(instance: Instance, plan) -> float:
    """max(D, residual Steiner cost / 2) for a computed offline plan."""
    return max(max_object_distance(instance.objects), plan.left_cost / 2)


@dataclass(frozen=True)
class ModelSummary:
    n_zones: int
    n_binary: int
    n_continuous: int
    n_constraints: int
    by_family: dict


def model_counts(zone_sizes) -> ModelSummary:
    """Closed-form variable and constraint counts for the zone ILP."""
    sizes = list(zone_sizes)
    N = len(sizes)
    total = sum(sizes)
    pairs = total * total - sum(z * z for z in sizes)
    inner = sizes[1:]
    inner_total = sum(inner)
    mtz = inner_total * inner_total - sum(z * z for z in inner)
    fam = {"out_degree": N, "in_degree": N, "point_flow": total, "endpoint": 0, "mtz": mtz}
    return ModelSummary(N, pairs, N, sum(fam.values()), fam)


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_sum(fh: TextIO, terms: list[str], per_line: int = 6) -> None:
    for k in range(0, len(terms), per_line):
        chunk = " + ".join(terms[k:k + per_line])
        fh.write(("   " if k == 0 else "   + ") + chunk + "\n")


def ilp_export(instance: Instance, epsilon: float, sink: TextIO, caps: Caps | None = None,
               points=None) -> ModelSummary:
    """Write the zone-selection TSP model in CPLEX LP format."""
    caps = caps or Caps()
    if points is None:
        points = candidate_points(instance, epsilon)
    zones = zones_of(instance, points)
    summary = model_counts(len(z.members) for z in zones)
    if summary.n_binary > caps.max_lp_variables:
        raise ModelTooLarge(summary.n_binary, caps.max_lp_variables)
    N = len(zones)
    pos = {p.id: p.pos for p in points}
    pos[-1] = instance.start

    def pname(pid):
        return str(pid + 1)  # start -> 0, observation point k -> k + 1

    def xname(i, j, a, b):
        return f"X_{i}_{j}_{pname(a)}_{pname(b)}"

    arcs = []  # (i, j, a, b)
    for zi in zones:
        for zj in zones:
            if zi.id == zj.id:
                continue
            for a in zi.members:
                for b in zj.members:
                    arcs.append((zi.id, zj.id, a, b))

    w = sink.write
    w("\\ Zone-selection TSP model for observing every object side\n")
    w(f"\\ instance {instance.digest()} epsilon {_fmt(epsilon)} zones {N} "
      f"points {len(points)}\n")
    w("\\ Zone 1 holds only the start; zone s+1 holds the viewpoints observing side s.\n")
    w("\\ X_i_j_a_b = 1 when the tour leaves point a of zone i for point b of zone j.\n")
    w("\\ Point labels: 0 is the start, k+1 is observation point k.\n")
    w("\\ u_i are ordering variables (MTZ) with N = number of zones.\n")
    w("\\ Point-flow rows balance in- and out-arcs at every point of every zone.\n")
    w("\\ The endpoint-coupling family is omitted: a single start zone makes it\n")
    w("\\ redundant with the degree and point-flow rows.\n")
    w("Minimize\n obj:\n")
    _write_sum(sink, [f"{_fmt(math.dist(pos[a], pos[b]))} {xname(i, j, a, b)}" for i, j, a, b in arcs])
    w("Subject To\n")
    out_arcs: dict[int, list[str]] = {z.id: [] for z in zones}
    in_arcs: dict[int, list[str]] = {z.id: [] for z in zones}
    flow: dict[tuple[int, int], list[str]] = {}
    for i, j, a, b in arcs:
        name = xname(i, j, a, b)
        out_arcs[i].append(name)
        in_arcs[j].append(name)
        flow.setdefault((i, a), []).append(f"+ {name}")
        flow.setdefault((j, b), []).append(f"- {name}")
    for z in zones:
        w(f" out_{z.id}:\n")
        _write_sum(sink, out_arcs[z.id])
        w("   = 1\n")
    for z in zones:
        w(f" in_{z.id}:\n")
        _write_sum(sink, in_arcs[z.id])
        w("   = 1\n")
    for z in zones:
        for a in z.members:
            w(f" flow_{z.id}_{pname(a)}:\n")
            terms = flow.get((z.id, a), [])
            for k in range(0, len(terms), 6):
                w("   " + " ".join(terms[k:k + 6]) + "\n")
            w("   = 0\n")
    for i, j, a, b in arcs:
        if i == 1 or j == 1:
            continue
        w(f" mtz_{i}_{j}_{pname(a)}_{pname(b)}: u_{i} - u_{j} + {N} {xname(i, j, a, b)} <= {N - 1}\n")
    w("Bounds\n")
    for z in zones:
        w(f" u_{z.id} >= 0\n")
    w("Binary\n")
    for i, j, a, b in arcs:
        w(f" {xname(i, j, a, b)}\n")
    w("End\n")
    return summary
