"""End-to-end offline pipeline: mesh, coverage graph, Steiner selection, tour."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from .discretize import ObservationPoint, generate_observation_points, max_object_distance, mesh_granularity
from .errors import InvalidParameter, StructuralError
from .graph import build_graph
from .instance import Instance
from .steiner import SteinerTree, TrimResult, repair_midpoint_leaves, steiner_tree, trim
from .tour import Tour, christofides

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Selection:
    """Viewpoints chosen by the Steiner step and the tour through them."""

    tree: SteinerTree
    trimmed: TrimResult
    points: tuple[ObservationPoint, ...]  # selected, in point-id order
    tour: Tour
    repaired_midpoints: int


@dataclass(frozen=True)
class OfflinePlan:
    tour: Tour
    selected_points: frozenset[int]
    lb: float
    ratio_bound: float
    epsilon: float
    D: float
    delta: float
    steiner_cost: float
    removed_weight: float
    left_cost: float
    n_candidates: int
    repaired_midpoints: int
    residual_connected: bool
    runtime_s: float = 0.0
    points: tuple[ObservationPoint, ...] = field(default=(), repr=False)

    @property
    def ratio_to_lb(self) -> float:
        return self.tour.length / self.lb

    @property
    def waypoint_points(self) -> tuple[ObservationPoint, ...]:
        by_id = {p.id: p for p in self.points}
        return tuple(by_id[self.points_order[i]] for i in range(len(self.points_order)))

    @property
    def points_order(self) -> list[int]:
        ids = sorted(self.selected_points)
        return [ids[i] for i in self.tour.order]


def approximation_bound(epsilon: float, n: int) -> float:
    return (1 + epsilon) * (2 + 2 * n)


def select_and_tour(points, sides, start, D, terminals_include_start=True) -> Selection:
    """Steiner-select viewpoints covering ``sides`` and tour them from ``start``."""
    g = build_graph(points, sides, start, D)
    terminals = g.terminals if terminals_include_start else g.terminals[1:]
    tree = steiner_tree(g, terminals)
    tree, repaired = repair_midpoint_leaves(tree, g)
    cut = trim(tree, g)
    by_id = {p.id: p for p in points}
    chosen = tuple(by_id[i] for i in sorted(cut.selected_point_ids))
    tour = christofides([p.pos for p in chosen], start)
    return Selection(tree, cut, chosen, tour, repaired)


def plan_offline(instance: Instance, epsilon: float) -> OfflinePlan:
    if not 0 < epsilon <= 1:
        raise InvalidParameter("epsilon must lie in (0, 1]")
    t0 = time.perf_counter()
    D = max_object_distance(instance.objects)
    delta = mesh_granularity(epsilon, instance.n, D)
    points = generate_observation_points(instance.objects, instance.params, delta)
    sel = select_and_tour(points, instance.sides, instance.start, D)
    cut = sel.trimmed
    expected_removed = 2 * instance.n * D
    if abs(cut.removed_weight - expected_removed) > 1e-9 * max(1.0, expected_removed):
        raise StructuralError(
            f"trimmed weight {cut.removed_weight} differs from 2nD = {expected_removed}")
    if not cut.connected:
        log.warning("residual tree after trimming is disconnected")
    lb = max(D, cut.left_cost / 2)
    return OfflinePlan(
        tour=sel.tour,
        selected_points=cut.selected_point_ids,
        lb=lb,
        ratio_bound=approximation_bound(epsilon, instance.n),
        epsilon=epsilon,
        D=D,
        delta=delta,
        steiner_cost=sel.tree.cost,
        removed_weight=cut.removed_weight,
        left_cost=cut.left_cost,
        n_candidates=len(points),
        repaired_midpoints=sel.repaired_midpoints,
        residual_connected=cut.connected,
        runtime_s=time.perf_counter() - t0,
        points=tuple(points),
    )
