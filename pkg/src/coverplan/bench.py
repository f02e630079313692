"""Random instance generation and the experiment harness."""

from __future__ import annotations

import csv
import logging
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import CoverplanError, GenerationFailed, InstanceTooLarge, InstanceTooSmall
from .geometry import ObservationParams, Point2D, RectObject
from .instance import Instance

log = logging.getLogger(__name__)

CSV_HEADER = ("algorithm", "n", "epsilon", "seed", "length", "lb",
              "ratio_lb", "ratio_oracle", "runtime_s", "status")
ALGORITHMS = ("offline", "nof", "ci", "batsp")
MAX_REJECTIONS = 100_000


@dataclass(frozen=True)
class GenSpec:
    n: int
    seed: int = 0
    map_side: float = 120.0
    padding: float = 10.0
    size_choices: tuple[tuple[float, float], ...] = ((1.0, 2.0), (2.0, 2.0), (1.0, 1.0))
    d_max: float = 4.0
    d_min: float = 1.0
    theta_deg: float = 60.0
    perception: float = 40.0
    min_gap: float | None = None  # defaults to 2 * d_min
    start_sees: int = 2

    @property
    def params(self) -> ObservationParams:
        return ObservationParams(math.radians(self.theta_deg), self.d_max, self.d_min, self.perception)

    @property
    def gap(self) -> float:
        return 2 * self.d_min if self.min_gap is None else self.min_gap

    @property
    def link_radius(self) -> float:
        """Center distance at which visiting any viewpoint of one object reveals the other."""
        half_diag = max(math.hypot(l, w) for l, w in self.size_choices) / 2
        return self.perception - self.d_max - half_diag


def rect_gap(a: RectObject, b: RectObject) -> float:
    ax0, ay0, ax1, ay1 = a.bounds
    bx0, by0, bx1, by1 = b.bounds
    dx = max(bx0 - ax1, ax0 - bx1, 0.0)
    dy = max(by0 - ay1, ay0 - by1, 0.0)
    return math.hypot(dx, dy)


def point_rect_distance(p, r: RectObject) -> float:
    x0, y0, x1, y1 = r.bounds
    dx = max(x0 - p[0], 0.0, p[0] - x1)
    dy = max(y0 - p[1], 0.0, p[1] - y1)
    return math.hypot(dx, dy)


def generate_instance(spec: GenSpec) -> Instance:
    if spec.n < 2:
        raise InstanceTooSmall("instance generation needs n >= 2")
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    lo, hi = spec.padding, spec.padding + spec.map_side
    objects: list[RectObject] = []
    rejections = 0

    def reject():
        nonlocal rejections
        rejections += 1
        if rejections >= MAX_REJECTIONS:
            raise GenerationFailed(f"gave up after {rejections} rejections (n={spec.n}, seed={spec.seed})")

    while len(objects) < spec.n:
        l, w = spec.size_choices[int(rng.integers(len(spec.size_choices)))]
        cx = float(rng.uniform(lo + l / 2, hi - l / 2))
        cy = float(rng.uniform(lo + w / 2, hi - w / 2))
        cand = RectObject(len(objects), Point2D(round(cx, 6), round(cy, 6)), l, w)
        if any(rect_gap(cand, o) < spec.gap for o in objects):
            reject()
            continue
        if objects and min(math.dist(cand.center, o.center) for o in objects) > spec.link_radius:
            reject()
            continue
        objects.append(cand)

    need = min(spec.start_sees, spec.n)
    while True:
        s = Point2D(round(float(rng.uniform(lo, hi)), 6), round(float(rng.uniform(lo, hi)), 6))
        seen = sum(math.dist(s, o.center) <= spec.perception for o in objects)
        if all(point_rect_distance(s, o) >= spec.d_min for o in objects) and seen >= need:
            break
        reject()
    bounds = (0.0, 0.0, spec.map_side + 2 * spec.padding, spec.map_side + 2 * spec.padding)
    return Instance(tuple(objects), s, spec.params, bounds)


@dataclass(frozen=True)
class MetricsRow:
    algorithm: str
    n: int
    epsilon: float
    seed: int
    length: float = math.nan
    lb: float = math.nan
    ratio_lb: float = math.nan
    ratio_oracle: float = math.nan
    runtime_s: float = math.nan
    status: str = "ok"
    ratio_D: float = math.nan  # length / D
    ratio_half_left: float = math.nan  # length / (residual tree cost / 2)

    def as_csv(self) -> list:
        return [getattr(self, k) for k in CSV_HEADER]


def _oracle_length(inst: Instance, eps: float, points) -> float:
    from .oracle import exact_optimum
    try:
        return exact_optimum(inst, eps, points=points).length
    except InstanceTooLarge:
        return math.nan


def run_cell(n: int, eps: float, seed: int, algorithms=ALGORITHMS, with_oracle=False) -> list[MetricsRow]:
    """All requested algorithms on one generated instance; failures become tagged rows."""
    from .offline import plan_offline
    from .online import run_policy

    try:
        inst = generate_instance(GenSpec(n, seed))
        plan = plan_offline(inst, eps)
    except CoverplanError as exc:
        tag = f"error:{type(exc).__name__}"
        log.warning("cell n=%d eps=%g seed=%d failed: %s", n, eps, seed, exc)
        return [MetricsRow(a, n, eps, seed, status=tag) for a in algorithms]
    opt = _oracle_length(inst, eps, plan.points) if with_oracle else math.nan
    rows = []
    for alg in algorithms:
        try:
            if alg == "offline":
                t0 = time.perf_counter()
                length = plan_offline(inst, eps).tour.length
                dt = time.perf_counter() - t0
            else:
                res = run_policy(alg, inst, eps)
                length, dt = res.length, res.runtime_s
        except CoverplanError as exc:
            log.warning("%s on n=%d eps=%g seed=%d failed: %s", alg, n, eps, seed, exc)
            rows.append(MetricsRow(alg, n, eps, seed, status=f"error:{type(exc).__name__}"))
            continue
        rows.append(MetricsRow(alg, n, eps, seed, length, plan.lb, length / plan.lb,
                               length / opt if opt == opt else math.nan, dt,
                               ratio_D=length / plan.D, ratio_half_left=2 * length / plan.left_cost))
    return rows


def _cell_job(args):
    return run_cell(*args)


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("COVERPLAN_THREADS", "1")))
    except ValueError:
        return 1


def run_suite(n_list: Iterable[int], epsilon_list: Iterable[float], repeats: int = 5,
              algorithms=ALGORITHMS, out_csv=None, with_oracle: bool = False,
              seed0: int = 0) -> list[MetricsRow]:
    """Cross product of (n, epsilon, seed); rows come back in grid order."""
    for a in algorithms:
        if a not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {a!r}")
    jobs = [(n, eps, seed0 + s, tuple(algorithms), with_oracle)
            for n in n_list for eps in epsilon_list for s in range(repeats)]
    workers = worker_count()
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = list(pool.map(_cell_job, jobs))
    else:
        chunks = [_cell_job(j) for j in jobs]
    rows = [r for chunk in chunks for r in chunk]
    if out_csv is not None:
        write_csv(rows, out_csv)
    return rows


def write_csv(rows: Iterable[MetricsRow], out) -> None:
    if isinstance(out, (str, os.PathLike)):
        with open(out, "w", newline="") as fh:
            write_csv(rows, fh)
        return
    w = csv.writer(out)
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.as_csv())


def median_runtimes(rows: Iterable[MetricsRow]) -> dict[tuple[str, int, float], float]:
    cells: dict[tuple[str, int, float], list[float]] = {}
    for r in rows:
        if r.status == "ok":
            cells.setdefault((r.algorithm, r.n, r.epsilon), []).append(r.runtime_s)
    return {k: statistics.median(v) for k, v in cells.items()}
