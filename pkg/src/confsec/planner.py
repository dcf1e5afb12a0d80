"""Region-decomposed continuous motion planners for the (k, r) problem.

A query carries a start configuration of k robots and a goal for the first r
of them.  Every planner here moves the whole configuration by a path of
isometries (rotations of the sphere or circle, translations of the torus), so
pairwise distances are constant along the path and collision-freeness is
automatic.  Each planner covers the query space by finitely many open
regions, each with a plan varying continuously in the query; the number of
regions matches the propagated topological-complexity value for the circle
and 2-sphere planners, and is reported as non-optimal for the torus planner.

Region membership resolves to the lowest-numbered region whose strict
predicate holds.  Predicates carry small angular margins so that plans stay
uniformly well-conditioned inside their region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import bounds as bnd
from . import geometry as geo
from .geometry import (
    Configuration,
    SpaceDescriptor,
    SpaceKind,
    config_distance,
    configuration,
    distance,
    project,
)

TWO_PI = geo.TWO_PI
ANTIPODAL_MARGIN = math.pi / 16
POLE_MARGIN = math.pi / 8
POLE_NEIGHBORHOOD = math.pi / 4
DEFAULT_DENSITY = 256  # sample points per unit of geodesic path length


class DegenerateQueryError(RuntimeError):
    """No region predicate holds (impossible for the shipped planners)."""


class PlannerError(ValueError):
    """Query does not match the planner's space or shape."""


@dataclass(frozen=True)
class PlanQuery:
    space: SpaceDescriptor
    k: int
    r: int
    start: Configuration
    goal: Configuration

    def __post_init__(self) -> None:
        if not 1 <= self.r <= self.k:
            raise PlannerError("need 1 <= r <= k")
        if self.start.space != self.space or self.goal.space != self.space:
            raise PlannerError("start/goal live on the wrong space")
        if self.start.k != self.k:
            raise PlannerError(f"start must have {self.k} points")
        if self.goal.k != self.r:
            raise PlannerError(f"goal must have {self.r} points")


@dataclass(frozen=True)
class PlanSample:
    t: float
    config: Configuration


@dataclass(frozen=True)
class MotionPlan:
    region_id: int
    samples: tuple[PlanSample, ...]
    metadata: dict

    def to_json(self) -> dict:
        return {
            "region_id": self.region_id,
            "metadata": self.metadata,
            "samples": [
                {"t": s.t, "config": geo.configuration_to_json(s.config)}
                for s in self.samples
            ],
        }


@dataclass(frozen=True)
class Region:
    region_id: int
    description: str
    predicate: Callable[[PlanQuery], bool]


# ---------------------------------------------------------------------------
# Rotation helpers


def _rot2(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def _rot3(axis: np.ndarray, angle: float) -> np.ndarray:
    u = axis / np.linalg.norm(axis)
    K = np.array([
        [0.0, -u[2], u[1]],
        [u[2], 0.0, -u[0]],
        [-u[1], u[0], 0.0],
    ])
    return np.eye(3) + math.sin(angle) * K + (1.0 - math.cos(angle)) * (K @ K)


def _short_rotation_leg(u: np.ndarray, v: np.ndarray) -> tuple[float, np.ndarray | None]:
    """(angle, axis) rotating u to v along the short arc; axis None when u = v."""
    dot = max(-1.0, min(1.0, float(np.dot(u, v))))
    angle = math.acos(dot)
    if angle < 1e-12:
        return 0.0, None
    if dot <= -1.0 + 1e-12:
        raise DegenerateQueryError("antipodal endpoints have no short rotation")
    axis = np.cross(u, v)
    return angle, axis / np.linalg.norm(axis)


class _RotationPath:
    """Concatenated rotations applied rigidly to the start points."""

    def __init__(self, space: SpaceDescriptor, start: Configuration,
                 legs: Sequence[tuple[float, np.ndarray | None]]):
        # legs: (signed angle, axis) with axis None meaning a 2D rotation (S^1)
        self.space = space
        self.start_pts = np.array([p.payload for p in start.points])
        self.legs = list(legs)
        self.lengths = [abs(angle) for angle, _axis in self.legs]
        self.total = sum(self.lengths)

    def matrix_at(self, t: float) -> np.ndarray:
        dim = self.start_pts.shape[1]
        M = np.eye(dim)
        if self.total == 0.0:
            return M
        s = t * self.total
        for (angle, axis), length in zip(self.legs, self.lengths):
            if length == 0.0:
                continue
            tau = min(1.0, max(0.0, s / length))
            partial = tau * angle
            R = _rot2(partial) if axis is None else _rot3(axis, partial)
            M = R @ M
            s -= length
            if s <= 0.0:
                break
        return M

    def config_at(self, t: float) -> Configuration:
        pts = self.start_pts @ self.matrix_at(t).T
        return configuration(
            self.space,
            [geo.point(self.space, row) for row in pts],
            validate=False,
        )


class _TranslationPath:
    """Rigid torus translation start + t * delta (max-metric isometry)."""

    def __init__(self, space: SpaceDescriptor, start: Configuration, delta: np.ndarray):
        self.space = space
        self.start_pts = np.array([p.payload for p in start.points])
        self.delta = np.asarray(delta, dtype=float)
        self.total = float(np.max(np.abs(self.delta))) if self.delta.size else 0.0

    def config_at(self, t: float) -> Configuration:
        pts = self.start_pts + t * self.delta
        return configuration(
            self.space,
            [geo.point(self.space, row) for row in pts],
            validate=False,
        )


def _sample_path(path, density: int) -> tuple[PlanSample, ...]:
    n = max(2, int(math.ceil(density * path.total)) + 1)
    n = min(n, 20_001)
    ts = np.linspace(0.0, 1.0, n)
    return tuple(PlanSample(float(t), path.config_at(float(t))) for t in ts)


# ---------------------------------------------------------------------------
# Circle planner (k = 2, r = 1)


def _require(query: PlanQuery, kind: SpaceKind, param: int | None,
             k: int | None, r: int) -> None:
    if query.space.kind is not kind or (param is not None and query.space.param != param):
        raise PlannerError(f"planner does not apply to {query.space}")
    if k is not None and query.k != k:
        raise PlannerError(f"planner needs k = {k}")
    if query.r != r:
        raise PlannerError(f"planner needs r = {r}")


def circle_regions() -> list[Region]:
    def short_ok(q: PlanQuery) -> bool:
        alpha = geo.circle_angle(q.start.points[0])
        beta = geo.circle_angle(q.goal.points[0])
        return geo._circle_dist(beta, alpha + math.pi) > ANTIPODAL_MARGIN

    def long_ok(q: PlanQuery) -> bool:
        alpha = geo.circle_angle(q.start.points[0])
        beta = geo.circle_angle(q.goal.points[0])
        return geo._circle_dist(beta, alpha) > 0.0

    return [
        Region(1, "goal stays away from the antipode of the first robot "
                  "(short-way rotation)", short_ok),
        Region(2, "goal differs from the first robot (long-way rotation)", long_ok),
    ]


def _circle_path(query: PlanQuery) -> tuple[int, _RotationPath]:
    _require(query, SpaceKind.SPHERE, 1, 2, 1)
    alpha = geo.circle_angle(query.start.points[0])
    beta = geo.circle_angle(query.goal.points[0])
    for region in circle_regions():
        if not region.predicate(query):
            continue
        if region.region_id == 1:
            delta = math.fmod(beta - alpha + math.pi, TWO_PI)
            if delta < 0:
                delta += TWO_PI
            delta -= math.pi
        else:
            theta = math.fmod(beta - alpha, TWO_PI)
            if theta < 0:
                theta += TWO_PI
            delta = theta - TWO_PI
        return region.region_id, _RotationPath(query.space, query.start,
                                               [(delta, None)])
    raise DegenerateQueryError("goal coincides with both the robot and its antipode")


def plan_circle_21(query: PlanQuery, density: int = DEFAULT_DENSITY) -> MotionPlan:
    """Two-region rigid-rotation planner on the circle for (k, r) = (2, 1)."""
    region_id, path = _circle_path(query)
    return MotionPlan(region_id, _sample_path(path, density), {
        "planner": "circle_21", "space": query.space.space_id,
        "k": query.k, "r": query.r, "rigid": True, "density": density,
        "regions": 2,
    })


# ---------------------------------------------------------------------------
# 2-sphere planner (k = 2, r = 1)

_POLE = np.array([0.0, 0.0, 1.0])
_EQUATOR_AXIS = np.array([1.0, 0.0, 0.0])
_W = _rot3(_EQUATOR_AXIS, math.pi / 2)  # fixed quarter-turn moving poles off themselves


def sphere2_regions() -> list[Region]:
    def pole_gap(a1: np.ndarray) -> float:
        return min(
            math.acos(max(-1.0, min(1.0, float(np.dot(a1, _POLE))))),
            math.acos(max(-1.0, min(1.0, float(np.dot(a1, -_POLE))))),
        )

    def r1(q: PlanQuery) -> bool:
        a1 = q.start.points[0].payload
        b = q.goal.points[0].payload
        return math.acos(max(-1.0, min(1.0, float(np.dot(b, -a1))))) > ANTIPODAL_MARGIN

    def r2(q: PlanQuery) -> bool:
        a1 = q.start.points[0].payload
        b = q.goal.points[0].payload
        return pole_gap(a1) > POLE_MARGIN and float(np.dot(b, a1)) < 1.0

    def r3(q: PlanQuery) -> bool:
        a1 = q.start.points[0].payload
        b = q.goal.points[0].payload
        wa = _W @ a1
        return (pole_gap(a1) < POLE_NEIGHBORHOOD
                and float(np.dot(b, a1)) < 1.0
                and float(np.dot(b, wa)) < 1.0)

    return [
        Region(1, "goal away from the antipode of the first robot (short arc)", r1),
        Region(2, "first robot away from the poles; flip it across, then short arc",
               r2),
        Region(3, "first robot near a pole: quarter-turn off the pole, flip, "
                  "then short arc", r3),
    ]


def _sphere2_path(query: PlanQuery) -> tuple[int, _RotationPath]:
    _require(query, SpaceKind.SPHERE, 2, 2, 1)
    a1 = query.start.points[0].payload
    b = query.goal.points[0].payload
    for region in sphere2_regions():
        if not region.predicate(query):
            continue
        legs: list[tuple[float, np.ndarray | None]] = []
        if region.region_id == 1:
            angle, axis = _short_rotation_leg(a1, b)
            if axis is not None:
                legs.append((angle, axis))
        elif region.region_id == 2:
            flip_axis = np.cross(a1, _POLE)
            legs.append((math.pi, flip_axis / np.linalg.norm(flip_axis)))
            angle, axis = _short_rotation_leg(-a1, b)
            if axis is not None:
                legs.append((angle, axis))
        else:
            legs.append((math.pi / 2, _EQUATOR_AXIS))
            wa = _W @ a1
            flip_axis = np.cross(wa, _POLE)
            legs.append((math.pi, flip_axis / np.linalg.norm(flip_axis)))
            angle, axis = _short_rotation_leg(-wa, b)
            if axis is not None:
                legs.append((angle, axis))
        return region.region_id, _RotationPath(query.space, query.start, legs)
    raise DegenerateQueryError("no sphere region accepted the query")


def plan_sphere2_21(query: PlanQuery, density: int = DEFAULT_DENSITY) -> MotionPlan:
    """Three-region rigid-rotation planner on the 2-sphere for (k, r) = (2, 1)."""
    region_id, path = _sphere2_path(query)
    return MotionPlan(region_id, _sample_path(path, density), {
        "planner": "sphere2_21", "space": query.space.space_id,
        "k": query.k, "r": query.r, "rigid": True, "density": density,
        "regions": 3,
    })


# ---------------------------------------------------------------------------
# Group (torus / circle) planner, any k, r = 1


def _group_dims(space: SpaceDescriptor) -> int:
    if space.kind is SpaceKind.TORUS:
        return space.param
    if space.kind is SpaceKind.SPHERE and space.param == 1:
        return 1
    raise PlannerError("the group planner runs on tori and the circle")


def _angles_of(space: SpaceDescriptor, p: geo.SpacePoint) -> np.ndarray:
    if space.kind is SpaceKind.TORUS:
        return np.asarray(p.payload, dtype=float)
    return np.array([geo.circle_angle(p)])


def group_regions(space: SpaceDescriptor) -> list[Region]:
    m = _group_dims(space)
    regions = []
    for idx in range(1 << m):
        choice = tuple(idx >> j & 1 for j in range(m))  # 0 short, 1 long per axis

        def pred(q: PlanQuery, choice=choice) -> bool:
            alpha = _angles_of(q.space, q.start.points[0])
            beta = _angles_of(q.space, q.goal.points[0])
            for j, c in enumerate(choice):
                if c == 0:
                    if geo._circle_dist(beta[j], alpha[j] + math.pi) <= ANTIPODAL_MARGIN:
                        return False
                else:
                    if geo._circle_dist(beta[j], alpha[j]) <= 0.0:
                        return False
            return True

        desc = ", ".join(
            f"axis {j}: {'short' if c == 0 else 'long'} way"
            for j, c in enumerate(choice)
        )
        regions.append(Region(idx + 1, desc, pred))
    return regions


def _group_path(query: PlanQuery):
    m = _group_dims(query.space)
    if query.r != 1:
        raise PlannerError("the group planner needs r = 1")
    alpha = _angles_of(query.space, query.start.points[0])
    beta = _angles_of(query.space, query.goal.points[0])
    for region in group_regions(query.space):
        if not region.predicate(query):
            continue
        choice = tuple((region.region_id - 1) >> j & 1 for j in range(m))
        delta = np.zeros(m)
        for j, c in enumerate(choice):
            if c == 0:
                d = math.fmod(beta[j] - alpha[j] + math.pi, TWO_PI)
                if d < 0:
                    d += TWO_PI
                delta[j] = d - math.pi
            else:
                theta = math.fmod(beta[j] - alpha[j], TWO_PI)
                if theta < 0:
                    theta += TWO_PI
                delta[j] = theta - TWO_PI
        if query.space.kind is SpaceKind.TORUS:
            return region.region_id, _TranslationPath(query.space, query.start, delta)
        return region.region_id, _RotationPath(query.space, query.start,
                                               [(float(delta[0]), None)])
    raise DegenerateQueryError("no translation region accepted the query")


def plan_group(query: PlanQuery, density: int = DEFAULT_DENSITY) -> MotionPlan:
    """Rigid group-translation planner on tori and the circle (r = 1, any k).

    Uses one region per per-axis way choice (2^m for T^m); this count is not
    claimed optimal and the plan metadata records the comparison against the
    propagated complexity bound.
    """
    region_id, path = _group_path(query)
    m = _group_dims(query.space)
    return MotionPlan(region_id, _sample_path(path, density), {
        "planner": "group", "space": query.space.space_id,
        "k": query.k, "r": query.r, "rigid": True, "density": density,
        "regions": 1 << m,
    })


# ---------------------------------------------------------------------------
# Registry and optimality report

PLANNERS: dict[str, dict] = {
    "circle_21": {"plan": plan_circle_21, "path": _circle_path,
                  "regions": lambda space: circle_regions()},
    "sphere2_21": {"plan": plan_sphere2_21, "path": _sphere2_path,
                   "regions": lambda space: sphere2_regions()},
    "group": {"plan": plan_group, "path": _group_path,
              "regions": group_regions},
}


def planner_for(space: SpaceDescriptor, k: int, r: int) -> str:
    if space.kind is SpaceKind.SPHERE and space.param == 1 and k == 2 and r == 1:
        return "circle_21"
    if space.kind is SpaceKind.SPHERE and space.param == 2 and k == 2 and r == 1:
        return "sphere2_21"
    if r == 1 and (space.kind is SpaceKind.TORUS
                   or (space.kind is SpaceKind.SPHERE and space.param == 1)):
        return "group"
    raise PlannerError(f"no shipped planner for {space} with k={k}, r={r}")


def planner_info(name: str, space: SpaceDescriptor, k: int, r: int) -> dict:
    """Region count of a planner compared against the propagated TC interval."""
    regions = len(PLANNERS[name]["regions"](space))
    store = bnd.propagate([])
    result = store.query(f"TC(pi({k},{r},{space.space_id}))")
    lo, hi = result.lo, result.hi
    optimal: bool | None
    if lo == hi == regions:
        optimal = True
    elif hi < regions:
        optimal = False
    else:
        optimal = None
    return {
        "planner": name,
        "space": space.space_id,
        "k": k,
        "r": r,
        "regions": regions,
        "tc_interval": [None if lo == math.inf else int(lo),
                        None if hi == math.inf else int(hi)],
        "optimal": optimal,
        "note": "" if optimal else "region count exceeds the known complexity bound",
    }


# ---------------------------------------------------------------------------
# Verification


@dataclass
class PlanReport:
    start_error: float
    goal_error: float
    min_separation: float
    rigidity_error: float | None
    max_step_ratio: float
    query_continuity_ratio: float | None
    probes: int
    checks: dict
    passed: bool

    def to_json(self) -> dict:
        return {
            "start_error": self.start_error,
            "goal_error": self.goal_error,
            "min_separation": self.min_separation,
            "rigidity_error": self.rigidity_error,
            "max_step_ratio": self.max_step_ratio,
            "query_continuity_ratio": self.query_continuity_ratio,
            "probes": self.probes,
            "checks": self.checks,
            "passed": self.passed,
        }


ENDPOINT_TOL = 1e-9
RIGID_TOL = 1e-9
STEP_RATIO_MAX = 50.0
QUERY_RATIO_MAX = 100.0


def _perturb_query(query: PlanQuery, rng: np.random.Generator,
                   scale: float) -> PlanQuery | None:
    try:
        start = configuration(
            query.space,
            [geo.perturb_point(p, rng, scale) for p in query.start.points],
        )
        goal = configuration(
            query.space,
            [geo.perturb_point(p, rng, scale) for p in query.goal.points],
        )
        return PlanQuery(query.space, query.k, query.r, start, goal)
    except geo.SpaceError:
        return None


def verify_plan(plan: MotionPlan, query: PlanQuery, seed: int = 0,
                probes: int = 10) -> PlanReport:
    """Check endpoints, separation, rigidity, and continuity of a motion plan.

    Continuity is probed two ways: steps along the sampled path must stay
    commensurate with the mean step, and (when the planner is known) nearby
    same-region queries must produce uniformly nearby paths.
    """
    samples = plan.samples
    start_error = geo.config_coordinate_error(samples[0].config, query.start)
    goal_error = geo.config_coordinate_error(
        project(samples[-1].config, query.r), query.goal)

    min_sep = min(geo.min_separation(s.config) for s in samples)

    rigidity_error: float | None = None
    if plan.metadata.get("rigid"):
        # coordinate-level gaps are exact where the arc metric loses precision
        # near antipodal pairs; isometries preserve both
        base = samples[0].config
        k = base.k
        base_d = [[geo.coordinate_error(base.points[i], base.points[j])
                   for j in range(i + 1, k)] for i in range(k)]
        worst = 0.0
        for s in samples:
            for i in range(k):
                for idx, j in enumerate(range(i + 1, k)):
                    d = geo.coordinate_error(s.config.points[i], s.config.points[j])
                    worst = max(worst, abs(d - base_d[i][idx]))
        rigidity_error = worst

    steps = [config_distance(a.config, b.config)
             for a, b in zip(samples, samples[1:])]
    total = sum(steps)
    mean_step = total / len(steps) if steps else 0.0
    max_step = max(steps) if steps else 0.0
    if max_step <= 1e-9:
        step_ratio = 0.0
    else:
        step_ratio = max_step / max(mean_step, 1e-15)

    ratio: float | None = None
    used = 0
    name = plan.metadata.get("planner")
    if name in PLANNERS and probes > 0:
        path_fn = PLANNERS[name]["path"]
        region_id, path = path_fn(query)
        rng = np.random.default_rng(seed ^ 0x9E37)
        ts = np.linspace(0.0, 1.0, 101)
        for _ in range(probes):
            nearby = _perturb_query(query, rng, 1e-4)
            if nearby is None:
                continue
            din = max(config_distance(query.start, nearby.start),
                      config_distance(query.goal, nearby.goal))
            if din == 0.0 or din > 1e-3:
                continue
            try:
                other_region, other_path = path_fn(nearby)
            except DegenerateQueryError:
                continue
            if other_region != region_id:
                continue
            sup = max(
                config_distance(path.config_at(float(t)), other_path.config_at(float(t)))
                for t in ts
            )
            used += 1
            r = sup / din
            ratio = r if ratio is None else max(ratio, r)

    checks = {
        "start": start_error <= 1e-12,
        "goal": goal_error <= ENDPOINT_TOL,
        "separation": min_sep > geo.DELTA_SEP,
        "rigidity": rigidity_error is None or rigidity_error <= RIGID_TOL,
        "continuity_in_t": step_ratio <= STEP_RATIO_MAX,
        "continuity_in_query": ratio is None or ratio <= QUERY_RATIO_MAX,
    }
    return PlanReport(
        start_error=start_error,
        goal_error=goal_error,
        min_separation=min_sep,
        rigidity_error=rigidity_error,
        max_step_ratio=step_ratio,
        query_continuity_ratio=ratio,
        probes=used,
        checks=checks,
        passed=all(checks.values()),
    )
