"""Model spaces, their metrics, and configurations of pairwise-distinct points.

The library works over a fixed family of concrete spaces: unit spheres S^d,
real projective spaces RP^d, flat tori T^m, Euclidean spaces R^m, closed unit
discs D^m, the one-point union S2vS1 of a 2-sphere and a circle, and finite
discrete spaces.  Points carry canonical coordinates so that equality checks,
metric values and JSON serialization are reproducible bit for bit.

Conventions:

- spheres use unit vectors in R^{d+1} and the geodesic (arc-length) metric;
- projective points are sign-canonicalized unit vectors (first coordinate
  above the zero threshold is positive) with the quotient geodesic metric;
- torus points are angle vectors in [0, 2pi)^m with the max of per-angle
  circle distances;
- the wedge is (S^2 x {b0}) u ({a0} x S^1) with a0 = (1,0,0), b0 = angle 0;
  cross-branch distances run through the glue point, which is canonically
  represented on the circle branch at angle 0.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Sequence

import numpy as np

DELTA_SEP = 1e-9
_UNIT_TOL = 1e-9
_ZERO_TOL = 1e-12
TWO_PI = 2.0 * math.pi


class SpaceError(ValueError):
    """Malformed space, point or configuration data."""


class SpaceMismatchError(SpaceError):
    """Operands belong to different spaces."""


class AmbiguousGeodesicError(ValueError):
    """The shortest geodesic between the endpoints is not unique."""


class SpaceKind(Enum):
    SPHERE = "sphere"
    REAL_PROJECTIVE = "real_projective"
    TORUS = "torus"
    EUCLIDEAN = "euclidean"
    DISC = "disc"
    WEDGE_S2_S1 = "wedge_s2_s1"
    DISCRETE = "discrete"


class MetricKind(Enum):
    GEODESIC = "geodesic"
    EUCLIDEAN = "euclidean"
    QUOTIENT_GEODESIC = "quotient_geodesic"
    BRANCH_METRIC = "branch_metric"
    DISCRETE = "discrete"


_METRIC_OF_KIND = {
    SpaceKind.SPHERE: MetricKind.GEODESIC,
    SpaceKind.REAL_PROJECTIVE: MetricKind.QUOTIENT_GEODESIC,
    SpaceKind.TORUS: MetricKind.GEODESIC,
    SpaceKind.EUCLIDEAN: MetricKind.EUCLIDEAN,
    SpaceKind.DISC: MetricKind.EUCLIDEAN,
    SpaceKind.WEDGE_S2_S1: MetricKind.BRANCH_METRIC,
    SpaceKind.DISCRETE: MetricKind.DISCRETE,
}


@dataclass(frozen=True)
class SpaceDescriptor:
    """A named model space.  ``param`` is d, m or n depending on the kind."""

    kind: SpaceKind
    param: int = 0

    def __post_init__(self) -> None:
        if self.kind is SpaceKind.WEDGE_S2_S1:
            if self.param != 0:
                raise SpaceError("the wedge takes no parameter")
        elif self.kind is SpaceKind.DISCRETE:
            if self.param < 1:
                raise SpaceError("a discrete space needs at least one point")
        elif self.param < 1:
            raise SpaceError(f"{self.kind.value} needs parameter >= 1")

    @property
    def space_id(self) -> str:
        k = self.kind
        if k is SpaceKind.SPHERE:
            return f"S{self.param}"
        if k is SpaceKind.REAL_PROJECTIVE:
            return f"RP{self.param}"
        if k is SpaceKind.TORUS:
            return f"T{self.param}"
        if k is SpaceKind.EUCLIDEAN:
            return f"R{self.param}"
        if k is SpaceKind.DISC:
            return f"D{self.param}"
        if k is SpaceKind.WEDGE_S2_S1:
            return "S2vS1"
        return f"Discrete{self.param}"

    @property
    def dim(self) -> int:
        if self.kind is SpaceKind.WEDGE_S2_S1:
            return 2
        if self.kind is SpaceKind.DISCRETE:
            return 0
        return self.param

    @property
    def hausdorff(self) -> bool:
        return True

    @property
    def boundaryless_manifold(self) -> bool:
        return self.kind not in (
            SpaceKind.DISC,
            SpaceKind.WEDGE_S2_S1,
            SpaceKind.DISCRETE,
        )

    @property
    def metric(self) -> MetricKind:
        return _METRIC_OF_KIND[self.kind]

    def __str__(self) -> str:
        return self.space_id


def sphere(d: int) -> SpaceDescriptor:
    return SpaceDescriptor(SpaceKind.SPHERE, d)


def real_projective(d: int) -> SpaceDescriptor:
    return SpaceDescriptor(SpaceKind.REAL_PROJECTIVE, d)


def torus(m: int) -> SpaceDescriptor:
    return SpaceDescriptor(SpaceKind.TORUS, m)


def euclidean(m: int) -> SpaceDescriptor:
    return SpaceDescriptor(SpaceKind.EUCLIDEAN, m)


def disc(m: int) -> SpaceDescriptor:
    return SpaceDescriptor(SpaceKind.DISC, m)


def wedge_s2_s1() -> SpaceDescriptor:
    return SpaceDescriptor(SpaceKind.WEDGE_S2_S1, 0)


def discrete(n: int) -> SpaceDescriptor:
    return SpaceDescriptor(SpaceKind.DISCRETE, n)


_SPACE_RE = re.compile(r"^(S|RP|T|R|D|Discrete)(\d+)$")


def parse_space(text: str) -> SpaceDescriptor:
    """Parse a space id such as ``"S2"``, ``"RP3"``, ``"T2"`` or ``"S2vS1"``."""
    text = text.strip()
    if text in ("S2vS1", "wedge"):
        return wedge_s2_s1()
    m = _SPACE_RE.match(text)
    if m is None:
        raise SpaceError(f"unknown space id: {text!r}")
    prefix, num = m.group(1), int(m.group(2))
    builders = {
        "S": sphere,
        "RP": real_projective,
        "T": torus,
        "R": euclidean,
        "D": disc,
        "Discrete": discrete,
    }
    return builders[prefix](num)


# ---------------------------------------------------------------------------
# Points


@dataclass(frozen=True, eq=False)
class SpacePoint:
    """A canonical point of a model space.

    ``payload`` is a read-only float array for vector-coordinate spaces,
    a ``(branch, value)`` pair for the wedge (branch ``"sphere"`` with a unit
    3-vector, or ``"circle"`` with an angle), and an ``int`` for discrete
    spaces.  Construct points through :func:`point`, which canonicalizes.
    """

    space: SpaceDescriptor
    payload: Any

    @property
    def coords(self) -> Any:
        return self.payload

    def __repr__(self) -> str:
        return f"SpacePoint({self.space.space_id}, {_payload_repr(self.payload)})"


def _payload_repr(payload: Any) -> str:
    if isinstance(payload, np.ndarray):
        return np.array2string(payload, precision=6, separator=",")
    if isinstance(payload, tuple):
        branch, value = payload
        return f"({branch}, {_payload_repr(value)})"
    return repr(payload)


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.flags.writeable = False
    return out


def _canon_unit(vec: np.ndarray, expect_dim: int) -> np.ndarray:
    v = np.asarray(vec, dtype=float)
    if v.shape != (expect_dim,):
        raise SpaceError(f"expected a vector of length {expect_dim}, got shape {v.shape}")
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > 1e-6:
        raise SpaceError(f"not a unit vector (norm {norm})")
    if abs(norm - 1.0) <= 1e-12:
        return v  # already unit to working precision; keep canonical form stable
    return v / norm


def _canon_projective(vec: np.ndarray, d: int) -> np.ndarray:
    v = _canon_unit(vec, d + 1)
    for x in v:
        if abs(x) > _ZERO_TOL:
            if x < 0:
                v = -v
            break
    return v


def _canon_angles(vec: Any, m: int) -> np.ndarray:
    a = np.asarray(vec, dtype=float)
    if a.shape != (m,):
        raise SpaceError(f"expected {m} angles, got shape {a.shape}")
    a = np.mod(a, TWO_PI)
    a = np.where(np.isclose(a, TWO_PI, atol=1e-15), 0.0, a)
    return a


def point(space: SpaceDescriptor, coords: Any) -> SpacePoint:
    """Build the canonical :class:`SpacePoint` of ``space`` from raw coordinates."""
    kind = space.kind
    if kind is SpaceKind.SPHERE:
        return SpacePoint(space, _freeze(_canon_unit(coords, space.param + 1)))
    if kind is SpaceKind.REAL_PROJECTIVE:
        return SpacePoint(space, _freeze(_canon_projective(coords, space.param)))
    if kind is SpaceKind.TORUS:
        return SpacePoint(space, _freeze(_canon_angles(coords, space.param)))
    if kind is SpaceKind.EUCLIDEAN:
        v = np.asarray(coords, dtype=float)
        if v.shape != (space.param,):
            raise SpaceError(f"expected a vector of length {space.param}")
        return SpacePoint(space, _freeze(v))
    if kind is SpaceKind.DISC:
        v = np.asarray(coords, dtype=float)
        if v.shape != (space.param,):
            raise SpaceError(f"expected a vector of length {space.param}")
        norm = float(np.linalg.norm(v))
        if norm > 1.0 + _UNIT_TOL:
            raise SpaceError(f"disc point has norm {norm} > 1")
        if norm > 1.0:
            v = v / norm
        return SpacePoint(space, _freeze(v))
    if kind is SpaceKind.WEDGE_S2_S1:
        return _canon_wedge(space, coords)
    if kind is SpaceKind.DISCRETE:
        i = int(coords)
        if not 0 <= i < space.param:
            raise SpaceError(f"discrete index {i} out of range [0, {space.param})")
        return SpacePoint(space, i)
    raise SpaceError(f"unhandled kind {kind}")


WEDGE_BASE_SPHERE = np.array([1.0, 0.0, 0.0])


def _canon_wedge(space: SpaceDescriptor, coords: Any) -> SpacePoint:
    try:
        branch, value = coords
    except (TypeError, ValueError) as exc:
        raise SpaceError("wedge coordinates must be (branch, value)") from exc
    if branch == "sphere":
        v = _canon_unit(value, 3)
        # the glue point lives canonically on the circle branch; keep the
        # snap radius tiny so canonicalization stays effectively continuous
        if v[0] >= 1.0 - 1e-14:
            return SpacePoint(space, ("circle", 0.0))
        return SpacePoint(space, ("sphere", _freeze(v)))
    if branch == "circle":
        angle = math.fmod(float(value), TWO_PI)
        if angle < 0:
            angle += TWO_PI
        if angle <= _ZERO_TOL or TWO_PI - angle <= _ZERO_TOL:
            angle = 0.0
        return SpacePoint(space, ("circle", angle))
    raise SpaceError(f"unknown wedge branch {branch!r}")


def wedge_sphere_point(vec: Sequence[float]) -> SpacePoint:
    return point(wedge_s2_s1(), ("sphere", vec))


def wedge_circle_point(angle: float) -> SpacePoint:
    return point(wedge_s2_s1(), ("circle", angle))


def circle_point(angle: float) -> SpacePoint:
    """The point of S^1 at the given angle."""
    return point(sphere(1), (math.cos(angle), math.sin(angle)))


def circle_angle(p: SpacePoint) -> float:
    """Angle in [0, 2pi) of a point of S^1."""
    if p.space.kind is not SpaceKind.SPHERE or p.space.param != 1:
        raise SpaceMismatchError("not a point of S1")
    a = math.atan2(p.payload[1], p.payload[0])
    return a + TWO_PI if a < 0 else a


# ---------------------------------------------------------------------------
# Metric


def _circle_dist(a: float, b: float) -> float:
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


def _sphere_dist(u: np.ndarray, v: np.ndarray) -> float:
    # half-angle form: well-conditioned at both coincident and antipodal pairs,
    # where arccos of the dot product loses ~1e-8
    return 2.0 * math.atan2(float(np.linalg.norm(u - v)),
                            float(np.linalg.norm(u + v)))


def _wedge_to_base(payload: Any) -> float:
    branch, value = payload
    if branch == "sphere":
        return _sphere_dist(np.asarray(value), WEDGE_BASE_SPHERE)
    return _circle_dist(value, 0.0)


def distance(p: SpacePoint, q: SpacePoint) -> float:
    """Metric of the common model space of ``p`` and ``q``."""
    if p.space != q.space:
        raise SpaceMismatchError(f"points on {p.space} and {q.space}")
    kind = p.space.kind
    if kind is SpaceKind.SPHERE:
        return _sphere_dist(p.payload, q.payload)
    if kind is SpaceKind.REAL_PROJECTIVE:
        rep = q.payload if float(np.dot(p.payload, q.payload)) >= 0 else -q.payload
        return _sphere_dist(p.payload, rep)
    if kind is SpaceKind.TORUS:
        return max(_circle_dist(a, b) for a, b in zip(p.payload, q.payload))
    if kind in (SpaceKind.EUCLIDEAN, SpaceKind.DISC):
        return float(np.linalg.norm(p.payload - q.payload))
    if kind is SpaceKind.WEDGE_S2_S1:
        (bp, vp), (bq, vq) = p.payload, q.payload
        if bp == bq:
            if bp == "sphere":
                return _sphere_dist(vp, vq)
            return _circle_dist(vp, vq)
        return _wedge_to_base(p.payload) + _wedge_to_base(q.payload)
    if kind is SpaceKind.DISCRETE:
        return 0.0 if p.payload == q.payload else 1.0
    raise SpaceError(f"unhandled kind {kind}")


def points_equal(p: SpacePoint, q: SpacePoint, tol: float = 1e-12) -> bool:
    return distance(p, q) <= tol


def coordinate_error(p: SpacePoint, q: SpacePoint) -> float:
    """Coordinate-level discrepancy between canonical points.

    Unlike :func:`distance` this is exact at zero (identical payloads give
    0.0), so it is the right yardstick for "equals the input exactly" checks;
    the arc-cosine metric has a precision floor near coincident points.
    """
    if p.space != q.space:
        raise SpaceMismatchError(f"points on {p.space} and {q.space}")
    kind = p.space.kind
    if kind is SpaceKind.REAL_PROJECTIVE:
        return float(min(np.linalg.norm(p.payload - q.payload),
                         np.linalg.norm(p.payload + q.payload)))
    if kind in (SpaceKind.SPHERE, SpaceKind.EUCLIDEAN, SpaceKind.DISC):
        return float(np.linalg.norm(p.payload - q.payload))
    if kind is SpaceKind.TORUS:
        return max(_circle_dist(a, b) for a, b in zip(p.payload, q.payload))
    if kind is SpaceKind.WEDGE_S2_S1:
        (bp, vp), (bq, vq) = p.payload, q.payload
        if bp != bq:
            return distance(p, q)
        if bp == "sphere":
            return float(np.linalg.norm(vp - vq))
        return _circle_dist(vp, vq)
    if kind is SpaceKind.DISCRETE:
        return 0.0 if p.payload == q.payload else 1.0
    raise SpaceError(f"unhandled kind {kind}")


def config_coordinate_error(c1: Configuration, c2: Configuration) -> float:
    if c1.space != c2.space or c1.k != c2.k:
        raise SpaceMismatchError("configurations are not comparable")
    return max(coordinate_error(p, q) for p, q in zip(c1.points, c2.points))


# ---------------------------------------------------------------------------
# Configurations


@dataclass(frozen=True, eq=False)
class Configuration:
    """An ordered tuple of pairwise-distinct points of one space."""

    space: SpaceDescriptor
    points: tuple[SpacePoint, ...]

    @property
    def k(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i: int) -> SpacePoint:
        return self.points[i]

    def __repr__(self) -> str:
        return f"Configuration({self.space.space_id}, k={self.k})"


def configuration(
    space: SpaceDescriptor,
    points: Iterable[SpacePoint],
    delta_sep: float = DELTA_SEP,
    validate: bool = True,
) -> Configuration:
    pts = tuple(points)
    if not pts:
        raise SpaceError("a configuration needs at least one point")
    for p in pts:
        if p.space != space:
            raise SpaceMismatchError(f"point on {p.space} in a {space} configuration")
    if validate:
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                # the coordinate metric is exact at zero, unlike arccos
                if coordinate_error(pts[i], pts[j]) <= delta_sep:
                    raise SpaceError(
                        f"points {i} and {j} coincide (separation <= {delta_sep})"
                    )
    return Configuration(space, pts)


def config_distance(c1: Configuration, c2: Configuration) -> float:
    """Sup-metric on configurations: max over slots of the point distance."""
    if c1.space != c2.space or c1.k != c2.k:
        raise SpaceMismatchError("configurations are not comparable")
    return max(distance(p, q) for p, q in zip(c1.points, c2.points))


def min_separation(cfg: Configuration) -> float:
    pts = cfg.points
    return min(
        0.0 if coordinate_error(pts[i], pts[j]) == 0.0 else distance(pts[i], pts[j])
        for i in range(len(pts))
        for j in range(i + 1, len(pts))
    )


def project(cfg: Configuration, r: int) -> Configuration:
    """Keep the first ``r`` points of a configuration."""
    if not 1 <= r <= cfg.k:
        raise SpaceError(f"projection rank r={r} out of range [1, {cfg.k}]")
    return Configuration(cfg.space, cfg.points[:r])


# ---------------------------------------------------------------------------
# Sampling


def sample(space: SpaceDescriptor, seed: int, n: int) -> list[SpacePoint]:
    """Draw ``n`` canonical points, deterministically in ``seed``.

    Spheres and tori are sampled uniformly (Gaussian-normalize, uniform
    angles); projective points push the sphere measure down the quotient;
    disc points are uniform in the ball; Euclidean points standard normal.
    """
    if n < 1:
        raise SpaceError("need n >= 1 samples")
    rng = np.random.default_rng(seed)
    kind = space.kind
    out: list[SpacePoint] = []
    if kind in (SpaceKind.SPHERE, SpaceKind.REAL_PROJECTIVE):
        dim = space.param + 1
        for _ in range(n):
            v = rng.normal(size=dim)
            while np.linalg.norm(v) < 1e-12:
                v = rng.normal(size=dim)
            out.append(point(space, v / np.linalg.norm(v)))
        return out
    if kind is SpaceKind.TORUS:
        for _ in range(n):
            out.append(point(space, rng.uniform(0.0, TWO_PI, size=space.param)))
        return out
    if kind is SpaceKind.EUCLIDEAN:
        for _ in range(n):
            out.append(point(space, rng.normal(size=space.param)))
        return out
    if kind is SpaceKind.DISC:
        m = space.param
        for _ in range(n):
            v = rng.normal(size=m)
            norm = np.linalg.norm(v)
            while norm < 1e-12:
                v = rng.normal(size=m)
                norm = np.linalg.norm(v)
            radius = rng.random() ** (1.0 / m)
            out.append(point(space, v / norm * radius))
        return out
    if kind is SpaceKind.WEDGE_S2_S1:
        # measure-proportional mix: sphere area 4pi vs circle length 2pi
        for _ in range(n):
            if rng.random() < 2.0 / 3.0:
                v = rng.normal(size=3)
                while np.linalg.norm(v) < 1e-12:
                    v = rng.normal(size=3)
                out.append(point(space, ("sphere", v / np.linalg.norm(v))))
            else:
                out.append(point(space, ("circle", rng.uniform(0.0, TWO_PI))))
        return out
    if kind is SpaceKind.DISCRETE:
        return [point(space, int(i)) for i in rng.integers(0, space.param, size=n)]
    raise SpaceError(f"unhandled kind {kind}")


def sample_configurations(
    space: SpaceDescriptor,
    k: int,
    seed: int,
    n: int,
    delta_sep: float = DELTA_SEP,
) -> list[Configuration]:
    """Draw ``n`` configurations in F(space, k) by rejection."""
    if space.kind is SpaceKind.DISCRETE and space.param < k:
        raise SpaceError(f"F({space}, {k}) is empty")
    rng_seed = seed
    out: list[Configuration] = []
    attempts = 0
    while len(out) < n:
        pts = sample(space, rng_seed, k)
        rng_seed += 1_000_003
        attempts += 1
        if attempts > 50 * n + 100:
            raise SpaceError("rejection sampling failed to find distinct tuples")
        try:
            out.append(configuration(space, pts, delta_sep=delta_sep))
        except SpaceError:
            continue
    return out


def perturb_point(p: SpacePoint, rng: np.random.Generator, scale: float) -> SpacePoint:
    """A nearby canonical point, roughly ``scale`` away (no-op on discrete)."""
    kind = p.space.kind
    if kind in (SpaceKind.SPHERE, SpaceKind.REAL_PROJECTIVE):
        v = p.payload + rng.normal(size=p.payload.shape) * scale
        return point(p.space, v / np.linalg.norm(v))
    if kind is SpaceKind.TORUS:
        return point(p.space, p.payload + rng.normal(size=p.payload.shape) * scale)
    if kind is SpaceKind.EUCLIDEAN:
        return point(p.space, p.payload + rng.normal(size=p.payload.shape) * scale)
    if kind is SpaceKind.DISC:
        v = p.payload + rng.normal(size=p.payload.shape) * scale
        norm = np.linalg.norm(v)
        if norm > 1.0:
            v = v / norm
        return point(p.space, v)
    if kind is SpaceKind.WEDGE_S2_S1:
        branch, value = p.payload
        if branch == "circle":
            return point(p.space, ("circle", value + rng.normal() * scale))
        v = value + rng.normal(size=3) * scale
        return point(p.space, ("sphere", v / np.linalg.norm(v)))
    if kind is SpaceKind.DISCRETE:
        return p
    raise SpaceError(f"unhandled kind {kind}")


# ---------------------------------------------------------------------------
# Geodesics


def _slerp(u: np.ndarray, v: np.ndarray, t: float) -> np.ndarray:
    dot = max(-1.0, min(1.0, float(np.dot(u, v))))
    omega = math.acos(dot)
    if omega < 1e-12:
        return u.copy()
    s = math.sin(omega)
    return (math.sin((1.0 - t) * omega) * u + math.sin(t * omega) * v) / s


def geodesic_point(p: SpacePoint, q: SpacePoint, t: float) -> SpacePoint:
    """Constant-speed point at parameter ``t`` on the unique shortest geodesic.

    Raises :class:`AmbiguousGeodesicError` on the cut locus (antipodal sphere
    points, projective lifts at angle pi/2, exactly-antipodal torus angles,
    distinct points of a discrete space).
    """
    if p.space != q.space:
        raise SpaceMismatchError(f"points on {p.space} and {q.space}")
    if not 0.0 <= t <= 1.0:
        raise SpaceError("geodesic parameter must lie in [0, 1]")
    kind = p.space.kind
    if kind is SpaceKind.SPHERE:
        dot = float(np.dot(p.payload, q.payload))
        if dot <= -1.0 + _ZERO_TOL:
            raise AmbiguousGeodesicError("antipodal sphere points")
        return point(p.space, _slerp(p.payload, q.payload, t))
    if kind is SpaceKind.REAL_PROJECTIVE:
        dot = float(np.dot(p.payload, q.payload))
        if abs(dot) <= _ZERO_TOL:
            raise AmbiguousGeodesicError("projective points at lift angle pi/2")
        rep = q.payload if dot > 0 else -q.payload
        return point(p.space, _slerp(p.payload, rep, t))
    if kind is SpaceKind.TORUS:
        deltas = []
        for a, b in zip(p.payload, q.payload):
            d = math.fmod(b - a + math.pi, TWO_PI)
            if d < 0:
                d += TWO_PI
            d -= math.pi  # shortest signed angular step in (-pi, pi]
            if abs(abs(d) - math.pi) <= _ZERO_TOL:
                raise AmbiguousGeodesicError("antipodal torus coordinate")
            deltas.append(d)
        return point(p.space, p.payload + t * np.array(deltas))
    if kind in (SpaceKind.EUCLIDEAN, SpaceKind.DISC):
        return point(p.space, (1.0 - t) * p.payload + t * q.payload)
    if kind is SpaceKind.WEDGE_S2_S1:
        return _wedge_geodesic(p, q, t)
    if kind is SpaceKind.DISCRETE:
        if p.payload != q.payload:
            raise AmbiguousGeodesicError("no path between distinct discrete points")
        return p
    raise SpaceError(f"unhandled kind {kind}")


def _circle_walk(a: float, b: float, t: float) -> float:
    d = math.fmod(b - a + math.pi, TWO_PI)
    if d < 0:
        d += TWO_PI
    d -= math.pi
    if abs(abs(d) - math.pi) <= _ZERO_TOL:
        raise AmbiguousGeodesicError("antipodal circle points")
    return a + t * d


def _wedge_geodesic(p: SpacePoint, q: SpacePoint, t: float) -> SpacePoint:
    space = p.space
    (bp, vp), (bq, vq) = p.payload, q.payload
    if bp == bq:
        if bp == "sphere":
            dot = float(np.dot(vp, vq))
            if dot <= -1.0 + _ZERO_TOL:
                raise AmbiguousGeodesicError("antipodal points on the sphere branch")
            return point(space, ("sphere", _slerp(vp, vq, t)))
        return point(space, ("circle", _circle_walk(vp, vq, t)))
    # cross-branch: run through the glue point at constant speed
    d1 = _wedge_to_base(p.payload)
    d2 = _wedge_to_base(q.payload)
    if bp == "sphere" and vp[0] <= -1.0 + _ZERO_TOL:
        raise AmbiguousGeodesicError("sphere-branch point antipodal to the glue point")
    if bq == "sphere" and vq[0] <= -1.0 + _ZERO_TOL:
        raise AmbiguousGeodesicError("sphere-branch point antipodal to the glue point")
    if bp == "circle" and abs(d1 - math.pi) <= _ZERO_TOL:
        raise AmbiguousGeodesicError("circle-branch point antipodal to the glue point")
    if bq == "circle" and abs(d2 - math.pi) <= _ZERO_TOL:
        raise AmbiguousGeodesicError("circle-branch point antipodal to the glue point")
    total = d1 + d2
    s = t * total
    if s <= d1:
        tau = 0.0 if d1 == 0.0 else s / d1
        if bp == "sphere":
            return point(space, ("sphere", _slerp(vp, WEDGE_BASE_SPHERE, tau)))
        return point(space, ("circle", _circle_walk(vp, 0.0, tau)))
    tau = 1.0 if d2 == 0.0 else (s - d1) / d2
    if bq == "sphere":
        return point(space, ("sphere", _slerp(WEDGE_BASE_SPHERE, vq, tau)))
    return point(space, ("circle", _circle_walk(0.0, vq, tau)))


# ---------------------------------------------------------------------------
# JSON encoding (schema: space.schema.json)


def point_to_json(p: SpacePoint) -> dict:
    if p.space.kind is SpaceKind.WEDGE_S2_S1:
        branch, value = p.payload
        coords: Any = {
            "branch": branch,
            "value": list(map(float, value)) if branch == "sphere" else float(value),
        }
    elif p.space.kind is SpaceKind.DISCRETE:
        coords = int(p.payload)
    else:
        coords = [float(x) for x in p.payload]
    return {"space": p.space.space_id, "coords": coords}


def point_from_json(data: dict) -> SpacePoint:
    space = parse_space(data["space"])
    coords = data["coords"]
    if space.kind is SpaceKind.WEDGE_S2_S1:
        return point(space, (coords["branch"], coords["value"]))
    return point(space, coords)


def configuration_to_json(cfg: Configuration) -> dict:
    return {
        "space": cfg.space.space_id,
        "points": [point_to_json(p)["coords"] for p in cfg.points],
    }


def configuration_from_json(data: dict) -> Configuration:
    space = parse_space(data["space"])
    pts = []
    for coords in data["points"]:
        if space.kind is SpaceKind.WEDGE_S2_S1:
            pts.append(point(space, (coords["branch"], coords["value"])))
        else:
            pts.append(point(space, coords))
    return configuration(space, pts)
