"""Catalog of named self-maps and numerical fixed-point diagnostics.

Every catalog recipe is a concrete continuous self-map of one of the model
spaces.  The interesting entries are fixed-point free: the antipodal map on
spheres, the coordinate-pair rotation on odd projective spaces, translations
on groups, the shift on the wedge, and short-time flows of a non-vanishing
vector field on odd spheres.  ``fixed_point_gap`` certifies freeness on a
sample; ``degree`` computes mapping degrees on S^1 (winding) and S^2
(signed preimage count over a regular value).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import geometry as geo
from .geometry import (
    DELTA_SEP,
    Configuration,
    SpaceDescriptor,
    SpaceKind,
    SpacePoint,
    distance,
    point,
)

TWO_PI = geo.TWO_PI


class RecipeError(ValueError):
    """Recipe incompatible with its space, or malformed parameters."""


class UnsupportedRecipeError(RecipeError):
    """Catalog entry that is listed but intentionally not implemented."""


class DegenerateRegularValueError(RuntimeError):
    """Degree computation failed to isolate preimages of any probed value."""


# ---------------------------------------------------------------------------
# Recipes


@dataclass(frozen=True)
class Antipodal:
    name = "antipodal"


@dataclass(frozen=True)
class RPOddRotation:
    """[x1:y1:...] -> [-y1:x1:...], fixed-point free on RP^{2n+1}."""

    name = "rp_odd_rotation"


@dataclass(frozen=True)
class GroupTranslation:
    """x -> g1 * x on a group model (torus, S^1 or Z/n), g1 != identity."""

    g1: SpacePoint
    name = "group_translation"


@dataclass(frozen=True)
class WedgeShift:
    """Sphere branch lands on the circle via the path gamma; circle branch flips.

    gamma(s) is the circle point at angle pi*(s+1)/2, so gamma(-1) is the glue
    point and gamma(1) is its antipode; the two branch formulas agree there.
    """

    name = "wedge_shift"


@dataclass(frozen=True)
class VectorFieldFlow:
    """Time-epsilon flow of the coordinate-pair rotation field on an odd sphere."""

    epsilon: float
    field: str = "pair_rotation"
    name = "vector_field_flow"


@dataclass(frozen=True)
class Identity:
    name = "identity"


@dataclass(frozen=True)
class Composite:
    parts: tuple  # inner recipes, applied left to right
    name = "composite"


Recipe = Antipodal | RPOddRotation | GroupTranslation | WedgeShift | VectorFieldFlow | Identity | Composite


@dataclass(frozen=True)
class SelfMap:
    space: SpaceDescriptor
    recipe: Recipe

    def __post_init__(self) -> None:
        _validate(self.space, self.recipe)

    @property
    def label(self) -> str:
        return f"{self.recipe.name} on {self.space.space_id}"


def _is_group_space(space: SpaceDescriptor) -> bool:
    return space.kind in (SpaceKind.TORUS, SpaceKind.DISCRETE) or (
        space.kind is SpaceKind.SPHERE and space.param == 1
    )


def _group_identity(space: SpaceDescriptor) -> SpacePoint:
    if space.kind is SpaceKind.TORUS:
        return point(space, np.zeros(space.param))
    if space.kind is SpaceKind.SPHERE:
        return geo.circle_point(0.0)
    return point(space, 0)


def _validate(space: SpaceDescriptor, recipe: Recipe) -> None:
    if isinstance(recipe, Antipodal):
        if space.kind is not SpaceKind.SPHERE:
            raise RecipeError("antipodal map lives on spheres")
    elif isinstance(recipe, RPOddRotation):
        if space.kind is not SpaceKind.REAL_PROJECTIVE or space.param % 2 == 0:
            raise RecipeError("coordinate-pair rotation needs RP^d with d odd")
    elif isinstance(recipe, GroupTranslation):
        if not _is_group_space(space):
            raise RecipeError("group translation needs a torus, S1 or discrete group")
        if recipe.g1.space != space:
            raise RecipeError("translation element lives on the wrong space")
        if distance(recipe.g1, _group_identity(space)) <= DELTA_SEP:
            raise RecipeError("translation element must differ from the identity")
    elif isinstance(recipe, WedgeShift):
        if space.kind is not SpaceKind.WEDGE_S2_S1:
            raise RecipeError("the shift lives on the wedge")
    elif isinstance(recipe, VectorFieldFlow):
        if space.kind is not SpaceKind.SPHERE or space.param % 2 == 0:
            raise RecipeError("the pair-rotation field needs an odd sphere")
        if not 0.0 < recipe.epsilon < math.pi:
            raise RecipeError("flow time must lie in (0, pi)")
        if recipe.field != "pair_rotation":
            raise RecipeError(f"unknown field {recipe.field!r}")
    elif isinstance(recipe, Composite):
        if not recipe.parts:
            raise RecipeError("empty composite")
        for part in recipe.parts:
            _validate(space, part)
    elif isinstance(recipe, Identity):
        pass
    else:
        raise RecipeError(f"unknown recipe {recipe!r}")


def _pair_rotation_matrix(n: int) -> np.ndarray:
    """Block-diagonal (0,-1;1,0) acting on consecutive coordinate pairs."""
    if n % 2 != 0:
        raise RecipeError("pair rotation needs an even ambient dimension")
    J = np.zeros((n, n))
    for i in range(0, n, 2):
        J[i, i + 1] = -1.0
        J[i + 1, i] = 1.0
    return J


def wedge_gamma(s: float) -> SpacePoint:
    """The wedge circle point gamma(s) at angle pi*(s+1)/2, for s in [-1, 1]."""
    if not -1.0 <= s <= 1.0:
        raise RecipeError("gamma is parametrized over [-1, 1]")
    return geo.wedge_circle_point(math.pi * (s + 1.0) / 2.0)


# ---------------------------------------------------------------------------
# Evaluation


def evaluate(f: SelfMap, p: SpacePoint) -> SpacePoint:
    if p.space != f.space:
        raise RecipeError(f"point on {p.space}, map on {f.space}")
    return _eval_recipe(f.space, f.recipe, p)


def _eval_recipe(space: SpaceDescriptor, recipe: Recipe, p: SpacePoint) -> SpacePoint:
    if isinstance(recipe, Identity):
        return p
    if isinstance(recipe, Antipodal):
        return point(space, -p.payload)
    if isinstance(recipe, RPOddRotation):
        J = _pair_rotation_matrix(space.param + 1)
        return point(space, J @ p.payload)
    if isinstance(recipe, GroupTranslation):
        g = recipe.g1
        if space.kind is SpaceKind.TORUS:
            return point(space, p.payload + g.payload)
        if space.kind is SpaceKind.SPHERE:
            theta = geo.circle_angle(g)
            return geo.circle_point(geo.circle_angle(p) + theta)
        return point(space, (p.payload + g.payload) % space.param)
    if isinstance(recipe, WedgeShift):
        branch, value = p.payload
        if branch == "circle":
            return geo.wedge_circle_point(value + math.pi)
        return wedge_gamma(float(value[0]))
    if isinstance(recipe, VectorFieldFlow):
        J = _pair_rotation_matrix(space.param + 1)
        eps = recipe.epsilon
        return point(space, math.cos(eps) * p.payload + math.sin(eps) * (J @ p.payload))
    if isinstance(recipe, Composite):
        q = p
        for part in recipe.parts:
            q = _eval_recipe(space, part, q)
        return q
    raise RecipeError(f"unknown recipe {recipe!r}")


def _linear_matrix(space: SpaceDescriptor, recipe: Recipe) -> np.ndarray | None:
    """Orthogonal matrix realizing the recipe on a sphere model, if linear."""
    if space.kind is not SpaceKind.SPHERE:
        return None
    n = space.param + 1
    if isinstance(recipe, Identity):
        return np.eye(n)
    if isinstance(recipe, Antipodal):
        return -np.eye(n)
    if isinstance(recipe, VectorFieldFlow):
        J = _pair_rotation_matrix(n)
        return math.cos(recipe.epsilon) * np.eye(n) + math.sin(recipe.epsilon) * J
    if isinstance(recipe, GroupTranslation) and space.param == 1:
        theta = geo.circle_angle(recipe.g1)
        c, s = math.cos(theta), math.sin(theta)
        return np.array([[c, -s], [s, c]])
    if isinstance(recipe, Composite):
        M = np.eye(n)
        for part in recipe.parts:
            Mp = _linear_matrix(space, part)
            if Mp is None:
                return None
            M = Mp @ M
        return M
    return None


def evaluate_many(f: SelfMap, pts: np.ndarray) -> np.ndarray:
    """Apply ``f`` to an (n, dim) array of sphere coordinates.

    Falls back to a per-point loop when no linear realization exists.
    """
    M = _linear_matrix(f.space, f.recipe)
    if M is not None:
        out = pts @ M.T
        return out / np.linalg.norm(out, axis=1, keepdims=True)
    rows = []
    for row in pts:
        rows.append(evaluate(f, point(f.space, row)).payload)
    return np.array(rows)


# ---------------------------------------------------------------------------
# Fixed-point gap and non-coincidence


def fixed_point_gap(f: SelfMap, seed: int = 0, n: int = 10_000) -> float:
    """min over ``n`` sampled points p of distance(p, f(p))."""
    if n < 1:
        raise RecipeError("need n >= 1 samples")
    pts = geo.sample(f.space, seed, n)
    return min(distance(p, evaluate(f, p)) for p in pts)


@dataclass(frozen=True)
class NoncoincidenceWitness:
    point: SpacePoint
    i: int
    j: int
    separation: float
    seed: int


def are_noncoincident(
    fs: Sequence[SelfMap],
    seed: int = 0,
    n: int = 10_000,
    delta_sep: float = DELTA_SEP,
) -> tuple[bool, NoncoincidenceWitness]:
    """Sampled check that f_i(x) != f_j(x) for all pairs i < j.

    Returns the verdict together with the minimizing witness (x, i, j).
    The check is numerical evidence on the sample, not a proof.
    """
    if not fs:
        raise RecipeError("need at least one map")
    space = fs[0].space
    for f in fs:
        if f.space != space:
            raise RecipeError("all maps must share one space")
    pts = geo.sample(space, seed, n)
    best: NoncoincidenceWitness | None = None
    for x in pts:
        images = [evaluate(f, x) for f in fs]
        for i in range(len(fs)):
            for j in range(i + 1, len(fs)):
                sep = distance(images[i], images[j])
                if best is None or sep < best.separation:
                    best = NoncoincidenceWitness(x, i, j, sep, seed)
    assert best is not None
    return best.separation > delta_sep, best


# ---------------------------------------------------------------------------
# Mapping degree


def degree(f: SelfMap, grid: int | None = None) -> int:
    """Mapping degree of a self-map of S^1 or S^2.

    S^1 uses lifted-angle accumulation around a fine loop; S^2 counts signed
    preimages of a regular value located by a grid scan plus Gauss-Newton
    refinement.  Higher-dimensional spheres are out of scope.
    """
    if f.space.kind is not SpaceKind.SPHERE:
        raise RecipeError("degree is defined here for sphere self-maps")
    if f.space.param == 1:
        return _winding_number(f)
    if f.space.param == 2:
        return _degree_s2(f, grid=grid or 1_000_000)
    raise RecipeError("degree computation supports S1 and S2 only")


def _winding_number(f: SelfMap, n: int = 8192) -> int:
    for attempt in range(4):
        thetas = np.linspace(0.0, TWO_PI, n, endpoint=False)
        pts = np.column_stack([np.cos(thetas), np.sin(thetas)])
        images = evaluate_many(f, pts)
        angles = np.arctan2(images[:, 1], images[:, 0])
        steps = np.diff(np.concatenate([angles, angles[:1]]))
        steps = np.mod(steps + math.pi, TWO_PI) - math.pi
        if np.max(np.abs(steps)) < math.pi / 2:
            total = float(np.sum(steps))
            w = total / TWO_PI
            if abs(w - round(w)) > 0.01:
                raise DegenerateRegularValueError("winding sum far from an integer")
            return int(round(w))
        n *= 4
    raise DegenerateRegularValueError("loop refinement failed to control angle steps")


def _tangent_frame(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Right-handed orthonormal frame (u1, u2) with det[u1, u2, v] = +1."""
    a = np.array([1.0, 0.0, 0.0])
    if abs(np.dot(a, v)) > 0.9:
        a = np.array([0.0, 1.0, 0.0])
    u1 = np.cross(a, v)
    u1 = u1 / np.linalg.norm(u1)
    u2 = np.cross(v, u1)
    return u1, u2


def _fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n, dtype=float) + 0.5
    phi = math.pi * (1.0 + math.sqrt(5.0)) * i
    z = 1.0 - 2.0 * i / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def _degree_s2(f: SelfMap, grid: int) -> int:
    space = f.space
    rng = np.random.default_rng(20240 + grid % 97)
    base = _fibonacci_sphere(grid)
    images = evaluate_many(f, base)
    spacing = 2.0 * math.sqrt(4.0 * math.pi / grid)

    for _ in range(8):
        y = rng.normal(size=3)
        y = y / np.linalg.norm(y)
        close = np.where(np.linalg.norm(images - y, axis=1) < 4.0 * spacing)[0]
        if close.size == 0:
            continue  # y may still be hit; scan again with another value
        roots = _refine_preimages(f, base[close], y)
        if roots is None:
            continue
        signs = []
        ok = True
        for x in roots:
            s = _jacobian_sign(f, x, y)
            if s == 0:
                ok = False
                break
            signs.append(s)
        if ok:
            return int(sum(signs))
    raise DegenerateRegularValueError("no probed value admitted isolated regular preimages")


def _refine_preimages(f: SelfMap, seeds: np.ndarray, y: np.ndarray) -> list[np.ndarray] | None:
    roots: list[np.ndarray] = []
    for x0 in seeds:
        x = _gauss_newton_root(f, x0, y)
        if x is None:
            continue
        if any(np.linalg.norm(x - r) < 1e-5 for r in roots):
            continue
        roots.append(x)
    if not roots:
        return None
    # reject clusters that failed to separate
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if np.linalg.norm(roots[i] - roots[j]) < 1e-4:
                return None
    return roots


def _gauss_newton_root(f: SelfMap, x0: np.ndarray, y: np.ndarray) -> np.ndarray | None:
    x = x0.copy()
    h = 1e-6
    for _ in range(60):
        fx = evaluate_many(f, x[None, :])[0]
        res = fx - y
        if np.linalg.norm(res) < 1e-12:
            return x
        u1, u2 = _tangent_frame(x)
        cols = []
        for u in (u1, u2):
            xp = x + h * u
            xm = x - h * u
            xp /= np.linalg.norm(xp)
            xm /= np.linalg.norm(xm)
            fp, fm = evaluate_many(f, np.array([xp, xm]))
            cols.append((fp - fm) / (2.0 * h))
        Jm = np.column_stack(cols)  # 3 x 2
        try:
            step, *_ = np.linalg.lstsq(Jm, -res, rcond=None)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(step)) or np.linalg.norm(step) > 1.0:
            step = step / max(1.0, np.linalg.norm(step))
        x = x + step[0] * u1 + step[1] * u2
        x = x / np.linalg.norm(x)
    fx = evaluate_many(f, x[None, :])[0]
    if np.linalg.norm(fx - y) < 1e-9:
        return x
    return None


def _jacobian_sign(f: SelfMap, x: np.ndarray, y: np.ndarray) -> int:
    h = 1e-6
    u1, u2 = _tangent_frame(x)
    w1, w2 = _tangent_frame(y)
    M = np.zeros((2, 2))
    for j, u in enumerate((u1, u2)):
        xp = (x + h * u) / np.linalg.norm(x + h * u)
        xm = (x - h * u) / np.linalg.norm(x - h * u)
        fp, fm = evaluate_many(f, np.array([xp, xm]))
        d = (fp - fm) / (2.0 * h)
        M[0, j] = np.dot(d, w1)
        M[1, j] = np.dot(d, w2)
    det = float(np.linalg.det(M))
    if abs(det) < 1e-4:
        return 0
    return 1 if det > 0 else -1


# ---------------------------------------------------------------------------
# Catalog


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    space: SpaceDescriptor
    selfmap: SelfMap | None
    fixed_point_free: bool | None
    status: str  # "ok" or "unsupported"
    note: str = ""


def default_translation(space: SpaceDescriptor) -> SelfMap:
    """A canonical fixed-point-free translation on a group model."""
    if space.kind is SpaceKind.TORUS:
        g1 = point(space, np.full(space.param, math.pi))
    elif space.kind is SpaceKind.SPHERE and space.param == 1:
        g1 = geo.circle_point(math.pi)
    elif space.kind is SpaceKind.DISCRETE:
        if space.param < 2:
            raise RecipeError("translation on a singleton is the identity")
        g1 = point(space, 1)
    else:
        raise RecipeError("no group structure on this space")
    return SelfMap(space, GroupTranslation(g1))


def catalog(space: SpaceDescriptor | None = None) -> list[CatalogEntry]:
    """All catalog entries, optionally restricted to one space."""
    entries: list[CatalogEntry] = []

    def fits(s: SpaceDescriptor) -> bool:
        return space is None or s == space

    spaces: list[SpaceDescriptor] = []
    if space is not None:
        spaces = [space]
    else:
        spaces = [
            geo.sphere(1), geo.sphere(2), geo.sphere(3),
            geo.real_projective(2), geo.real_projective(3),
            geo.torus(2), geo.wedge_s2_s1(), geo.discrete(4),
        ]

    for s in spaces:
        if not fits(s):
            continue
        entries.append(CatalogEntry("identity", s, SelfMap(s, Identity()), False, "ok",
                                    "every point is fixed"))
        if s.kind is SpaceKind.SPHERE:
            entries.append(CatalogEntry("antipodal", s, SelfMap(s, Antipodal()), True, "ok"))
            if s.param % 2 == 1:
                entries.append(CatalogEntry(
                    "vector_field_flow", s,
                    SelfMap(s, VectorFieldFlow(epsilon=math.pi / 2)), True, "ok",
                    "flow of the coordinate-pair rotation field"))
        if s.kind is SpaceKind.REAL_PROJECTIVE:
            if s.param % 2 == 1:
                entries.append(CatalogEntry(
                    "rp_odd_rotation", s, SelfMap(s, RPOddRotation()), True, "ok"))
            entries.append(CatalogEntry(
                "cp_odd_rotation", s, None, None, "unsupported",
                "complex projective analogue not implemented"))
            entries.append(CatalogEntry(
                "hp_odd_rotation", s, None, None, "unsupported",
                "quaternionic projective analogue not implemented"))
        if _is_group_space(s) and not (s.kind is SpaceKind.DISCRETE and s.param < 2):
            entries.append(CatalogEntry(
                "group_translation", s, default_translation(s), True, "ok"))
        if s.kind is SpaceKind.WEDGE_S2_S1:
            entries.append(CatalogEntry("wedge_shift", s, SelfMap(s, WedgeShift()), True, "ok"))
    return entries


def fixed_point_free_maps(space: SpaceDescriptor) -> list[SelfMap]:
    """Catalog fixed-point-free maps available on ``space``."""
    return [e.selfmap for e in catalog(space)
            if e.status == "ok" and e.fixed_point_free and e.selfmap is not None]


# ---------------------------------------------------------------------------
# JSON recipes


def selfmap_to_json(f: SelfMap) -> dict:
    data: dict = {"space": f.space.space_id, "recipe": f.recipe.name}
    if isinstance(f.recipe, GroupTranslation):
        data["g1"] = geo.point_to_json(f.recipe.g1)["coords"]
    if isinstance(f.recipe, VectorFieldFlow):
        data["epsilon"] = f.recipe.epsilon
        data["field"] = f.recipe.field
    if isinstance(f.recipe, Composite):
        data["parts"] = [selfmap_to_json(SelfMap(f.space, p))["recipe"] for p in f.recipe.parts]
    return data


def selfmap_from_json(data: dict) -> SelfMap:
    space = geo.parse_space(data["space"])
    name = data["recipe"]
    if name == "antipodal":
        return SelfMap(space, Antipodal())
    if name == "rp_odd_rotation":
        return SelfMap(space, RPOddRotation())
    if name == "identity":
        return SelfMap(space, Identity())
    if name == "wedge_shift":
        return SelfMap(space, WedgeShift())
    if name == "group_translation":
        if "g1" not in data:
            return default_translation(space)
        if space.kind is SpaceKind.WEDGE_S2_S1:
            raise RecipeError("no group structure on the wedge")
        return SelfMap(space, GroupTranslation(point(space, data["g1"])))
    if name == "vector_field_flow":
        return SelfMap(space, VectorFieldFlow(
            epsilon=float(data.get("epsilon", math.pi / 2)),
            field=data.get("field", "pair_rotation")))
    if name in ("cp_odd_rotation", "hp_odd_rotation"):
        raise UnsupportedRecipeError(f"{name} is catalogued but not implemented")
    raise RecipeError(f"unknown recipe name {name!r}")
