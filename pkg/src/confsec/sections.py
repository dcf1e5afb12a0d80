"""Explicit local sections of the coordinate projections and their verification.

A local section of the projection F(X,k) -> F(X,r) assigns to each base
configuration in an open region a full configuration extending it.  This
module builds the standard covers (k pieces from a fixed tuple of basepoints;
binomial-many pieces for general r), global sections from fixed-point-free
families and from the sphere antipodal pairing, and a sampling verifier that
checks coverage, exact right-inverse behavior, image separation, and a
Lipschitz-style continuity probe.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import geometry as geo
from . import selfmaps as sm
from .geometry import (
    DELTA_SEP,
    Configuration,
    SpaceDescriptor,
    SpaceKind,
    SpacePoint,
    config_distance,
    configuration,
    distance,
    min_separation,
    project,
)


class CoincidenceError(ValueError):
    """A family intended to be mutually non-coincident fails on a sample."""

    def __init__(self, message: str, witness: sm.NoncoincidenceWitness | None = None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class LocalSection:
    """A region predicate on F(X,r) together with a section map into F(X,k)."""

    space: SpaceDescriptor
    k: int
    r: int
    region: Callable[[Configuration], bool]
    mapping: Callable[[Configuration], Configuration]
    label: str
    region_desc: str = "full base"

    def __call__(self, base: Configuration) -> Configuration:
        return self.mapping(base)


@dataclass(frozen=True)
class SectionCover:
    space: SpaceDescriptor
    k: int
    r: int
    pieces: tuple[LocalSection, ...]
    claims_cover: bool = True
    label: str = ""
    # stress bases: configurations sitting exactly where individual pieces
    # stop covering (the construction basepoints); always included in the
    # verification sample so a missing piece is caught deterministically
    probe_bases: tuple[Configuration, ...] = ()


def default_basepoints(space: SpaceDescriptor, k: int, seed: int = 0) -> list[SpacePoint]:
    """k pairwise-distinct basepoints, drawn deterministically."""
    cfg = geo.sample_configurations(space, k, seed, 1)[0]
    return list(cfg.points)


def _check_basepoints(space: SpaceDescriptor, basepoints: Sequence[SpacePoint]) -> None:
    for p in basepoints:
        if p.space != space:
            raise geo.SpaceMismatchError("basepoint on the wrong space")
    for i in range(len(basepoints)):
        for j in range(i + 1, len(basepoints)):
            if distance(basepoints[i], basepoints[j]) <= DELTA_SEP:
                raise geo.SpaceError(f"basepoints {i} and {j} are not distinct")


def key_lemma_cover(
    space: SpaceDescriptor,
    k: int,
    basepoints: Sequence[SpacePoint] | None = None,
    seed: int = 0,
) -> SectionCover:
    """The k-piece cover of X with sections of F(X,k) -> X.

    Piece i keeps x away from every basepoint except the i-th and appends the
    remaining basepoints in order.
    """
    if not space.hausdorff:
        raise geo.SpaceError("open pieces of this form need a Hausdorff space")
    if k < 2:
        raise geo.SpaceError("need k >= 2")
    if basepoints is None:
        basepoints = default_basepoints(space, k, seed)
    basepoints = list(basepoints)
    if len(basepoints) != k:
        raise geo.SpaceError(f"need exactly {k} basepoints")
    _check_basepoints(space, basepoints)

    pieces = []
    for i in range(k):
        excluded = [basepoints[j] for j in range(k) if j != i]

        def region(base: Configuration, excluded=tuple(excluded)) -> bool:
            x = base.points[0]
            return all(distance(x, p) > 0.0 for p in excluded)

        def mapping(base: Configuration, excluded=tuple(excluded)) -> Configuration:
            return configuration(space, (base.points[0], *excluded))

        pieces.append(LocalSection(
            space, k, 1, region, mapping,
            label=f"key-lemma piece {i + 1}",
            region_desc=f"x away from basepoints {{{', '.join(str(j + 1) for j in range(k) if j != i)}}}",
        ))
    probes = tuple(configuration(space, (p,)) for p in basepoints)
    return SectionCover(space, k, 1, tuple(pieces), True,
                        f"key-lemma cover on {space}", probes)


def binomial_cover(
    space: SpaceDescriptor,
    k: int,
    r: int,
    basepoints: Sequence[SpacePoint] | None = None,
    seed: int = 0,
) -> SectionCover:
    """The C(k, r)-piece cover of F(X,r) indexed by r-subsets of the basepoints.

    The piece of subset I keeps the base r-tuple away from the complementary
    basepoints and appends those in increasing index order.
    """
    if not space.hausdorff:
        raise geo.SpaceError("open pieces of this form need a Hausdorff space")
    if not k > r >= 1:
        raise geo.SpaceError("need k > r >= 1")
    if basepoints is None:
        basepoints = default_basepoints(space, k, seed)
    basepoints = list(basepoints)
    if len(basepoints) != k:
        raise geo.SpaceError(f"need exactly {k} basepoints")
    _check_basepoints(space, basepoints)

    pieces = []
    for kept in itertools.combinations(range(k), r):
        complement = [basepoints[j] for j in range(k) if j not in kept]

        def region(base: Configuration, complement=tuple(complement)) -> bool:
            return all(
                distance(x, p) > 0.0 for x in base.points for p in complement
            )

        def mapping(base: Configuration, complement=tuple(complement)) -> Configuration:
            return configuration(space, (*base.points, *complement))

        pieces.append(LocalSection(
            space, k, r, region, mapping,
            label=f"binomial piece {{{', '.join(str(j + 1) for j in kept)}}}",
            region_desc="base tuple away from the complementary basepoints",
        ))
    probes = tuple(
        configuration(space, tuple(basepoints[j] for j in kept))
        for kept in itertools.combinations(range(k), r)
    )
    return SectionCover(space, k, r, tuple(pieces), True,
                        f"binomial cover on {space}, k={k}, r={r}", probes)


def from_fpf_family(
    fs: Sequence[sm.SelfMap],
    seed: int = 0,
    n: int = 2_000,
) -> LocalSection:
    """Global section x -> (x, f_2(x), ..., f_k(x)) from a fixed-point-free family.

    Requires the maps (together with the identity) to be mutually
    non-coincident; this is checked on a sample and a failing witness raises
    :class:`CoincidenceError`.
    """
    if not fs:
        raise CoincidenceError("need at least one map")
    space = fs[0].space
    family = [sm.SelfMap(space, sm.Identity()), *fs]
    ok, witness = sm.are_noncoincident(family, seed=seed, n=n)
    if not ok:
        i, j = witness.i, witness.j
        what = "identity" if i == 0 else f"map {i}"
        raise CoincidenceError(
            f"{what} and map {j} coincide at a sampled point "
            f"(separation {witness.separation:.3g})",
            witness,
        )
    k = len(fs) + 1

    def region(base: Configuration) -> bool:
        return True

    def mapping(base: Configuration) -> Configuration:
        x = base.points[0]
        return configuration(space, (x, *[sm.evaluate(f, x) for f in fs]))

    labels = ", ".join(f.recipe.name for f in fs)
    return LocalSection(space, k, 1, region, mapping,
                        label=f"global section from ({labels})")


def sphere_sigma(d: int) -> LocalSection:
    """The antipodal pairing x -> (x, -x), a global section for S^d."""
    if d < 1:
        raise geo.SpaceError("need d >= 1")
    space = geo.sphere(d)

    def mapping(base: Configuration) -> Configuration:
        x = base.points[0]
        return configuration(space, (x, geo.point(space, -x.payload)))

    return LocalSection(space, 2, 1, lambda base: True, mapping,
                        label=f"sigma on {space}")


def drop_points(s: LocalSection, m: int) -> LocalSection:
    """Truncate a section of F(X,k) -> X to a section of F(X,m) -> X."""
    if s.r != 1:
        raise geo.SpaceError("dropping points applies to sections over X itself")
    if m < 1:
        raise geo.SpaceError("need m >= 1")
    if m > s.k:
        raise geo.SpaceError(f"cannot extend a section of k={s.k} to m={m}")

    def mapping(base: Configuration) -> Configuration:
        return project(s.mapping(base), m)

    return LocalSection(s.space, m, 1, s.region, mapping,
                        label=f"{s.label}, truncated to k={m}",
                        region_desc=s.region_desc)


# ---------------------------------------------------------------------------
# Verification


@dataclass
class PieceReport:
    label: str
    in_region: int
    max_identity_error: float
    min_image_separation: float
    max_continuity_ratio: float | None
    continuity_pairs: int


@dataclass
class CoverReport:
    label: str
    space_id: str
    k: int
    r: int
    samples: int
    seed: int
    coverage_fraction: float
    max_identity_error: float
    min_image_separation: float
    max_continuity_ratio: float | None
    pieces: list[PieceReport]
    coverage_ok: bool
    identity_ok: bool
    separation_ok: bool
    continuity_ok: bool
    passed: bool

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "space": self.space_id,
            "k": self.k,
            "r": self.r,
            "samples": self.samples,
            "seed": self.seed,
            "coverage_fraction": self.coverage_fraction,
            "max_identity_error": self.max_identity_error,
            "min_image_separation": self.min_image_separation,
            "max_continuity_ratio": self.max_continuity_ratio,
            "checks": {
                "coverage": self.coverage_ok,
                "identity": self.identity_ok,
                "separation": self.separation_ok,
                "continuity": self.continuity_ok,
            },
            "passed": self.passed,
            "pieces": [
                {
                    "label": p.label,
                    "in_region": p.in_region,
                    "max_identity_error": p.max_identity_error,
                    "min_image_separation": p.min_image_separation,
                    "max_continuity_ratio": p.max_continuity_ratio,
                    "continuity_pairs": p.continuity_pairs,
                }
                for p in self.pieces
            ],
        }


IDENTITY_TOL = 1e-12
CONTINUITY_RATIO_MAX = 100.0
PROBE_SCALE = 1e-4
PROBE_MAX_INPUT = 1e-3


def _as_cover(target: SectionCover | LocalSection) -> SectionCover:
    if isinstance(target, SectionCover):
        return target
    return SectionCover(target.space, target.k, target.r, (target,), True, target.label)


def verify_cover(
    target: SectionCover | LocalSection,
    seed: int = 0,
    n: int = 10_000,
    continuity_pairs_per_piece: int = 300,
    delta_sep: float = DELTA_SEP,
) -> CoverReport:
    """Sample-based certification of a cover (or a single section).

    Checks: every sampled base configuration lies in some region (when the
    cover claims to be one); projecting the section output returns the input
    exactly; section images stay pairwise separated; and outputs move at most
    ``CONTINUITY_RATIO_MAX`` times as fast as nearby in-region inputs.
    """
    cover = _as_cover(target)
    rng = np.random.default_rng(seed ^ 0x5EC7)
    bases = geo.sample_configurations(cover.space, cover.r, seed, n)
    bases.extend(cover.probe_bases)

    covered = 0
    piece_samples: list[list[Configuration]] = [[] for _ in cover.pieces]
    for base in bases:
        hit = False
        for idx, piece in enumerate(cover.pieces):
            if piece.region(base):
                piece_samples[idx].append(base)
                hit = True
        if hit:
            covered += 1
    coverage = covered / len(bases)

    reports: list[PieceReport] = []
    max_identity = 0.0
    min_sep = math.inf
    max_ratio: float | None = None
    for piece, in_region in zip(cover.pieces, piece_samples):
        p_identity = 0.0
        p_sep = math.inf
        p_ratio: float | None = None
        pairs = 0
        for base in in_region:
            try:
                image = piece.mapping(base)
            except geo.SpaceError:
                p_sep = 0.0  # image collapsed two points: a separation failure
                continue
            p_identity = max(
                p_identity,
                geo.config_coordinate_error(project(image, cover.r), base),
            )
            p_sep = min(p_sep, min_separation(image))
        for base in in_region[:continuity_pairs_per_piece]:
            nearby_pts = [geo.perturb_point(p, rng, PROBE_SCALE) for p in base.points]
            try:
                nearby = configuration(cover.space, nearby_pts, delta_sep=delta_sep)
            except geo.SpaceError:
                continue
            if not piece.region(nearby):
                continue
            din = config_distance(base, nearby)
            if din == 0.0 or din > PROBE_MAX_INPUT:
                continue
            dout = config_distance(piece.mapping(base), piece.mapping(nearby))
            ratio = dout / din
            pairs += 1
            p_ratio = ratio if p_ratio is None else max(p_ratio, ratio)
        reports.append(PieceReport(piece.label, len(in_region), p_identity,
                                   p_sep if in_region else math.inf, p_ratio, pairs))
        max_identity = max(max_identity, p_identity)
        if in_region:
            min_sep = min(min_sep, p_sep)
        if p_ratio is not None:
            max_ratio = p_ratio if max_ratio is None else max(max_ratio, p_ratio)

    coverage_ok = (coverage == 1.0) if cover.claims_cover else True
    identity_ok = max_identity <= IDENTITY_TOL
    separation_ok = min_sep > delta_sep
    continuity_ok = max_ratio is None or max_ratio <= CONTINUITY_RATIO_MAX
    return CoverReport(
        label=cover.label,
        space_id=cover.space.space_id,
        k=cover.k,
        r=cover.r,
        samples=n,
        seed=seed,
        coverage_fraction=coverage,
        max_identity_error=max_identity,
        min_image_separation=min_sep,
        max_continuity_ratio=max_ratio,
        pieces=reports,
        coverage_ok=coverage_ok,
        identity_ok=identity_ok,
        separation_ok=separation_ok,
        continuity_ok=continuity_ok,
        passed=coverage_ok and identity_ok and separation_ok and continuity_ok,
    )


# ---------------------------------------------------------------------------
# FPP verdict


@dataclass(frozen=True)
class FppVerdict:
    space_id: str
    fpp: str  # "yes" | "no" | "unknown"
    sec21: float | None  # 1, 2, math.inf, or None when unknown
    witness: str | None
    theorem_applicable: bool
    provenance: str

    def to_json(self) -> dict:
        sec: int | str | None
        if self.sec21 is None:
            sec = None
        elif math.isinf(self.sec21):
            sec = "infinite"
        else:
            sec = int(self.sec21)
        return {
            "space": self.space_id,
            "fpp": self.fpp,
            "sec21": sec,
            "witness": self.witness,
            "theorem_applicable": self.theorem_applicable,
            "provenance": self.provenance,
        }


def fpp_verdict(space: SpaceDescriptor) -> FppVerdict:
    """Decide the fixed-point property of a model space.

    A catalog fixed-point-free map forces sec = 1 (its graph is a global
    section of the pair projection); a stored FPP axiom forces sec = 2.
    Absence of a catalog map is never treated as evidence for FPP.
    """
    from . import bounds  # local import: bounds has no geometry dependency cycle

    if not space.hausdorff:
        raise geo.SpaceError("the characterization requires a Hausdorff space")
    if space.kind is SpaceKind.DISCRETE and space.param == 1:
        return FppVerdict(space.space_id, "yes", math.inf, None, False,
                          "singleton: every self-map fixes the point; the pair "
                          "configuration space is empty")

    fpf = sm.fixed_point_free_maps(space)
    if fpf:
        f = fpf[0]
        section = from_fpf_family([f])
        return FppVerdict(space.space_id, "no", 1,
                          f"{f.recipe.name} (section: {section.label})", True,
                          "catalog fixed-point-free map")

    attrs = bounds.preset_attributes(space.space_id)
    fpp_attr = attrs.get("FPP")
    if fpp_attr is True:
        return FppVerdict(space.space_id, "yes", 2, None, True,
                          "stored FPP axiom for this space")
    if fpp_attr is False:
        return FppVerdict(space.space_id, "no", 1, "axiom: no fixed-point property",
                          True, "stored axiom (no explicit catalog map)")
    return FppVerdict(space.space_id, "unknown", None, None, True,
                      "no catalog map and no stored axiom")
