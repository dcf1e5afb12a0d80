"""Exhaustive ground truth on finite topological spaces.

A finite topological space is a preorder; restricting to T0 spaces gives a
poset, with open sets the up-sets (Alexandrov topology) and continuous maps
exactly the monotone ones.  On this class everything is decidable by search:
whether every continuous self-map has a fixed point, the two-point
configuration space, the minimal number of open pieces admitting local
sections of the pair projection, homotopy of maps (zig-zags of pointwise
comparable maps), and minimal root counts over a homotopy class.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np


class PosetError(ValueError):
    """Relation is not a partial order, or data is malformed."""


class SearchBudgetExceeded(RuntimeError):
    """An enumeration passed the configured node budget."""


DEFAULT_BUDGET = 100_000_000


class FinitePoset:
    """Immutable finite poset on elements 0..n-1; ``leq[i, j]`` iff i <= j."""

    def __init__(self, leq: np.ndarray):
        leq = np.array(leq, dtype=bool)
        n = leq.shape[0]
        if leq.shape != (n, n):
            raise PosetError(f"leq must be square, got {leq.shape}")
        if not leq[np.diag_indices(n)].all():
            raise PosetError("relation is not reflexive")
        if (leq & leq.T).sum() > n:
            raise PosetError("relation is not antisymmetric")
        if ((leq @ leq) & ~leq).any():
            raise PosetError("relation is not transitive")
        leq.flags.writeable = False
        self.n = n
        self.leq = leq

    # -- constructors

    @classmethod
    def from_relations(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "FinitePoset":
        """Build from generating relations; the reflexive-transitive closure is taken."""
        if n < 1:
            raise PosetError("need n >= 1")
        leq = np.eye(n, dtype=bool)
        for i, j in pairs:
            if not (0 <= i < n and 0 <= j < n):
                raise PosetError(f"relation ({i}, {j}) out of range")
            leq[i, j] = True
        for k in range(n):
            leq |= np.outer(leq[:, k], leq[k, :])
        return cls(leq)

    @classmethod
    def chain(cls, n: int) -> "FinitePoset":
        return cls.from_relations(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def antichain(cls, n: int) -> "FinitePoset":
        return cls.from_relations(n, [])

    @classmethod
    def from_json(cls, data: dict) -> "FinitePoset":
        return cls.from_relations(int(data["n"]), [tuple(p) for p in data.get("leq", [])])

    def to_json(self) -> dict:
        pairs = [[int(i), int(j)] for i in range(self.n) for j in range(self.n)
                 if i != j and self.leq[i, j]]
        return {"n": self.n, "leq": pairs}

    # -- basic structure

    def less_equal(self, i: int, j: int) -> bool:
        return bool(self.leq[i, j])

    def comparable(self, i: int, j: int) -> bool:
        return bool(self.leq[i, j] or self.leq[j, i])

    def topo_order(self) -> list[int]:
        """Elements sorted so that smaller elements come first."""
        return sorted(range(self.n), key=lambda i: int(self.leq[:, i].sum()))

    def up_sets(self) -> list[tuple[int, ...]]:
        """All up-sets (open sets), including the empty one."""
        if self.n > 16:
            raise SearchBudgetExceeded("up-set enumeration beyond n = 16")
        out = []
        for mask in range(1 << self.n):
            members = [i for i in range(self.n) if mask >> i & 1]
            ok = all(
                self.leq[i, j] <= (mask >> j & 1)
                for i in members
                for j in range(self.n)
                if self.leq[i, j]
            )
            if ok:
                out.append(tuple(members))
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, FinitePoset) and self.n == other.n and bool(
            (self.leq == other.leq).all()
        )

    def __hash__(self) -> int:
        return hash((self.n, self.leq.tobytes()))

    def __repr__(self) -> str:
        pairs = [(i, j) for i in range(self.n) for j in range(self.n)
                 if i != j and self.leq[i, j]]
        return f"FinitePoset(n={self.n}, lt={pairs})"


@dataclass(frozen=True)
class PosetMap:
    """A monotone (= continuous) map between finite posets."""

    domain: FinitePoset
    codomain: FinitePoset
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.values) != self.domain.n:
            raise PosetError("value table has the wrong length")
        for v in self.values:
            if not 0 <= v < self.codomain.n:
                raise PosetError(f"value {v} out of range")
        for i in range(self.domain.n):
            for j in range(self.domain.n):
                if self.domain.leq[i, j] and not self.codomain.leq[self.values[i], self.values[j]]:
                    raise PosetError(f"not monotone at ({i}, {j})")

    def __call__(self, i: int) -> int:
        return self.values[i]

    @property
    def is_selfmap(self) -> bool:
        return self.domain == self.codomain


class _Budget:
    __slots__ = ("left",)

    def __init__(self, budget: int):
        self.left = budget

    def spend(self, amount: int = 1) -> None:
        self.left -= amount
        if self.left < 0:
            raise SearchBudgetExceeded("search budget exhausted")


def _monotone_maps(
    domain: FinitePoset,
    codomain: FinitePoset,
    budget: _Budget,
    domain_elements: Sequence[int] | None = None,
    forbid_fixed: bool = False,
    lower: Sequence[int] | None = None,
    upper: Sequence[int] | None = None,
) -> Iterator[dict[int, int]]:
    """Backtracking enumeration of monotone maps as dicts on ``domain_elements``.

    ``forbid_fixed`` rejects f(x) = x (used for sections); ``lower``/``upper``
    restrict values pointwise (used for homotopy zig-zag neighbors).
    """
    elements = list(domain_elements) if domain_elements is not None else list(range(domain.n))
    elements.sort(key=lambda i: int(domain.leq[:, i].sum()))
    assignment: dict[int, int] = {}

    def candidates(v: int) -> Iterator[int]:
        for c in range(codomain.n):
            if forbid_fixed and c == v:
                continue
            if lower is not None and not codomain.leq[lower[v], c]:
                continue
            if upper is not None and not codomain.leq[c, upper[v]]:
                continue
            ok = True
            for u, cu in assignment.items():
                if domain.leq[u, v] and not codomain.leq[cu, c]:
                    ok = False
                    break
                if domain.leq[v, u] and not codomain.leq[c, cu]:
                    ok = False
                    break
            if ok:
                yield c

    def backtrack(idx: int) -> Iterator[dict[int, int]]:
        if idx == len(elements):
            yield dict(assignment)
            return
        v = elements[idx]
        for c in candidates(v):
            budget.spend()
            assignment[v] = c
            yield from backtrack(idx + 1)
            del assignment[v]

    yield from backtrack(0)


# ---------------------------------------------------------------------------
# Fixed points


@dataclass(frozen=True)
class FppResult:
    has_fpp: bool
    witness: PosetMap | None  # a fixed-point-free self-map when has_fpp is False


def has_fpp(P: FinitePoset, budget: int = DEFAULT_BUDGET) -> FppResult:
    """True iff every monotone self-map of ``P`` has a fixed point."""
    b = _Budget(budget)
    for mapping in _monotone_maps(P, P, b, forbid_fixed=True):
        values = tuple(mapping[i] for i in range(P.n))
        return FppResult(False, PosetMap(P, P, values))
    return FppResult(True, None)


# ---------------------------------------------------------------------------
# The two-point configuration space


@dataclass(frozen=True)
class Config2:
    poset: FinitePoset
    pairs: tuple[tuple[int, int], ...]  # element i of the poset is this ordered pair


def config2(P: FinitePoset) -> Config2:
    """Ordered pairs of distinct elements with the componentwise induced order."""
    if P.n < 2:
        raise PosetError("the two-point configuration space needs n >= 2")
    pairs = [(x, y) for x in range(P.n) for y in range(P.n) if x != y]
    m = len(pairs)
    leq = np.zeros((m, m), dtype=bool)
    for a, (x1, y1) in enumerate(pairs):
        for b, (x2, y2) in enumerate(pairs):
            leq[a, b] = P.leq[x1, x2] and P.leq[y1, y2]
    return Config2(FinitePoset(leq), tuple(pairs))


# ---------------------------------------------------------------------------
# Sectional number of the pair projection


@dataclass(frozen=True)
class SectionWitness:
    up_set: tuple[int, ...]
    partner: tuple[int, ...]  # g(x) per element of the up-set, g(x) != x


@dataclass(frozen=True)
class SecResult:
    value: float | None  # int, math.inf, or None when the cap was exceeded
    status: str  # "exact" | "infinite" | "exceeded_max_cover" | "empty_fiber"
    witnesses: tuple[SectionWitness, ...] | None
    theorem_applicable: bool
    max_cover: int

    @property
    def is_one(self) -> bool:
        return self.value == 1


def sec_pi21(P: FinitePoset, max_cover: int = 4, budget: int = DEFAULT_BUDGET) -> SecResult:
    """Minimal number of open pieces of ``P`` with local sections of the pair map.

    A piece is an up-set U admitting a monotone g: U -> P with g(x) != x; the
    section is x -> (x, g(x)).  A point contained in no such piece shows the
    value is infinite.  Finite values are found by exact minimal set cover over
    the sectionable up-sets, reported up to ``max_cover``.
    """
    if P.n == 1:
        # the pair configuration space is empty; nothing sections an empty fiber
        return SecResult(math.inf, "empty_fiber", None, False, max_cover)
    b = _Budget(budget)
    sectionable: list[SectionWitness] = []
    for up in P.up_sets():
        if not up:
            continue
        found = next(_monotone_maps(P, P, b, domain_elements=up, forbid_fixed=True), None)
        if found is not None:
            sectionable.append(SectionWitness(up, tuple(found[x] for x in up)))

    covered = set()
    for w in sectionable:
        covered.update(w.up_set)
    if covered != set(range(P.n)):
        return SecResult(math.inf, "infinite", None, True, max_cover)

    # minimal covers only ever need inclusion-maximal sectionable pieces
    maximal = [w for w in sectionable
               if not any(set(w.up_set) < set(v.up_set) for v in sectionable)]
    full = set(range(P.n))
    for m in range(1, max_cover + 1):
        for combo in itertools.combinations(maximal, m):
            b.spend()
            if set().union(*(set(w.up_set) for w in combo)) == full:
                return SecResult(m, "exact", tuple(combo), True, max_cover)
    return SecResult(None, "exceeded_max_cover", None, True, max_cover)


def section_to_selfmap(P: FinitePoset, witness: SectionWitness) -> PosetMap:
    """A global section witness over all of P, converted to a fixed-point-free map."""
    if set(witness.up_set) != set(range(P.n)):
        raise PosetError("witness is not global")
    values = [0] * P.n
    for x, gx in zip(witness.up_set, witness.partner):
        values[x] = gx
    return PosetMap(P, P, tuple(values))


def selfmap_to_section(f: PosetMap) -> SectionWitness:
    """A fixed-point-free self-map, converted to a global section witness."""
    if not f.is_selfmap:
        raise PosetError("need a self-map")
    if any(f.values[i] == i for i in range(f.domain.n)):
        raise PosetError("map has a fixed point")
    return SectionWitness(tuple(range(f.domain.n)), f.values)


# ---------------------------------------------------------------------------
# Homotopy and minimal root counts


def _all_monotone_maps(domain: FinitePoset, codomain: FinitePoset,
                       budget: _Budget) -> list[tuple[int, ...]]:
    return [tuple(m[i] for i in range(domain.n))
            for m in _monotone_maps(domain, codomain, budget)]


def _pointwise_comparable(codomain: FinitePoset, f: tuple[int, ...], g: tuple[int, ...]) -> bool:
    return all(codomain.leq[a, b] for a, b in zip(f, g)) or all(
        codomain.leq[b, a] for a, b in zip(f, g)
    )


def _homotopy_component(f: PosetMap, budget: _Budget) -> set[tuple[int, ...]]:
    maps = _all_monotone_maps(f.domain, f.codomain, budget)
    start = tuple(f.values)
    component = {start}
    frontier = deque([start])
    while frontier:
        current = frontier.popleft()
        for other in maps:
            budget.spend()
            if other not in component and _pointwise_comparable(f.codomain, current, other):
                component.add(other)
                frontier.append(other)
    return component


def homotopic(f: PosetMap, g: PosetMap, budget: int = DEFAULT_BUDGET) -> bool:
    """Connectedness of f and g by a zig-zag of pointwise-comparable monotone maps."""
    if f.domain != g.domain or f.codomain != g.codomain:
        raise PosetError("maps must share domain and codomain")
    if f.values == g.values:
        return True
    return tuple(g.values) in _homotopy_component(f, _Budget(budget))


def mr_bruteforce(f: PosetMap, a: int, budget: int = DEFAULT_BUDGET) -> int:
    """Minimum number of solutions of g(x) = a over all g homotopic to f."""
    if not 0 <= a < f.codomain.n:
        raise PosetError(f"root target {a} out of range")
    component = _homotopy_component(f, _Budget(budget))
    return min(sum(1 for v in values if v == a) for values in component)


# ---------------------------------------------------------------------------
# Enumeration of all posets up to isomorphism


def all_posets(n: int) -> list[FinitePoset]:
    """All posets on n elements up to isomorphism.

    Every poset admits a linear extension, so candidates are generated with
    the strict relation inside the upper triangle only, then deduplicated by
    a canonical form over all relabelings.
    """
    if n < 1:
        raise PosetError("need n >= 1")
    if n > 7:
        raise SearchBudgetExceeded("poset enumeration beyond n = 7")
    upper_pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    seen: set[bytes] = set()
    out: list[FinitePoset] = []
    for bits in itertools.product([False, True], repeat=len(upper_pairs)):
        leq = np.eye(n, dtype=bool)
        for (i, j), b in zip(upper_pairs, bits):
            if b:
                leq[i, j] = True
        closure = leq.copy()
        for k in range(n):
            closure |= np.outer(closure[:, k], closure[k, :])
        if not (closure == leq).all():
            continue  # not transitively closed: the closure appears elsewhere
        canon = min(
            leq[np.ix_(perm, perm)].tobytes()
            for perm in itertools.permutations(range(n))
        )
        if canon in seen:
            continue
        seen.add(canon)
        out.append(FinitePoset(leq))
    return out
