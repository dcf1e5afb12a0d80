"""Interval-propagation engine for cat / TC / sec / secat quantities.

Quantities are integer intervals inside {1, 2, ..., infinity}.  Facts about
them (axioms, certificate outputs, space presets) are combined by a fixed set
of guarded inference rules until nothing tightens further.  Every bound
carries a derivation tree; incompatible bounds raise :class:`Contradiction`
with both derivations attached.

Subjects are either spaces (``"S2"``, ``"RP2"``, ``"F(S2,2)"``, or abstract
names) or maps.  Map subjects of the form ``pi(k,r,X)`` denote the
coordinate projection F(X,k) -> F(X,r); these get their domain and codomain,
and a fibration flag via the bundle criterion (connected boundaryless
manifold of dimension >= 2), filled in automatically.  Abstract map subjects
declare ``domain`` / ``codomain`` / flags as attributes.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterable, Mapping, Sequence

INF = math.inf

QUANTITY_KINDS = ("cat", "TC", "sec", "secat", "TCmap")

BOOL_ATTRS = (
    "fibration", "has_section", "hausdorff", "manifold_nb_dim_ge2", "connected",
    "contractible", "nullhomotopic", "path_connected_CW", "ANR", "lie_group",
    "odd_dim_diff_manifold", "compact_b1_nonzero", "nonvanishing_vf", "FPP",
    "manifold_with_boundary",
)


class BoundsError(ValueError):
    """Malformed quantities, facts or attributes."""


class Contradiction(RuntimeError):
    """Two derivations force an empty interval (or clashing attribute values)."""

    def __init__(self, message: str, existing: "Prov | None" = None,
                 incoming: "Prov | None" = None):
        super().__init__(message)
        self.existing = existing
        self.incoming = incoming

    def explain(self) -> str:
        parts = [str(self)]
        if self.existing is not None:
            parts.append("existing derivation:\n" + render_prov(self.existing, indent=1))
        if self.incoming is not None:
            parts.append("incoming derivation:\n" + render_prov(self.incoming, indent=1))
        return "\n".join(parts)


# ---------------------------------------------------------------------------
# Quantities


@dataclass(frozen=True)
class Quantity:
    kind: str  # cat | TC | sec | secat | TCmap
    subject: str

    def __post_init__(self) -> None:
        if self.kind not in QUANTITY_KINDS:
            raise BoundsError(f"unknown quantity kind {self.kind!r}")

    def __str__(self) -> str:
        kind = "TC" if self.kind == "TCmap" else self.kind
        return f"{kind}({self.subject})"


_PI_RE = re.compile(r"^pi\((\d+),\s*(\d+),\s*([A-Za-z0-9()+,*-]+)\)$")
_QUANTITY_RE = re.compile(r"^(cat|TC|sec|secat)\((.+)\)$")


def is_map_subject(subject: str) -> bool:
    return subject.startswith("pi(") or subject.startswith("map:")


def parse_pi(subject: str) -> tuple[int, int, str] | None:
    m = _PI_RE.match(subject)
    if m is None:
        return None
    k, r, space = int(m.group(1)), int(m.group(2)), m.group(3)
    if not k >= r >= 1:
        raise BoundsError(f"projection indices must satisfy k >= r >= 1: {subject}")
    return k, r, space


def pi_subject(k: int, r: int, space: str) -> str:
    return f"pi({k},{r},{space})"


def conf_space(space: str, j: int) -> str:
    """Subject id of F(space, j); F(X, 1) is X itself."""
    return space if j == 1 else f"F({space},{j})"


def parse_quantity(text: str | Quantity) -> Quantity:
    if isinstance(text, Quantity):
        return text
    m = _QUANTITY_RE.match(text.strip())
    if m is None:
        raise BoundsError(f"cannot parse quantity {text!r}")
    kind, subject = m.group(1), m.group(2).strip()
    if kind in ("sec", "secat"):
        return Quantity(kind, subject)
    if is_map_subject(subject) or parse_pi(subject) is not None:
        if kind == "cat":
            raise BoundsError(f"cat applies to spaces, got map subject {subject!r}")
        return Quantity("TCmap", subject)
    return Quantity(kind, subject)


# ---------------------------------------------------------------------------
# Provenance


@dataclass(frozen=True)
class Prov:
    rule: str  # "axiom", "preset", "attribute", or a rule id like "R9"
    text: str
    premises: tuple["Prov", ...] = ()


def render_prov(prov: Prov, indent: int = 0, depth: int = 12) -> str:
    pad = "  " * indent
    line = f"{pad}[{prov.rule}] {prov.text}"
    if depth <= 0 or not prov.premises:
        return line
    below = "\n".join(render_prov(p, indent + 1, depth - 1) for p in prov.premises)
    return line + "\n" + below


# ---------------------------------------------------------------------------
# Facts and attribute assertions


@dataclass(frozen=True)
class Fact:
    quantity: Quantity
    lo: float = 1
    hi: float = INF
    label: str = "axiom"

    def __post_init__(self) -> None:
        if not (1 <= self.lo <= self.hi):
            raise BoundsError(f"invalid interval [{self.lo}, {self.hi}]")


def fact(quantity: str | Quantity, lo: float = 1, hi: float = INF,
         label: str = "axiom") -> Fact:
    return Fact(parse_quantity(quantity), lo, hi, label)


def eq_fact(quantity: str | Quantity, value: float, label: str = "axiom") -> Fact:
    return Fact(parse_quantity(quantity), value, value, label)


@dataclass
class _IntervalState:
    lo: float
    hi: float
    lo_prov: Prov
    hi_prov: Prov


@dataclass
class _AttrState:
    value: Any
    prov: Prov


# ---------------------------------------------------------------------------
# Space presets for the built-in models


def _sphere_presets(d: int) -> tuple[dict[str, Any], list[Fact]]:
    attrs: dict[str, Any] = {
        "hausdorff": True, "connected": True, "path_connected_CW": True,
        "ANR": True, "contractible": False, "FPP": False,
        "manifold_nb_dim_ge2": d >= 2, "odd_dim_diff_manifold": d % 2 == 1,
        "compact_b1_nonzero": d == 1, "lie_group": d in (1, 3), "sphere_dim": d,
    }
    tc = 2 if d % 2 == 1 else 3
    facts = [
        eq_fact(f"cat(S{d})", 2, "preset"),
        eq_fact(f"TC(S{d})", tc, "preset"),
        # the two-point configuration space deformation-retracts to the sphere
        eq_fact(f"cat(F(S{d},2))", 2, "preset"),
        eq_fact(f"TC(F(S{d},2))", tc, "preset"),
    ]
    return attrs, facts


def _rp_presets(d: int) -> tuple[dict[str, Any], list[Fact]]:
    attrs: dict[str, Any] = {
        "hausdorff": True, "connected": True, "path_connected_CW": True,
        "ANR": True, "contractible": False, "FPP": d % 2 == 0,
        "manifold_nb_dim_ge2": d >= 2, "odd_dim_diff_manifold": d % 2 == 1,
        "lie_group": d in (1, 3),
    }
    facts = []
    if d == 2:
        facts = [eq_fact("cat(RP2)", 3, "preset"), eq_fact("TC(RP2)", 4, "preset")]
    return attrs, facts


def _torus_presets(m: int) -> tuple[dict[str, Any], list[Fact]]:
    attrs: dict[str, Any] = {
        "hausdorff": True, "connected": True, "path_connected_CW": True,
        "ANR": True, "contractible": False, "FPP": False,
        "manifold_nb_dim_ge2": m >= 2, "odd_dim_diff_manifold": m % 2 == 1,
        "compact_b1_nonzero": True, "lie_group": True,
    }
    facts = [
        eq_fact(f"cat(T{m})", m + 1, "preset"),
        eq_fact(f"TC(T{m})", m + 1, "preset"),
    ]
    return attrs, facts


def _space_presets(subject: str) -> tuple[dict[str, Any], list[Fact]]:
    m = re.match(r"^S(\d+)$", subject)
    if m:
        return _sphere_presets(int(m.group(1)))
    m = re.match(r"^RP(\d+)$", subject)
    if m:
        return _rp_presets(int(m.group(1)))
    m = re.match(r"^T(\d+)$", subject)
    if m:
        return _torus_presets(int(m.group(1)))
    m = re.match(r"^R(\d+)$", subject)
    if m:
        dim = int(m.group(1))
        return ({
            "hausdorff": True, "connected": True, "path_connected_CW": True,
            "ANR": True, "contractible": True, "FPP": False,
            "manifold_nb_dim_ge2": dim >= 2, "odd_dim_diff_manifold": dim % 2 == 1,
        }, [])
    m = re.match(r"^D(\d+)$", subject)
    if m:
        return ({
            "hausdorff": True, "connected": True, "path_connected_CW": True,
            "ANR": True, "contractible": True, "FPP": True,
            "manifold_with_boundary": True,
        }, [])
    if subject == "S2vS1":
        return ({
            "hausdorff": True, "connected": True, "path_connected_CW": True,
            "ANR": True, "contractible": False, "FPP": False,
        }, [])
    m = re.match(r"^Discrete(\d+)$", subject)
    if m:
        n = int(m.group(1))
        return ({
            "hausdorff": True, "connected": n == 1,
            "contractible": n == 1, "FPP": n == 1,
        }, [])
    m = re.match(r"^F\(([A-Za-z0-9]+),(\d+)\)$", subject)
    if m:
        inner_attrs, _ = _space_presets(m.group(1))
        out: dict[str, Any] = {}
        if inner_attrs.get("hausdorff"):
            out["hausdorff"] = True
        return out, []
    return {}, []


def preset_attributes(subject: str) -> dict[str, Any]:
    """Built-in attribute preset for a model-space id (empty when unknown)."""
    return _space_presets(subject)[0]


def preset_facts(subject: str) -> list[Fact]:
    return _space_presets(subject)[1]


# ---------------------------------------------------------------------------
# The store


class FactStore:
    """Intervals and attributes for a finite universe of subjects."""

    def __init__(self, rules: "list[Rule] | None" = None, use_presets: bool = True):
        self.rules = rules if rules is not None else load_rules()
        self.use_presets = use_presets
        self._intervals: dict[Quantity, _IntervalState] = {}
        self._attrs: dict[tuple[str, str], _AttrState] = {}
        self._known_subjects: set[str] = set()
        self._propagated = False

    # -- subjects

    def _touch_subject(self, subject: str) -> None:
        if subject in self._known_subjects:
            return
        self._known_subjects.add(subject)
        if self.use_presets:
            attrs, facts = _space_presets(subject)
            for name, value in attrs.items():
                self._set_attr_raw(subject, name, value,
                                   Prov("preset", f"{name}({subject}) = {value} (model-space preset)"))
            for f in facts:
                self.assert_fact(f)
        info = parse_pi(subject)
        if info is not None:
            k, r, space = info
            self._touch_subject(space)
        self._propagated = False

    def map_subjects(self) -> list[str]:
        subjects = set()
        for q in self._intervals:
            if q.kind in ("sec", "secat", "TCmap"):
                subjects.add(q.subject)
        for (subject, _name) in self._attrs:
            if is_map_subject(subject) or parse_pi(subject) is not None:
                subjects.add(subject)
        return sorted(subjects)

    def space_subjects(self) -> list[str]:
        subjects = set()
        for q in self._intervals:
            if q.kind in ("cat", "TC"):
                subjects.add(q.subject)
        for (subject, _name) in self._attrs:
            if not (is_map_subject(subject) or parse_pi(subject) is not None):
                subjects.add(subject)
        for m in self.map_subjects():
            info = self.map_info(m)
            if info is not None:
                subjects.add(info[2])
        return sorted(subjects)

    def map_info(self, subject: str) -> tuple[int, int, str] | None:
        return parse_pi(subject)

    def domain_of(self, subject: str) -> str | None:
        info = parse_pi(subject)
        if info is not None:
            k, _r, space = info
            return conf_space(space, k)
        dom = self.get_attr(subject, "domain")
        return dom if isinstance(dom, str) else None

    def codomain_of(self, subject: str) -> str | None:
        info = parse_pi(subject)
        if info is not None:
            _k, r, space = info
            return conf_space(space, r)
        cod = self.get_attr(subject, "codomain")
        return cod if isinstance(cod, str) else None

    # -- intervals

    def ensure(self, quantity: str | Quantity) -> Quantity:
        q = parse_quantity(quantity)
        if q not in self._intervals:
            default = Prov("default", f"{q} defaults to [1, inf]")
            self._intervals[q] = _IntervalState(1, INF, default, default)
            self._touch_subject(q.subject)
        return q

    def interval(self, quantity: str | Quantity) -> tuple[float, float]:
        q = self.ensure(quantity)
        state = self._intervals[q]
        return state.lo, state.hi

    def interval_prov(self, quantity: str | Quantity) -> tuple[Prov, Prov]:
        q = self.ensure(quantity)
        state = self._intervals[q]
        return state.lo_prov, state.hi_prov

    def fact_prov(self, quantity: str | Quantity) -> Prov:
        """Combined provenance snapshot of the current interval of a quantity."""
        q = self.ensure(quantity)
        state = self._intervals[q]
        if state.lo_prov is state.hi_prov:
            return state.lo_prov
        return Prov("interval", f"{q} in [{fmt(state.lo)}, {fmt(state.hi)}]",
                    (state.lo_prov, state.hi_prov))

    def tighten(self, quantity: str | Quantity, lo: float | None = None,
                hi: float | None = None, prov: Prov | None = None) -> bool:
        q = self.ensure(quantity)
        state = self._intervals[q]
        prov = prov or Prov("axiom", "unlabelled")
        changed = False
        if lo is not None and lo > state.lo:
            if lo > state.hi:
                raise Contradiction(
                    f"{q}: new lower bound {fmt(lo)} exceeds upper bound {fmt(state.hi)}",
                    existing=state.hi_prov, incoming=prov)
            state.lo = lo
            state.lo_prov = prov
            changed = True
        if hi is not None and hi < state.hi:
            if hi < state.lo:
                raise Contradiction(
                    f"{q}: new upper bound {fmt(hi)} undercuts lower bound {fmt(state.lo)}",
                    existing=state.lo_prov, incoming=prov)
            state.hi = hi
            state.hi_prov = prov
            changed = True
        if changed:
            self._propagated = False
        return changed

    def assert_fact(self, f: Fact) -> bool:
        prov = Prov(f.label, f"{f.quantity} in [{fmt(f.lo)}, {fmt(f.hi)}] ({f.label})")
        return self.tighten(f.quantity, lo=f.lo, hi=f.hi, prov=prov)

    # -- attributes

    def get_attr(self, subject: str, name: str) -> Any:
        state = self._attrs.get((subject, name))
        return None if state is None else state.value

    def attr_prov(self, subject: str, name: str) -> Prov | None:
        state = self._attrs.get((subject, name))
        return None if state is None else state.prov

    def _set_attr_raw(self, subject: str, name: str, value: Any, prov: Prov) -> bool:
        key = (subject, name)
        state = self._attrs.get(key)
        if state is not None:
            if state.value != value:
                raise Contradiction(
                    f"attribute {name}({subject}): {state.value} vs {value}",
                    existing=state.prov, incoming=prov)
            return False
        self._attrs[key] = _AttrState(value, prov)
        self._propagated = False
        return True

    def set_attr(self, subject: str, name: str, value: Any,
                 prov: Prov | None = None) -> bool:
        self._touch_subject(subject)
        prov = prov or Prov("attribute", f"{name}({subject}) = {value} (declared)")
        return self._set_attr_raw(subject, name, value, prov)

    # -- propagation

    def propagate(self, max_passes: int = 10_000) -> "FactStore":
        if self._propagated:
            return self
        for _pass in range(max_passes):
            changed = _structural_pass(self)
            for rule in self.rules:
                if rule.apply(self):
                    changed = True
            if not changed:
                self._propagated = True
                return self
        raise RuntimeError("propagation failed to reach a fixpoint")

    # -- queries

    def query(self, quantity: str | Quantity) -> "QueryResult":
        q = self.ensure(quantity)
        self.propagate()
        lo, hi = self.interval(q)
        lo_prov, hi_prov = self.interval_prov(q)
        return QueryResult(q, lo, hi, lo_prov, hi_prov)

    def snapshot(self) -> dict[str, tuple[float, float]]:
        self.propagate()
        return {str(q): (s.lo, s.hi) for q, s in self._intervals.items()}


def fmt(x: float) -> str:
    return "inf" if x == INF else str(int(x))


@dataclass(frozen=True)
class QueryResult:
    quantity: Quantity
    lo: float
    hi: float
    lo_prov: Prov
    hi_prov: Prov

    def explain(self) -> str:
        head = f"{self.quantity} = [{fmt(self.lo)}, {fmt(self.hi)}]"
        lower = "lower bound:\n" + render_prov(self.lo_prov, indent=1)
        upper = "upper bound:\n" + render_prov(self.hi_prov, indent=1)
        return "\n".join([head, lower, upper])

    def to_json(self) -> dict:
        return {
            "quantity": str(self.quantity),
            "lo": None if self.lo == INF else int(self.lo),
            "hi": None if self.hi == INF else int(self.hi),
            "explain": self.explain(),
        }


# ---------------------------------------------------------------------------
# Rules


@dataclass(frozen=True)
class Rule:
    id: str
    statement: str
    guard: str
    apply: Callable[[FactStore], bool]


def _le(store: FactStore, smaller: Quantity | str, larger: Quantity | str,
        rule_id: str, reason: str) -> bool:
    """Propagate smaller <= larger in both directions."""
    qs = store.ensure(smaller)
    ql = store.ensure(larger)
    s_lo, s_hi = store.interval(qs)
    l_lo, l_hi = store.interval(ql)
    changed = False
    if s_lo > l_lo:
        changed |= store.tighten(ql, lo=s_lo, prov=Prov(
            rule_id, f"{ql} >= {fmt(s_lo)} since {qs} <= {ql} ({reason})",
            (store.fact_prov(qs),)))
    if l_hi < s_hi:
        changed |= store.tighten(qs, hi=l_hi, prov=Prov(
            rule_id, f"{qs} <= {fmt(l_hi)} since {qs} <= {ql} ({reason})",
            (store.fact_prov(ql),)))
    return changed


def _eq(store: FactStore, a: Quantity | str, b: Quantity | str,
        rule_id: str, reason: str) -> bool:
    changed = _le(store, a, b, rule_id, reason)
    changed |= _le(store, b, a, rule_id, reason)
    return changed


def _guarded_attr(store: FactStore, subject: str, name: str) -> bool:
    return store.get_attr(subject, name) is True


def _structural_pass(store: FactStore) -> bool:
    """Bookkeeping outside the numbered rules: bundle criterion and carried flags."""
    changed = False
    for subject in store.map_subjects():
        info = store.map_info(subject)
        if info is None:
            continue
        k, r, space = info
        if store.get_attr(subject, "fibration") is None:
            if k > r and _guarded_attr(store, space, "manifold_nb_dim_ge2") \
                    and _guarded_attr(store, space, "connected"):
                changed |= store.set_attr(subject, "fibration", True, Prov(
                    "bundle-criterion",
                    f"{subject} is a locally trivial bundle: {space} is a connected "
                    "boundaryless manifold of dimension >= 2",
                    tuple(p for p in (store.attr_prov(space, "manifold_nb_dim_ge2"),
                                      store.attr_prov(space, "connected")) if p)))
            elif _guarded_attr(store, space, "manifold_with_boundary"):
                changed |= store.set_attr(subject, "fibration", False, Prov(
                    "bundle-criterion",
                    f"{subject} is not marked a fibration: {space} has boundary "
                    "(fibers over interior and boundary points differ)"))
        # Hausdorff passes to configuration spaces of the domain/codomain
        for cs in (store.domain_of(subject), store.codomain_of(subject)):
            if cs is not None and cs.startswith("F(") \
                    and store.get_attr(cs, "hausdorff") is None \
                    and _guarded_attr(store, space, "hausdorff"):
                changed |= store.set_attr(cs, "hausdorff", True, Prov(
                    "structural", f"{cs} is Hausdorff as a subspace of a power of {space}"))
    return changed


def _map_rule(fn: Callable[[FactStore, str], bool]) -> Callable[[FactStore], bool]:
    def apply(store: FactStore) -> bool:
        changed = False
        for subject in store.map_subjects():
            changed |= fn(store, subject)
        return changed
    return apply


def _space_rule(fn: Callable[[FactStore, str], bool]) -> Callable[[FactStore], bool]:
    def apply(store: FactStore) -> bool:
        changed = False
        for subject in store.space_subjects():
            changed |= fn(store, subject)
        return changed
    return apply


# individual rules ----------------------------------------------------------


def _r1(store: FactStore, m: str) -> bool:
    return _le(store, Quantity("secat", m), Quantity("sec", m), "R1",
               "homotopy local sections are at least as available as strict ones")


def _r2(store: FactStore, m: str) -> bool:
    if not _guarded_attr(store, m, "fibration"):
        return False
    return _eq(store, Quantity("sec", m), Quantity("secat", m), "R2",
               "for a fibration homotopy sections yield strict sections")


def _r3(store: FactStore, m: str) -> bool:
    k = store.get_attr(m, "cup_length")
    if not isinstance(k, int) or k < 1:
        return False
    prov = Prov("R3", f"sec({m}) >= {k + 1}: {k} classes vanish under pullback "
                      "with nonzero product",
                tuple(p for p in (store.attr_prov(m, "cup_length"),) if p))
    return store.tighten(Quantity("sec", m), lo=k + 1, prov=prov)


def _r4(store: FactStore, m: str) -> bool:
    B = store.codomain_of(m)
    if B is None:
        return False
    changed = _le(store, Quantity("secat", m), Quantity("cat", B), "R4",
                  "homotopy sections exist over the pieces of a categorical cover")
    if _guarded_attr(store, m, "fibration"):
        changed |= _le(store, Quantity("sec", m), Quantity("cat", B), "R4",
                       "a fibration admits local sections over categorical pieces")
    return changed


def _r5(store: FactStore, m: str) -> bool:
    if not _guarded_attr(store, m, "nullhomotopic"):
        return False
    B = store.codomain_of(m)
    if B is None:
        return False
    return _eq(store, Quantity("secat", m), Quantity("cat", B), "R5",
               "a nullhomotopic map has sectional category equal to cat of the base")


def _r6(store: FactStore, m: str) -> bool:
    info = store.map_info(m)
    if info is None:
        return False
    k, r, space = info
    if r != 1 or k < 2 or not _guarded_attr(store, space, "hausdorff"):
        return False
    prov = Prov("R6", f"sec({m}) <= {k}: puncture covers around a fixed {k}-tuple",
                tuple(p for p in (store.attr_prov(space, "hausdorff"),) if p))
    return store.tighten(Quantity("sec", m), hi=k, prov=prov)


def _r7(store: FactStore, m: str) -> bool:
    info = store.map_info(m)
    if info is None:
        return False
    k, r, space = info
    if not k > r >= 1 or not _guarded_attr(store, space, "hausdorff"):
        return False
    bound = math.comb(k, r)
    prov = Prov("R7", f"sec({m}) <= C({k},{r}) = {bound}: binomial cover from a "
                      f"fixed {k}-tuple",
                tuple(p for p in (store.attr_prov(space, "hausdorff"),) if p))
    return store.tighten(Quantity("sec", m), hi=bound, prov=prov)


def _r8(store: FactStore, m: str) -> bool:
    info = store.map_info(m)
    if info is None:
        return False
    k, r, space = info
    if not k > r >= 1:
        return False
    if not (_guarded_attr(store, space, "manifold_nb_dim_ge2")
            and _guarded_attr(store, space, "connected")):
        return False
    B = conf_space(space, r)
    return _le(store, Quantity("sec", m), Quantity("cat", B), "R8",
               "bundle over the configuration base: sections over categorical pieces")


def _r9(store: FactStore, space: str) -> bool:
    if not _guarded_attr(store, space, "hausdorff"):
        return False
    changed = False
    q = Quantity("sec", pi_subject(2, 1, space))
    fpp = store.get_attr(space, "FPP")
    if fpp is True:
        changed |= store.tighten(q, lo=2, hi=2, prov=Prov(
            "R9", f"sec({q.subject}) = 2: the space has the fixed point property",
            tuple(p for p in (store.attr_prov(space, "FPP"),) if p)))
    elif fpp is False:
        changed |= store.tighten(q, lo=1, hi=1, prov=Prov(
            "R9", f"sec({q.subject}) = 1: a fixed-point-free self-map provides a "
                  "global section",
            tuple(p for p in (store.attr_prov(space, "FPP"),) if p)))
    if q in store._intervals:
        lo, hi = store.interval(q)
        if lo >= 2 and hi <= 2 and fpp is None:
            changed |= store.set_attr(space, "FPP", True, Prov(
                "R9", f"FPP({space}): the pair projection has sectional number 2",
                (store.fact_prov(q),)))
        elif hi <= 1 and fpp is None:
            changed |= store.set_attr(space, "FPP", False, Prov(
                "R9", f"no FPP({space}): the pair projection has a global section",
                (store.fact_prov(q),)))
    return changed


def _r9_rule(store: FactStore) -> bool:
    changed = False
    for space in store.space_subjects():
        changed |= _r9(store, space)
    # also fire for spaces that only appear inside pi-subjects
    for m in store.map_subjects():
        info = store.map_info(m)
        if info is not None:
            changed |= _r9(store, info[2])
    return changed


def _r10(store: FactStore) -> bool:
    changed = False
    maps = store.map_subjects()
    ones: dict[str, list[int]] = {}
    for m in maps:
        info = store.map_info(m)
        if info is None:
            continue
        k, r, space = info
        if r == 1 and store.interval(Quantity("sec", m))[1] <= 1:
            ones.setdefault(space, []).append(k)
    for m in maps:
        info = store.map_info(m)
        if info is None:
            continue
        k, r, space = info
        if r != 1:
            continue
        upstream = [kk for kk in ones.get(space, []) if kk >= k]
        if not upstream or store.interval(Quantity("sec", m))[1] <= 1:
            continue
        kk = max(upstream)
        src = Quantity("sec", pi_subject(kk, 1, space))
        changed |= store.tighten(Quantity("sec", m), hi=1, prov=Prov(
            "R10", f"sec({m}) = 1: discarding points preserves global sections "
                   f"(from k = {kk})", (store.fact_prov(src),)))
    return changed


def _r11(store: FactStore, m: str) -> bool:
    tc = Quantity("TCmap", m)
    changed = _le(store, Quantity("sec", m), tc, "R11",
                  "end-evaluation of motion plans yields sections")
    B = store.codomain_of(m)
    if B is not None:
        changed |= _le(store, Quantity("cat", B), tc, "R11",
                       "freezing the start point turns plans into a categorical cover")
    return changed


def _r12(store: FactStore, m: str) -> bool:
    if not _guarded_attr(store, m, "has_section"):
        return False
    E, B = store.domain_of(m), store.codomain_of(m)
    changed = False
    if B is not None:
        changed |= _le(store, Quantity("TC", B), Quantity("TCmap", m), "R12",
                       "a section pulls base motion planning through the map")
    if E is not None:
        changed |= _le(store, Quantity("TCmap", m), Quantity("TC", E), "R12",
                       "plans in the total space project to plans for the map")
    return changed


def _r13(store: FactStore, m: str) -> bool:
    changed = False
    if _guarded_attr(store, m, "fibration"):
        B = store.codomain_of(m)
        if B is not None:
            changed |= _le(store, Quantity("TCmap", m), Quantity("TC", B), "R13",
                           "lifting base plans through the fibration")
    composite = store.get_attr(m, "composite_of")
    if isinstance(composite, str) and "," in composite:
        outer, inner = (s.strip() for s in composite.split(",", 1))
        if _guarded_attr(store, inner, "fibration"):
            changed |= _le(store, Quantity("TCmap", m), Quantity("TCmap", outer), "R13",
                           "precomposing with a fibration cannot increase complexity")
    return changed


def _r14(store: FactStore, m: str) -> bool:
    if not (_guarded_attr(store, m, "fibration") and _guarded_attr(store, m, "has_section")):
        return False
    B = store.codomain_of(m)
    if B is None:
        return False
    tc = Quantity("TCmap", m)
    changed = _eq(store, tc, Quantity("TC", B), "R14",
                  "a fibration with a section has the complexity of its base")
    contractible = store.get_attr(B, "contractible")
    if contractible is True:
        changed |= store.tighten(tc, hi=1, prov=Prov(
            "R14", f"TC({m}) = 1: the base is contractible",
            tuple(p for p in (store.attr_prov(B, "contractible"),) if p)))
    elif contractible is False:
        changed |= store.tighten(tc, lo=2, prov=Prov(
            "R14", f"TC({m}) >= 2: the base is not contractible",
            tuple(p for p in (store.attr_prov(B, "contractible"),) if p)))
    lo, hi = store.interval(tc)
    if hi <= 1 and contractible is None:
        changed |= store.set_attr(B, "contractible", True, Prov(
            "R14", f"{B} is contractible: TC({m}) = 1", (store.fact_prov(tc),)))
    elif lo >= 2 and contractible is None:
        changed |= store.set_attr(B, "contractible", False, Prov(
            "R14", f"{B} is not contractible: TC({m}) >= 2", (store.fact_prov(tc),)))
    return changed


def _r15(store: FactStore, m: str) -> bool:
    E, B = store.domain_of(m), store.codomain_of(m)
    if E is None or B is None:
        return False
    if not (_guarded_attr(store, m, "fibration")
            and _guarded_attr(store, E, "ANR") and _guarded_attr(store, B, "ANR")):
        return False
    tc = Quantity("TCmap", m)
    changed = _le(store, Quantity("cat", B), tc, "R15",
                  "ANR fibration bound (imported; provenance warning: outside "
                  "the core development)")
    cat_e_hi = store.interval(Quantity("cat", E))[1]
    sec_hi = store.interval(Quantity("sec", m))[1]
    if cat_e_hi < INF and sec_hi < INF:
        bound = cat_e_hi + cat_e_hi * sec_hi - 1
        changed |= store.tighten(tc, hi=bound, prov=Prov(
            "R15", f"TC({m}) <= cat(E) * (1 + sec) - 1 = {fmt(bound)} (imported "
                   "ANR bound; provenance warning)",
            (store.fact_prov(Quantity("cat", E)), store.fact_prov(Quantity("sec", m)))))
    changed |= _le(store, tc, Quantity("TC", B), "R15",
                   "ANR fibration bound (imported; provenance warning)")
    prod = f"prod({E},{B})"
    if Quantity("cat", prod) in store._intervals:
        changed |= _le(store, tc, Quantity("cat", prod), "R15",
                       "ANR fibration bound via the product (imported)")
    return changed


def _r16(store: FactStore, x: str) -> bool:
    if not _guarded_attr(store, x, "path_connected_CW"):
        return False
    cat_q, tc_q = Quantity("cat", x), Quantity("TC", x)
    changed = _le(store, cat_q, tc_q, "R16",
                  "diagonal plans restrict to a categorical cover")
    cat_lo, cat_hi = store.interval(cat_q)
    if cat_hi < INF:
        changed |= store.tighten(tc_q, hi=2 * cat_hi - 1, prov=Prov(
            "R16", f"TC({x}) <= 2 cat({x}) - 1 = {fmt(2 * cat_hi - 1)}",
            (store.fact_prov(cat_q),)))
    tc_lo = store.interval(tc_q)[0]
    if tc_lo > 1:
        need = math.ceil((tc_lo + 1) / 2)
        changed |= store.tighten(cat_q, lo=need, prov=Prov(
            "R16", f"cat({x}) >= {need} from TC({x}) >= {fmt(tc_lo)}",
            (store.fact_prov(tc_q),)))
    return changed


def _r17(store: FactStore, x: str) -> bool:
    changed = False
    cat_q, tc_q = Quantity("cat", x), Quantity("TC", x)
    have_cat = cat_q in store._intervals
    have_tc = tc_q in store._intervals
    contractible = store.get_attr(x, "contractible")
    if contractible is True:
        for q in (cat_q, tc_q):
            changed |= store.tighten(q, hi=1, prov=Prov(
                "R17", f"{q} = 1: the space is contractible",
                tuple(p for p in (store.attr_prov(x, "contractible"),) if p)))
    elif contractible is False:
        for q, have in ((cat_q, have_cat), (tc_q, have_tc)):
            changed |= store.tighten(q, lo=2, prov=Prov(
                "R17", f"{q} >= 2: the space is not contractible",
                tuple(p for p in (store.attr_prov(x, "contractible"),) if p)))
    if contractible is None:
        for q, have in ((cat_q, have_cat), (tc_q, have_tc)):
            if not have:
                continue
            lo, hi = store.interval(q)
            if hi <= 1:
                changed |= store.set_attr(x, "contractible", True, Prov(
                    "R17", f"{x} is contractible: {q} = 1", (store.fact_prov(q),)))
            elif lo >= 2:
                changed |= store.set_attr(x, "contractible", False, Prov(
                    "R17", f"{x} is not contractible: {q} >= 2", (store.fact_prov(q),)))
    return changed


def _r18(store: FactStore) -> bool:
    changed = False
    spaces = set(store.space_subjects())
    for m in store.map_subjects():
        info = store.map_info(m)
        if info is not None:
            spaces.add(info[2])
    for x in spaces:
        if not _guarded_attr(store, x, "hausdorff"):
            continue
        fpp = store.get_attr(x, "FPP")
        if fpp is True:
            for m in store.map_subjects():
                info = store.map_info(m)
                if info is None or info[2] != x or info[1] != 1 or info[0] < 2:
                    continue
                cat_lo = store.interval(Quantity("cat", x))[0]
                lo = max(2, cat_lo)
                changed |= store.tighten(Quantity("TCmap", m), lo=lo, prov=Prov(
                    "R18", f"TC({m}) >= max(cat({x}), 2) = {fmt(lo)} under the "
                           "fixed point property",
                    tuple(p for p in (store.attr_prov(x, "FPP"),
                                      store.fact_prov(Quantity("cat", x))) if p)))
        pi21 = pi_subject(2, 1, x)
        tc_map = Quantity("TCmap", pi21)
        if tc_map in store._intervals:
            tc_lo, tc_hi = store.interval(tc_map)
            tcx_lo = store.interval(Quantity("TC", x))[0] \
                if Quantity("TC", x) in store._intervals else 1
            f2 = conf_space(x, 2)
            tcf_hi = store.interval(Quantity("TC", f2))[1] \
                if Quantity("TC", f2) in store._intervals else INF
            fired = None
            if tc_hi < tcx_lo:
                fired = f"TC({pi21}) < TC({x})"
                premises = (store.fact_prov(tc_map), store.fact_prov(Quantity("TC", x)))
            elif tc_lo > tcf_hi:
                fired = f"TC({pi21}) > TC({f2})"
                premises = (store.fact_prov(tc_map), store.fact_prov(Quantity("TC", f2)))
            if fired:
                changed |= store.tighten(Quantity("sec", pi21), lo=2, hi=2, prov=Prov(
                    "R18", f"sec({pi21}) = 2: {fired} breaks the section inequalities",
                    premises))
                if store.get_attr(x, "FPP") is None:
                    changed |= store.set_attr(x, "FPP", True, Prov(
                        "R18", f"FPP({x}): {fired}", premises))
        if store.get_attr(x, "contractible") is False and fpp is False:
            f2 = conf_space(x, 2)
            if store.get_attr(f2, "contractible") is None:
                changed |= store.set_attr(f2, "contractible", False, Prov(
                    "R18", f"{f2} is not contractible: {x} is not contractible and "
                           "lacks the fixed point property",
                    tuple(p for p in (store.attr_prov(x, "contractible"),
                                      store.attr_prov(x, "FPP")) if p)))
    return changed


def _sphere_dim(store: FactStore, space: str) -> int | None:
    d = store.get_attr(space, "sphere_dim")
    return d if isinstance(d, int) else None


def _r19(store: FactStore, m: str) -> bool:
    info = store.map_info(m)
    if info is None:
        return False
    k, r, space = info
    d = _sphere_dim(store, space)
    if d is None or d % 2 != 0 or k <= 2 or r not in (1, 2):
        return False
    prov = Prov("R19", f"sec({m}) = 2 on an even sphere (k > 2, r in {{1, 2}}): no "
                       "global section exists and two categorical pieces suffice",
                tuple(p for p in (store.attr_prov(space, "sphere_dim"),) if p))
    changed = store.tighten(Quantity("sec", m), lo=2, hi=2, prov=prov)
    changed |= store.tighten(Quantity("cat", conf_space(space, r)), lo=2, hi=2, prov=Prov(
        "R19", f"cat(F({space},{r})) = 2 (even sphere)",
        tuple(p for p in (store.attr_prov(space, "sphere_dim"),) if p)))
    return changed


def _r20(store: FactStore, m: str) -> bool:
    info = store.map_info(m)
    if info is None:
        return False
    k, r, space = info
    changed = False
    if r == 1 and k >= 2 and _guarded_attr(store, space, "odd_dim_diff_manifold"):
        changed |= store.tighten(Quantity("sec", m), lo=1, hi=1, prov=Prov(
            "R20", f"sec({m}) = 1: an odd-dimensional differentiable manifold "
                   "admits a global section for every k",
            tuple(p for p in (store.attr_prov(space, "odd_dim_diff_manifold"),) if p)))
    d = _sphere_dim(store, space)
    if d is not None and d % 2 == 1 and r in (1, 2):
        changed |= store.tighten(Quantity("sec", m), lo=1, hi=1, prov=Prov(
            "R20", f"sec({m}) = 1 on an odd sphere (r in {{1, 2}})",
            tuple(p for p in (store.attr_prov(space, "sphere_dim"),) if p)))
    return changed


def _r21(store: FactStore) -> bool:
    changed = False
    pairs: list[tuple[str, str]] = []
    for (subject, name), state in list(store._attrs.items()):
        if name == "deformation_retract_of" and isinstance(state.value, str):
            pairs.append((subject, state.value))
    if not pairs:
        return False
    ks: dict[str, set[int]] = {}
    for m in store.map_subjects():
        info = store.map_info(m)
        if info is not None and info[1] == 1:
            ks.setdefault(info[2], set()).add(info[0])
    for L, X in pairs:
        for k in sorted(ks.get(L, set()) | ks.get(X, set())):
            changed |= _le(store, Quantity("secat", pi_subject(k, 1, X)),
                           Quantity("secat", pi_subject(k, 1, L)), "R21",
                           f"{L} is a deformation retract of {X}: sections over the "
                           "retract extend")
    return changed


def _r22(store: FactStore, m: str) -> bool:
    info = store.map_info(m)
    if info is None:
        return False
    k, r, space = info
    if r != 1:
        return False
    has_field = _guarded_attr(store, space, "nonvanishing_vf")
    has_betti = _guarded_attr(store, space, "compact_b1_nonzero")
    if not (has_field or has_betti):
        return False
    why = "a non-vanishing vector field" if has_field else \
        "a nonzero first Betti number (compact case)"
    prov_attr = store.attr_prov(space, "nonvanishing_vf" if has_field
                                else "compact_b1_nonzero")
    return store.tighten(Quantity("sec", m), lo=1, hi=1, prov=Prov(
        "R22", f"sec({m}) = 1: {space} admits {why}, so distinct nearby companions "
               "follow every point", tuple(p for p in (prov_attr,) if p)))


def _r23(store: FactStore) -> bool:
    changed = False
    for m in store.map_subjects():
        sec_q = Quantity("sec", m)
        if sec_q in store._intervals and store.interval(sec_q)[1] <= 1 \
                and store.get_attr(m, "has_section") is None:
            changed |= store.set_attr(m, "has_section", True, Prov(
                "R23", f"{m} admits a global section: sec({m}) = 1",
                (store.fact_prov(sec_q),)))
        if _guarded_attr(store, m, "has_section"):
            changed |= store.tighten(sec_q, hi=1, prov=Prov(
                "R23", f"sec({m}) = 1: a global section is declared",
                tuple(p for p in (store.attr_prov(m, "has_section"),) if p)))
    for g in store.space_subjects():
        if not _guarded_attr(store, g, "lie_group"):
            continue
        lie_prov = store.attr_prov(g, "lie_group")
        if Quantity("TC", g) in store._intervals or Quantity("cat", g) in store._intervals:
            changed |= _eq(store, Quantity("TC", g), Quantity("cat", g), "R23",
                           "for a connected Lie group TC equals cat")
        for m in store.map_subjects():
            info = store.map_info(m)
            if info is None or info[2] != g or info[1] != 1:
                continue
            changed |= store.tighten(Quantity("sec", m), lo=1, hi=1, prov=Prov(
                "R23", f"sec({m}) = 1: translations by distinct group elements "
                       "give a global section",
                tuple(p for p in (lie_prov,) if p)))
            if store.get_attr(m, "fibration") is None:
                changed |= store.set_attr(m, "fibration", True, Prov(
                    "R23", f"{m} is a trivial bundle over the group",
                    tuple(p for p in (lie_prov,) if p)))
    for x in store.space_subjects():
        pi21 = pi_subject(2, 1, x)
        if not _guarded_attr(store, pi21, "nullhomotopic"):
            continue
        if not (_guarded_attr(store, x, "path_connected_CW")
                and store.get_attr(x, "contractible") is False):
            continue
        premises = tuple(p for p in (store.attr_prov(pi21, "nullhomotopic"),
                                     store.attr_prov(x, "contractible")) if p)
        changed |= store.tighten(Quantity("cat", x), lo=2, hi=2, prov=Prov(
            "R23", f"cat({x}) = 2: the complement of a point is contractible in {x}",
            premises))
        changed |= store.tighten(Quantity("TC", x), lo=2, hi=3, prov=Prov(
            "R23", f"TC({x}) in [2, 3] for a non-contractible space with "
                   "nullhomotopic pair projection", premises))
        for kind in ("sec", "secat"):
            changed |= store.tighten(Quantity(kind, pi21), lo=2, hi=2, prov=Prov(
                "R23", f"{kind}({pi21}) = 2 in the nullhomotopic non-contractible case",
                premises))
    return changed


def load_rules() -> list[Rule]:
    """The fixed rule set (exactly 23 top-level rules)."""
    return [
        Rule("R1", "secat(p) <= sec(p)", "always", _map_rule(_r1)),
        Rule("R2", "sec(p) = secat(p) for fibrations", "fibration", _map_rule(_r2)),
        Rule("R3", "sec(p) >= k + 1 from a k-class product certificate",
             "cup_length attribute", _map_rule(_r3)),
        Rule("R4", "secat(p) <= cat(B); sec(p) <= cat(B) for fibrations",
             "codomain known", _map_rule(_r4)),
        Rule("R5", "secat(p) = cat(B) for nullhomotopic p", "nullhomotopic",
             _map_rule(_r5)),
        Rule("R6", "sec(pi(k,1,X)) <= k", "X Hausdorff, k >= 2", _map_rule(_r6)),
        Rule("R7", "sec(pi(k,r,X)) <= C(k,r)", "X Hausdorff, k > r >= 1",
             _map_rule(_r7)),
        Rule("R8", "sec(pi(k,r,M)) <= cat(F(M,r))",
             "M connected boundaryless manifold, dim >= 2", _map_rule(_r8)),
        Rule("R9", "FPP(X) iff sec(pi(2,1,X)) = 2", "X Hausdorff", _r9_rule),
        Rule("R10", "sec(pi(k,1,X)) = 1 implies sec(pi(r,1,X)) = 1 for r <= k",
             "always", _r10),
        Rule("R11", "TC(p) >= max(cat(B), sec(p))", "always", _map_rule(_r11)),
        Rule("R12", "TC(B) <= TC(p) <= TC(E) when p has a section", "has_section",
             _map_rule(_r12)),
        Rule("R13", "TC(p' p) <= TC(p') for a fibration p; TC(p) <= TC(B)",
             "fibration", _map_rule(_r13)),
        Rule("R14", "TC(p) = TC(B) for a fibration with a section; = 1 iff B "
             "contractible", "fibration and has_section", _map_rule(_r14)),
        Rule("R15", "cat(B) <= TC(p) <= min(cat(E)(1 + sec(p)) - 1, TC(B), "
             "cat(E x B)) for ANR fibrations", "fibration, ANR spaces",
             _map_rule(_r15)),
        Rule("R16", "cat(X) <= TC(X) <= 2 cat(X) - 1", "path-connected CW",
             _space_rule(_r16)),
        Rule("R17", "cat(X) = 1 iff X contractible; TC(X) = 1 iff X contractible",
             "always", _space_rule(_r17)),
        Rule("R18", "fixed-point consequences for TC of the projections",
             "X Hausdorff", _r18),
        Rule("R19", "sec(pi(k,r,S^d)) = cat(F(S^d,r)) = 2 for even d, k > 2, "
             "r in {1, 2}", "even sphere", _map_rule(_r19)),
        Rule("R20", "sec = 1 for odd-dimensional manifolds (r = 1) and odd "
             "spheres (r in {1, 2})", "odd dimension", _map_rule(_r20)),
        Rule("R21", "secat(pi(k,1,L)) >= secat(pi(k,1,X)) for a deformation "
             "retract L of X", "declared retract pairs", _r21),
        Rule("R22", "sec(pi(k,1,M)) = 1 given a non-vanishing vector field (or "
             "nonzero first Betti number, compact case)", "vector-field flags",
             _map_rule(_r22)),
        Rule("R23", "section bookkeeping: sec = 1 iff a global section; Lie "
             "group equalities; the nullhomotopic non-contractible case",
             "varies by clause", _r23),
    ]


# ---------------------------------------------------------------------------
# Front-end helpers


def propagate(
    facts: Iterable[Fact] = (),
    attributes: Mapping[str, Mapping[str, Any] | Sequence[str]] | None = None,
    use_presets: bool = True,
    rules: list[Rule] | None = None,
) -> FactStore:
    """Build a store from axioms plus attribute declarations and run to fixpoint.

    ``attributes`` maps a subject to either a list of flags (all true) or a
    name -> value mapping.
    """
    store = FactStore(rules=rules, use_presets=use_presets)
    if attributes:
        for subject, decl in attributes.items():
            if isinstance(decl, Mapping):
                items = decl.items()
            else:
                items = ((name, True) for name in decl)
            for name, value in items:
                store.set_attr(subject, name, value)
    for f in facts:
        store.assert_fact(f)
    store.propagate()
    return store


def facts_from_json(data: Mapping[str, Any]) -> tuple[list[Fact], dict[str, Any], bool]:
    """Parse the facts-file format: axioms, attributes, and a presets switch."""
    facts: list[Fact] = []
    for entry in data.get("axioms", []):
        q = entry["q"]
        if "eq" in entry:
            facts.append(eq_fact(q, entry["eq"], entry.get("label", "axiom")))
        else:
            lo = entry.get("lo", 1)
            hi = entry.get("hi", INF)
            hi = INF if hi in (None, "inf") else hi
            facts.append(fact(q, lo, hi, entry.get("label", "axiom")))
    attributes = data.get("attributes", {})
    use_presets = bool(data.get("presets", True))
    return facts, attributes, use_presets
