"""Checkable certificates for sectional lower bounds.

Two certificate families are supported.  A cup-length certificate names k
classes in a graded ring, asserts (as user input, recorded in provenance)
that they pull back to zero, and is accepted when their product is nonzero;
acceptance yields the lower bound sec >= k + 1.  An induced-map certificate
carries degree-indexed integer matrices of the homomorphism induced by the
pair projection and is accepted when some matrix has a nontrivial kernel
(pullback direction) or fails to be onto (pushforward direction); acceptance
pins sec of the pair projection to 2 and asserts the fixed point property.

Rings are validated on load: gradedness, associativity and graded
commutativity are checked exhaustively on basis triples.  Integer linear
algebra is exact (Smith normal form over Z, elimination over Z_p, fractions
over Q).
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Sequence


class RingError(ValueError):
    """Malformed ring data or failed structure checks."""


class ZeroClassError(ValueError):
    """A certificate class is zero in the ring."""


class ProductVanishesError(ValueError):
    """The cup product of the certificate classes vanishes."""

    def __init__(self, stage: int):
        super().__init__(f"product vanishes after multiplying class {stage}")
        self.stage = stage


class AllInjectiveError(ValueError):
    """Every supplied matrix is injective; the certificate proves nothing."""


class AllSurjectiveError(ValueError):
    """Every supplied matrix is surjective; the certificate proves nothing."""


# ---------------------------------------------------------------------------
# Coefficients

Coeff = int | Fraction


@dataclass(frozen=True)
class Coefficients:
    """Z, Z_p (p prime) or Q."""

    name: str  # "Z" | "Zp" | "Q"
    p: int | None = None

    def __post_init__(self) -> None:
        if self.name not in ("Z", "Zp", "Q"):
            raise RingError(f"unknown coefficient ring {self.name!r}")
        if self.name == "Zp":
            if self.p is None or self.p < 2:
                raise RingError("Z_p needs a modulus p >= 2")
        elif self.p is not None:
            raise RingError(f"{self.name} takes no modulus")

    def normalize(self, c: Any) -> Coeff:
        if self.name == "Zp":
            return int(c) % self.p  # type: ignore[operator]
        if self.name == "Q":
            return Fraction(c)
        return int(c)

    def add(self, a: Coeff, b: Coeff) -> Coeff:
        return self.normalize(a + b)

    def mul(self, a: Coeff, b: Coeff) -> Coeff:
        return self.normalize(a * b)

    def neg_one_pow(self, exponent: int) -> Coeff:
        return self.normalize(-1 if exponent % 2 else 1)

    @classmethod
    def parse(cls, text: str) -> "Coefficients":
        text = text.strip()
        if text in ("Z", "Q"):
            return cls(text)
        m = re.match(r"^Z[_/]?(\d+)$", text)
        if m:
            return cls("Zp", int(m.group(1)))
        raise RingError(f"cannot parse coefficient ring {text!r}")

    def __str__(self) -> str:
        return f"Z_{self.p}" if self.name == "Zp" else self.name


Element = dict[str, Coeff]  # basis name -> coefficient, zeros dropped


# ---------------------------------------------------------------------------
# Graded rings


class GradedRing:
    """Finite-basis graded ring given by structure constants.

    The product table maps ordered basis pairs to linear combinations.  Pairs
    absent from the table multiply to zero.  Validation checks that degrees
    add, that the table is graded-commutative, and that it is associative on
    every basis triple.
    """

    def __init__(
        self,
        name: str,
        coefficients: Coefficients,
        basis: Sequence[tuple[str, int]],
        table: Mapping[tuple[str, str], Sequence[tuple[Any, str]]],
    ):
        self.name = name
        self.coefficients = coefficients
        names = [b for b, _ in basis]
        if len(set(names)) != len(names):
            raise RingError("duplicate basis names")
        self.degrees = {b: int(d) for b, d in basis}
        self.basis = tuple(names)
        self.table: dict[tuple[str, str], Element] = {}
        for (a, b), combo in table.items():
            if a not in self.degrees or b not in self.degrees:
                raise RingError(f"table entry references unknown basis ({a}, {b})")
            elem: Element = {}
            for c, target in combo:
                if target not in self.degrees:
                    raise RingError(f"table target {target!r} is not a basis element")
                c = coefficients.normalize(c)
                if c != 0:
                    elem[target] = coefficients.add(elem.get(target, 0), c)
            elem = {k: v for k, v in elem.items() if v != 0}
            if elem:
                self.table[(a, b)] = elem
        self._symmetrize()
        self._check_graded()
        self._check_associative()

    # -- structure checks

    def _symmetrize(self) -> None:
        for (a, b) in list(self.table.keys()):
            sign = self.coefficients.neg_one_pow(self.degrees[a] * self.degrees[b])
            flipped = {k: self.coefficients.mul(sign, v) for k, v in self.table[(a, b)].items()}
            if (b, a) in self.table:
                if self.table[(b, a)] != flipped:
                    raise RingError(f"table is not graded-commutative at ({a}, {b})")
            elif a != b:
                self.table[(b, a)] = flipped
            else:
                if self.table[(a, b)] != flipped:
                    raise RingError(f"odd square of {a} must be 2-torsion")

    def _check_graded(self) -> None:
        for (a, b), elem in self.table.items():
            want = self.degrees[a] + self.degrees[b]
            for target in elem:
                if self.degrees[target] != want:
                    raise RingError(
                        f"product {a}*{b} lands in degree {self.degrees[target]}, "
                        f"expected {want}"
                    )

    def _check_associative(self) -> None:
        for a, b, c in itertools.product(self.basis, repeat=3):
            left = self.multiply(self.basis_element(a), self.basis_element(b))
            left = self.multiply(left, self.basis_element(c))
            right = self.multiply(self.basis_element(b), self.basis_element(c))
            right = self.multiply(self.basis_element(a), right)
            if left != right:
                raise RingError(f"table is not associative on ({a}, {b}, {c})")

    # -- elements

    def basis_element(self, name: str) -> Element:
        if name not in self.degrees:
            raise RingError(f"unknown basis element {name!r}")
        return {name: self.coefficients.normalize(1)}

    def element(self, combo: Mapping[str, Any]) -> Element:
        out: Element = {}
        for name, c in combo.items():
            if name not in self.degrees:
                raise RingError(f"unknown basis element {name!r}")
            c = self.coefficients.normalize(c)
            if c != 0:
                out[name] = c
        return out

    def is_zero(self, elem: Element) -> bool:
        return not elem

    def multiply(self, a: Element, b: Element) -> Element:
        out: Element = {}
        for na, ca in a.items():
            for nb, cb in b.items():
                combo = self.table.get((na, nb))
                if combo is None:
                    continue
                scale = self.coefficients.mul(ca, cb)
                if scale == 0:
                    continue
                for target, c in combo.items():
                    new = self.coefficients.add(out.get(target, 0),
                                                self.coefficients.mul(scale, c))
                    if new == 0:
                        out.pop(target, None)
                    else:
                        out[target] = new
        return out

    def format_element(self, elem: Element) -> str:
        if not elem:
            return "0"
        parts = []
        for name in self.basis:
            if name in elem:
                c = elem[name]
                parts.append(name if c == 1 else f"{c}*{name}")
        return " + ".join(parts)


def exterior_algebra(names: Sequence[str], degree: int = 1,
                     coefficients: str = "Z") -> GradedRing:
    """Exterior algebra on odd-degree generators, with unit and all monomials."""
    coeffs = Coefficients.parse(coefficients)
    if degree % 2 == 0 and coeffs.name != "Zp":
        raise RingError("exterior generators here must have odd degree")
    basis: list[tuple[str, int]] = [("1", 0)]
    monomials: dict[frozenset, str] = {frozenset(): "1"}
    for size in range(1, len(names) + 1):
        for subset in itertools.combinations(names, size):
            label = "".join(subset)
            basis.append((label, degree * size))
            monomials[frozenset(subset)] = label

    def sign_of_merge(left: Sequence[str], right: Sequence[str]) -> int:
        seq = list(left) + list(right)
        sign = 1
        order = {n: i for i, n in enumerate(names)}
        for i in range(len(seq)):
            for j in range(i + 1, len(seq)):
                if order[seq[i]] > order[seq[j]]:
                    sign = -sign
        return sign

    table: dict[tuple[str, str], list[tuple[int, str]]] = {}
    subsets = list(monomials.keys())
    for sa in subsets:
        for sb in subsets:
            if sa & sb:
                continue  # repeated generator: product is zero
            la = sorted(sa, key=names.index)
            lb = sorted(sb, key=names.index)
            target = monomials[sa | sb]
            table[(monomials[sa], monomials[sb])] = [(sign_of_merge(la, lb), target)]
    return GradedRing(f"Lambda({', '.join(names)})", coeffs, basis, table)


def truncated_polynomial(name: str, degree: int, truncation: int,
                         coefficients: str = "Z2") -> GradedRing:
    """R[a]/(a^truncation) with deg a = degree, monomial basis 1, a, ..."""
    coeffs = Coefficients.parse(coefficients)
    basis = [("1", 0)] + [
        (name if e == 1 else f"{name}^{e}", degree * e) for e in range(1, truncation)
    ]
    label = {0: "1", 1: name}
    for e in range(2, truncation):
        label[e] = f"{name}^{e}"
    table: dict[tuple[str, str], list[tuple[int, str]]] = {}
    for e1 in range(truncation):
        for e2 in range(truncation):
            if e1 + e2 < truncation:
                table[(label[e1], label[e2])] = [(1, label[e1 + e2])]
    return GradedRing(f"{coeffs}[{name}]/{name}^{truncation}", coeffs, basis, table)


# ---------------------------------------------------------------------------
# Exact integer linear algebra


def smith_normal_form(matrix: Sequence[Sequence[int]]) -> list[int]:
    """Nonnegative invariant factors of an integer matrix (zeros included)."""
    M = [list(map(int, row)) for row in matrix]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    factors: list[int] = []

    def nonzero_positions(top: int):
        return [(i, j) for i in range(top, rows) for j in range(top, cols) if M[i][j] != 0]

    t = 0
    while t < min(rows, cols):
        pos = nonzero_positions(t)
        if not pos:
            break
        while True:
            pos = nonzero_positions(t)
            if not pos:
                break
            i0, j0 = min(pos, key=lambda ij: abs(M[ij[0]][ij[1]]))
            M[t], M[i0] = M[i0], M[t]
            for row in M:
                row[t], row[j0] = row[j0], row[t]
            pivot = M[t][t]
            done = True
            for i in range(t + 1, rows):
                q = M[i][t] // pivot
                if q:
                    for j in range(cols):
                        M[i][j] -= q * M[t][j]
                if M[i][t]:
                    done = False
            for j in range(t + 1, cols):
                q = M[t][j] // pivot
                if q:
                    for i in range(rows):
                        M[i][j] -= q * M[i][t]
                if M[t][j]:
                    done = False
            if done:
                # pivot must divide the remaining block for true invariant factors
                offender = None
                for i in range(t + 1, rows):
                    for j in range(t + 1, cols):
                        if M[i][j] % pivot:
                            offender = (i, j)
                            break
                    if offender:
                        break
                if offender is None:
                    break
                oi, oj = offender
                for j in range(cols):
                    M[t][j] += M[oi][j]
        if M[t][t] == 0:
            break
        factors.append(abs(M[t][t]))
        t += 1
    while len(factors) < min(rows, cols):
        factors.append(0)
    return factors


def rank_over_q(matrix: Sequence[Sequence[int]]) -> int:
    M = [[Fraction(x) for x in row] for row in matrix]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    rank = 0
    for col in range(cols):
        pivot = next((i for i in range(rank, rows) if M[i][col] != 0), None)
        if pivot is None:
            continue
        M[rank], M[pivot] = M[pivot], M[rank]
        inv = 1 / M[rank][col]
        M[rank] = [x * inv for x in M[rank]]
        for i in range(rows):
            if i != rank and M[i][col] != 0:
                factor = M[i][col]
                M[i] = [a - factor * b for a, b in zip(M[i], M[rank])]
        rank += 1
        if rank == rows:
            break
    return rank


def rank_mod_p(matrix: Sequence[Sequence[int]], p: int) -> int:
    M = [[x % p for x in row] for row in matrix]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    rank = 0
    for col in range(cols):
        pivot = next((i for i in range(rank, rows) if M[i][col] % p), None)
        if pivot is None:
            continue
        M[rank], M[pivot] = M[pivot], M[rank]
        inv = pow(M[rank][col], -1, p)
        M[rank] = [(x * inv) % p for x in M[rank]]
        for i in range(rows):
            if i != rank and M[i][col]:
                factor = M[i][col]
                M[i] = [(a - factor * b) % p for a, b in zip(M[i], M[rank])]
        rank += 1
        if rank == rows:
            break
    return rank


@dataclass(frozen=True)
class IntMatrix:
    """rows x cols integer matrix of a homomorphism (codomain rank x domain rank)."""

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]
    mod: int | None = None  # None: map of free Z-modules; p: vector spaces over Z_p

    def __post_init__(self) -> None:
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise RingError("matrix shape mismatch")

    def injective(self) -> bool:
        if self.cols == 0:
            return True
        if self.rows == 0:
            return False
        if self.mod:
            return rank_mod_p(self.entries, self.mod) == self.cols
        return rank_over_q(self.entries) == self.cols

    def surjective(self) -> bool:
        if self.rows == 0:
            return True
        if self.cols == 0:
            return False
        if self.mod:
            return rank_mod_p(self.entries, self.mod) == self.rows
        factors = smith_normal_form(self.entries)
        nonzero = [f for f in factors if f != 0]
        return len(nonzero) >= self.rows and all(f == 1 for f in nonzero[: self.rows])


# ---------------------------------------------------------------------------
# Certificates


@dataclass(frozen=True)
class CupLengthCertificate:
    ring: GradedRing
    classes: tuple[Element, ...]
    map_id: str  # e.g. "pi(2,1,RP2)" or an abstract map name


@dataclass(frozen=True)
class InducedMapCertificate:
    map_id: str
    space_id: str
    direction: str  # "pullback_noninjective" | "pushforward_nonsurjective"
    matrices: Mapping[int, IntMatrix]  # degree -> matrix
    theory: str = "homotopy"  # "homotopy" | "homology" | "cohomology"


@dataclass(frozen=True)
class EmittedFact:
    quantity: str
    lo: int
    hi: int | None  # None encodes "no upper bound"
    provenance: str

    def to_json(self) -> dict:
        data: dict = {"q": self.quantity, "lo": self.lo, "provenance": self.provenance}
        if self.hi is not None:
            data["hi"] = self.hi
        return data


@dataclass(frozen=True)
class EmittedAttribute:
    subject: str
    name: str
    value: bool
    provenance: str

    def to_json(self) -> dict:
        return {
            "subject": self.subject,
            "attribute": self.name,
            "value": self.value,
            "provenance": self.provenance,
        }


@dataclass(frozen=True)
class CertificateVerdict:
    accepted: bool
    facts: tuple[EmittedFact, ...]
    attributes: tuple[EmittedAttribute, ...] = ()
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "accepted": self.accepted,
            "facts": [f.to_json() for f in self.facts],
            "attributes": [a.to_json() for a in self.attributes],
            "detail": self.detail,
        }


def verify_cup_certificate(cert: CupLengthCertificate) -> CertificateVerdict:
    """Accept iff the product of all classes is nonzero; yields sec >= k + 1.

    The vanishing of the pullbacks is an assertion supplied with the
    certificate, recorded in the provenance rather than computed.
    """
    ring = cert.ring
    for idx, cls in enumerate(cert.classes):
        if ring.is_zero(cls):
            raise ZeroClassError(f"class {idx + 1} is zero")
    product = cert.classes[0]
    for idx, cls in enumerate(cert.classes[1:], start=2):
        product = ring.multiply(product, cls)
        if ring.is_zero(product):
            raise ProductVanishesError(idx)
    k = len(cert.classes)
    fact = EmittedFact(
        quantity=f"sec({cert.map_id})",
        lo=k + 1,
        hi=None,
        provenance=(
            f"cup-length certificate, {k} classes in {ring.name} over "
            f"{ring.coefficients}; pullback vanishing asserted by the certificate"
        ),
    )
    return CertificateVerdict(True, (fact,),
                              detail=f"nonzero product {ring.format_element(product)}")


_PI21_RE = re.compile(r"^pi\(2,\s*1,\s*([A-Za-z0-9]+)\)$")


def verify_induced_certificate(cert: InducedMapCertificate) -> CertificateVerdict:
    """Accept a non-injective pullback or non-surjective pushforward in some degree.

    Acceptance pins sec of the pair projection to exactly 2 and (the space
    being Hausdorff) asserts the fixed point property.
    """
    if cert.direction not in ("pullback_noninjective", "pushforward_nonsurjective"):
        raise RingError(f"unknown direction {cert.direction!r}")
    if not cert.matrices:
        raise RingError("certificate carries no matrices")

    from . import bounds

    attrs = bounds.preset_attributes(cert.space_id)
    if attrs.get("hausdorff") is not True:
        raise RingError(
            f"space {cert.space_id} is not a known Hausdorff model; "
            "declare it via presets before certifying"
        )

    witness_degree = None
    for deg in sorted(cert.matrices):
        M = cert.matrices[deg]
        if cert.direction == "pullback_noninjective" and not M.injective():
            witness_degree = deg
            break
        if cert.direction == "pushforward_nonsurjective" and not M.surjective():
            witness_degree = deg
            break
    if witness_degree is None:
        if cert.direction == "pullback_noninjective":
            raise AllInjectiveError("every supplied matrix is injective")
        raise AllSurjectiveError("every supplied matrix is surjective")

    prov = (
        f"induced-map certificate ({cert.theory}, degree {witness_degree}, "
        f"{cert.direction}) for {cert.map_id}"
    )
    sec_fact = EmittedFact(quantity=f"sec({cert.map_id})", lo=2, hi=2, provenance=prov)
    attributes = (
        EmittedAttribute(cert.space_id, "FPP", True,
                         prov + "; fixed point property via the pair-projection "
                                "characterization"),
    )
    return CertificateVerdict(True, (sec_fact,), attributes,
                              detail=f"witness in degree {witness_degree}")


# ---------------------------------------------------------------------------
# JSON loading


def ring_from_json(data: dict) -> GradedRing:
    coeffs = data.get("coefficients", "Z")
    basis = [(b["name"], int(b["degree"])) for b in data["basis"]]
    table: dict[tuple[str, str], list[tuple[int, str]]] = {}
    for entry in data.get("products", []):
        key = (entry["a"], entry["b"])
        table[key] = [(c, name) for c, name in entry["result"]]
    return GradedRing(data.get("name", "ring"), Coefficients.parse(coeffs), basis, table)


def cup_certificate_from_json(data: dict) -> CupLengthCertificate:
    ring = ring_from_json(data["ring"])
    classes = tuple(ring.element(c) for c in data["classes"])
    return CupLengthCertificate(ring, classes, data["map"])


def induced_certificate_from_json(data: dict) -> InducedMapCertificate:
    map_id = data["map"]
    space_id = data.get("space")
    if space_id is None:
        m = _PI21_RE.match(map_id)
        if m is None:
            raise RingError("certificate needs a space id (or a pi(2,1,...) map id)")
        space_id = m.group(1)
    matrices = {}
    for entry in data["matrices"]:
        deg = int(entry["degree"])
        rows = int(entry["rows"])
        cols = int(entry["cols"])
        raw = entry.get("entries", [])
        if len(raw) != rows or any(len(r) != cols for r in raw):
            raise RingError(f"degree-{deg} matrix does not match its shape")
        matrices[deg] = IntMatrix(
            rows, cols,
            tuple(tuple(int(x) for x in r) for r in raw),
            mod=entry.get("mod"),
        )
    return InducedMapCertificate(
        map_id=map_id,
        space_id=space_id,
        direction=data["direction"],
        matrices=matrices,
        theory=data.get("theory", "homotopy"),
    )
