"""Homogeneous sections of O(n) on projective space, exactly.

A section is a homogeneous polynomial of degree n in m+1 variables with
coefficients in a valued field, stored sparsely as exponent-tuple ->
coefficient.  Subvarieties are finite rational point sets or linear
subspaces cut out by independent linear forms; restriction kernels are
computed by exact linear algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .fields import FieldElement, Magnitude, ValuedField
from .spaces import PreconditionError

Exponent = Tuple[int, ...]


def monomial_basis(m: int, n: int) -> List[Exponent]:
    """All degree-n exponent tuples in m+1 variables, graded-lex order
    (first variable's exponent decreasing first)."""
    if m < 0 or n < 0:
        raise PreconditionError("need m >= 0, n >= 0")
    out: List[Exponent] = []

    def rec(prefix: list, remaining_vars: int, remaining_deg: int):
        if remaining_vars == 1:
            out.append(tuple(prefix + [remaining_deg]))
            return
        for e in range(remaining_deg, -1, -1):
            rec(prefix + [e], remaining_vars - 1, remaining_deg - e)

    rec([], m + 1, n)
    return out


@dataclass
class Section:
    """A degree-n homogeneous polynomial over the field, sparse."""

    field: ValuedField
    num_vars: int
    degree: int
    coeffs: Dict[Exponent, FieldElement] = dc_field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for e, c in self.coeffs.items():
            e = tuple(int(x) for x in e)
            if len(e) != self.num_vars or sum(e) != self.degree or any(x < 0 for x in e):
                raise PreconditionError(f"bad exponent {e} for degree {self.degree}")
            if not _is_zero_elem(c):
                clean[e] = c
        self.coeffs = clean

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, field: ValuedField, num_vars: int, degree: int) -> "Section":
        return cls(field, num_vars, degree, {})

    @classmethod
    def monomial(cls, field: ValuedField, exponent: Sequence[int], coeff=1) -> "Section":
        e = tuple(int(x) for x in exponent)
        return cls(field, len(e), sum(e), {e: field.element(coeff)})

    @classmethod
    def from_vector(cls, field: ValuedField, m: int, n: int,
                    vec: Sequence[FieldElement]) -> "Section":
        basis = monomial_basis(m, n)
        return cls(field, m + 1, n, dict(zip(basis, vec)))

    def to_vector(self) -> List[FieldElement]:
        basis = monomial_basis(self.num_vars - 1, self.degree)
        zero = self.field.zero()
        return [self.coeffs.get(e, zero) for e in basis]

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    # -- algebra ----------------------------------------------------------

    def __add__(self, other: "Section") -> "Section":
        self._check(other, same_degree=True)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, self.field.zero()) + c
        return Section(self.field, self.num_vars, self.degree, out)

    def __sub__(self, other: "Section") -> "Section":
        self._check(other, same_degree=True)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, self.field.zero()) - c
        return Section(self.field, self.num_vars, self.degree, out)

    def scale(self, c) -> "Section":
        c = self.field.element(c)
        return Section(self.field, self.num_vars, self.degree,
                       {e: c * x for e, x in self.coeffs.items()})

    def __mul__(self, other: "Section") -> "Section":
        self._check(other, same_degree=False)
        out: Dict[Exponent, FieldElement] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 * c2
                if e in out:
                    out[e] = out[e] + prod
                else:
                    out[e] = prod
        return Section(self.field, self.num_vars, self.degree + other.degree, out)

    def __pow__(self, d: int) -> "Section":
        if d < 0:
            raise PreconditionError("negative section power")
        out = Section.monomial(self.field, (0,) * self.num_vars, 1)
        base = self
        while d:
            if d & 1:
                out = out * base
            base = base * base
            d >>= 1
        return out

    def _check(self, other: "Section", same_degree: bool):
        if self.field != other.field or self.num_vars != other.num_vars:
            raise PreconditionError("sections live in different rings")
        if same_degree and self.degree != other.degree:
            raise PreconditionError("degree mismatch")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Section):
            return NotImplemented
        return (self.field == other.field and self.num_vars == other.num_vars
                and self.degree == other.degree and self.coeffs == other.coeffs)

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, point: Sequence[FieldElement]) -> FieldElement:
        if len(point) != self.num_vars:
            raise PreconditionError("point dimension mismatch")
        total = self.field.zero()
        for e, c in self.coeffs.items():
            term = c
            for x, k in zip(point, e):
                for _ in range(k):
                    term = term * x
            total = total + term
        return total

    def __repr__(self) -> str:
        if self.is_zero:
            return "Section(0)"
        terms = []
        for e in sorted(self.coeffs, reverse=True):
            terms.append(f"{self.coeffs[e]}*x^{e}")
        return "Section(" + " + ".join(terms) + ")"


def _is_zero_elem(x) -> bool:
    if isinstance(x, (int, Fraction)):
        return x == 0
    return x.is_zero


# ----------------------------------------------------------------------
# Subvarieties: rational point sets and linear subspaces
# ----------------------------------------------------------------------


def normalize_point(field: ValuedField, coords: Sequence) -> List[FieldElement]:
    """Scale homogeneous coordinates so the first coordinate of maximal
    magnitude becomes exactly 1 (the canonical representative used in
    all metric formulas)."""
    pt = [field.element(x) for x in coords]
    best_i = None
    best: Optional[Magnitude] = None
    for i, x in enumerate(pt):
        m = field.abs(x)
        if m.is_zero:
            continue
        if best is None or m > best:
            best_i, best = i, m
    if best_i is None:
        raise PreconditionError("zero vector is not a projective point")
    pivot = pt[best_i]
    return [x / pivot for x in pt]


@dataclass
class Subvariety:
    """Either a finite set of rational points or a linear subspace.

    Exactly one of ``points`` (normalized homogeneous coordinates) and
    ``linear_forms`` (independent degree-1 sections, as coefficient
    vectors over the coordinates) is set.
    """

    field: ValuedField
    num_vars: int
    points: Optional[List[List[FieldElement]]] = None
    linear_forms: Optional[List[List[FieldElement]]] = None

    def __post_init__(self):
        if (self.points is None) == (self.linear_forms is None):
            raise PreconditionError("exactly one of points/linear_forms required")
        if self.points is not None:
            norm_pts = [normalize_point(self.field, p) for p in self.points]
            for i in range(len(norm_pts)):
                for j in range(i + 1, len(norm_pts)):
                    if norm_pts[i] == norm_pts[j]:
                        raise PreconditionError("points must be pairwise distinct")
            self.points = norm_pts
        else:
            forms = [[self.field.element(c) for c in f] for f in self.linear_forms]
            if any(len(f) != self.num_vars for f in forms):
                raise PreconditionError("linear form length mismatch")
            if linalg.rank(forms) != len(forms):
                raise PreconditionError("linear forms must be independent")
            self.linear_forms = forms

    @property
    def kind(self) -> str:
        return "points" if self.points is not None else "linear"


def evaluation_matrix(Y: Subvariety, n: int) -> List[list]:
    """Rows: points of Y; columns: degree-n monomials evaluated there."""
    assert Y.points is not None
    basis = monomial_basis(Y.num_vars - 1, n)
    rows = []
    for pt in Y.points:
        row = []
        for e in basis:
            term = Y.field.one()
            for x, k in zip(pt, e):
                for _ in range(k):
                    term = term * x
            row.append(term)
        rows.append(row)
    return rows


def restriction_kernel(Y: Subvariety, n: int) -> List[List[FieldElement]]:
    """Basis (coefficient vectors over monomial_basis) of the degree-n
    sections vanishing on Y."""
    if n < 0:
        raise PreconditionError("degree must be non-negative")
    m = Y.num_vars - 1
    if Y.kind == "points":
        return linalg.kernel_basis(evaluation_matrix(Y, n))
    # degree-n piece of the ideal: span of (form * degree-(n-1) monomials)
    if n == 0:
        return []
    basis_n = monomial_basis(m, n)
    index = {e: i for i, e in enumerate(basis_n)}
    vectors = []
    field = Y.field
    zero = field.zero()
    for form in Y.linear_forms:
        for e in monomial_basis(m, n - 1):
            vec = [zero] * len(basis_n)
            for var in range(m + 1):
                c = form[var]
                if _is_zero_elem(c):
                    continue
                e2 = list(e)
                e2[var] += 1
                vec[index[tuple(e2)]] = vec[index[tuple(e2)]] + c
            vectors.append(vec)
    # column-reduce to an independent basis (deterministic selection)
    out: List[List[FieldElement]] = []
    for v in vectors:
        if linalg.rank(out + [v]) > len(out):
            out.append(v)
    return out
