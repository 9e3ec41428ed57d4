"""Quotient metrics on O(1) over projective space and their diagnostics.

A metric is induced by a normed space on the degree-1 sections: at each
rational point the fiber carries the quotient norm.  Pointwise values
come from an exact closed formula; sup norms are weighted Gauss norms
after an exact change of variables into the orthogonal basis.  The sigma
and mu diagnostics compare those against an independently computed
quotient (coset-minimization) metric.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import product as iter_product
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .fields import FieldElement, Magnitude, ValuedField, magnitude_max
from .sections import (Exponent, Section, Subvariety, monomial_basis,
                       normalize_point)
from .spaces import (NormedSpace, PreconditionError, distance_to_subspace,
                     orthogonalize_flag)


def _is_zero_elem(x) -> bool:
    if isinstance(x, (int, Fraction)):
        return x == 0
    return x.is_zero


@dataclass
class QuotientMetric:
    """Metric on O(1) over P^m induced by a norm on its global sections.

    ``base`` lives on the (m+1)-dimensional space of linear forms, in
    coordinates of the degree-1 monomial basis x_0, ..., x_m.
    """

    base: NormedSpace

    def __post_init__(self):
        self._subst: Optional[List[Section]] = None
        self._gauss_cache: Dict[int, NormedSpace] = {}
        self._frame_cache: Dict[int, List[Section]] = {}

    @property
    def field(self) -> ValuedField:
        return self.base.field

    @property
    def num_vars(self) -> int:
        return self.base.dim

    @property
    def m(self) -> int:
        return self.base.dim - 1

    # -- the orthogonal frame as linear forms ------------------------------

    def frame_forms(self) -> List[Section]:
        """The orthogonal basis vectors of ``base`` as degree-1 sections."""
        if 1 not in self._frame_cache:
            nv = self.num_vars
            self._frame_cache[1] = [
                Section(self.field, nv, 1,
                        {tuple(1 if j == k else 0 for k in range(nv)):
                         self.base.basis[j][i]
                         for j in range(nv)})
                for i in range(nv)
            ]
        return self._frame_cache[1]

    def substitution(self) -> List[Section]:
        """Degree-1 sections u_i -> expression of x_j in the frame
        coordinates: x = (B^T)^{-1} u where columns of B are the frame."""
        if self._subst is None:
            inv_t = linalg.invert(linalg.transpose(self.base.basis))
            nv = self.num_vars
            self._subst = [
                Section(self.field, nv, 1,
                        {tuple(1 if k == i else 0 for k in range(nv)):
                         inv_t[j][i]
                         for i in range(nv)})
                for j in range(nv)
            ]
        return self._subst

    def to_frame_coordinates(self, s: Section) -> Section:
        """Rewrite s as a polynomial in the frame linear forms: returns a
        section whose variables are the frame coordinates u_i."""
        subst = self.substitution()
        nv = self.num_vars
        powers: List[List[Section]] = [[Section.monomial(self.field, (0,) * nv)]
                                       for _ in range(nv)]
        out = Section.zero(self.field, nv, s.degree)
        for e, c in s.coeffs.items():
            term = Section.monomial(self.field, (0,) * nv, c)
            for j, k in enumerate(e):
                while len(powers[j]) <= k:
                    powers[j].append(powers[j][-1] * subst[j])
                term = term * powers[j][k]
            out = out + term
        return out

    # -- pointwise metric ---------------------------------------------------

    def local_frame_value(self, point: Sequence) -> Magnitude:
        """D(x) = max_i |e_i(x~)| / ||e_i|| at the normalized representative;
        the degree-1 metric is |s|_h(x) = |s(x~)| / D(x)."""
        pt = normalize_point(self.field, point)
        best = self.field.zero_magnitude()
        for form, w in zip(self.frame_forms(), self.base.weights):
            val = form.evaluate(pt)
            if _is_zero_elem(val):
                continue
            mag = self.field.abs(val) / w
            if mag > best:
                best = mag
        return best

    def point_metric(self, s: Section, point: Sequence) -> Magnitude:
        """|s|_{h^n}(x) for a degree-n section s at a rational point."""
        if s.num_vars != self.num_vars:
            raise PreconditionError("section/metric dimension mismatch")
        pt = normalize_point(self.field, point)
        value = s.evaluate(pt)
        if _is_zero_elem(value):
            return self.field.zero_magnitude()
        d = self.local_frame_value(pt)
        return self.field.abs(value) / d ** s.degree

    # -- sup norms (weighted Gauss) ------------------------------------------

    def sup_norm(self, s: Section) -> Magnitude:
        """Sup of |s|_{h^n} over the projective space: the weighted Gauss
        norm of s written in the orthogonal frame coordinates."""
        if s.is_zero:
            return self.field.zero_magnitude()
        u = self.to_frame_coordinates(s)
        best = self.field.zero_magnitude()
        for e, c in u.coeffs.items():
            mag = self.field.abs(c)
            for w, k in zip(self.base.weights, e):
                mag = mag * w ** k
            if mag > best:
                best = mag
        return best

    def gauss_space(self, n: int) -> NormedSpace:
        """The degree-n sup norm as a NormedSpace on the coefficient
        vectors over monomial_basis(m, n): orthogonal basis = products of
        frame forms, weights = products of frame weights."""
        if n not in self._gauss_cache:
            exps = monomial_basis(self.m, n)
            frame = self.frame_forms()
            cols = []
            weights = []
            pow_cache: List[List[Section]] = [
                [Section.monomial(self.field, (0,) * self.num_vars)]
                for _ in range(self.num_vars)]
            for e in exps:
                prod = Section.monomial(self.field, (0,) * self.num_vars)
                w = self.field.one_magnitude()
                for i, k in enumerate(e):
                    while len(pow_cache[i]) <= k:
                        pow_cache[i].append(pow_cache[i][-1] * frame[i])
                    prod = prod * pow_cache[i][k]
                    w = w * self.base.weights[i] ** k
                cols.append(prod.to_vector())
                weights.append(w)
            basis = [[cols[j][i] for j in range(len(cols))] for i in range(len(cols))]
            self._gauss_cache[n] = NormedSpace(self.field, basis, weights)
        return self._gauss_cache[n]

    # -- restricted sup norms -------------------------------------------------

    def restricted_sup_norm(self, s: Section, Y: Subvariety) -> Magnitude:
        """Sup of |s|_{h^n} over Y (finite point set or linear subspace)."""
        if Y.kind == "points":
            vals = [self.point_metric(s, pt) for pt in Y.points]
            return magnitude_max(vals) if vals else self.field.zero_magnitude()
        forms = Y.linear_forms
        k = len(forms)
        nv = self.num_vars
        # complete the forms (as vectors in the degree-1 space) to a flag
        flag: List[list] = [list(f) for f in forms]
        for j in range(nv):
            e = [self.field.one() if i == j else self.field.zero() for i in range(nv)]
            if linalg.rank(flag + [e]) > len(flag):
                flag.append(e)
                if len(flag) == nv:
                    break
        g, norms, _ = orthogonalize_flag(self.base, flag)
        # rewrite s in the g-coordinates: x = (G^T)^{-1} u
        g_matrix = [[g[j][i] for j in range(nv)] for i in range(nv)]  # columns g_j
        inv_t = linalg.invert(linalg.transpose(g_matrix))
        subst = [
            Section(self.field, nv, 1,
                    {tuple(1 if t == i else 0 for t in range(nv)): inv_t[j][i]
                     for i in range(nv)})
            for j in range(nv)
        ]
        powers: List[List[Section]] = [[Section.monomial(self.field, (0,) * nv)]
                                       for _ in range(nv)]
        u = Section.zero(self.field, nv, s.degree)
        for e, c in s.coeffs.items():
            term = Section.monomial(self.field, (0,) * nv, c)
            for j, kk in enumerate(e):
                while len(powers[j]) <= kk:
                    powers[j].append(powers[j][-1] * subst[j])
                term = term * powers[j][kk]
            u = u + term
        # on Y the first k frame coordinates vanish; Gauss norm of the rest
        best = self.field.zero_magnitude()
        for e, c in u.coeffs.items():
            if any(e[i] > 0 for i in range(k)):
                continue
            mag = self.field.abs(c)
            for i in range(k, nv):
                mag = mag * norms[i] ** e[i]
            if mag > best:
                best = mag
        return best


# ----------------------------------------------------------------------
# Independent quotient-metric evaluation and the sigma/mu diagnostics
# ----------------------------------------------------------------------


def _evaluation_row(field: ValuedField, m: int, n: int, point: Sequence) -> list:
    pt = normalize_point(field, point)
    row = []
    for e in monomial_basis(m, n):
        term = field.one()
        for x, k in zip(pt, e):
            for _ in range(k):
                term = term * x
        row.append(term)
    return row


def quotient_fiber_norm(N: NormedSpace, field: ValuedField, m: int, n: int,
                        point: Sequence) -> Magnitude:
    """|1|^quot at the point for the norm N on degree-n sections: the
    minimum of N over {s : s(x~) = 1}, computed by exact elimination
    (distance from one such s to the kernel of evaluation)."""
    row = _evaluation_row(field, m, n, point)
    # one solution of <row, s> = 1: scale the first nonzero entry
    s0 = [field.zero()] * len(row)
    for i, x in enumerate(row):
        if not _is_zero_elem(x):
            s0[i] = field.one() / x
            break
    else:
        raise PreconditionError("evaluation functional vanishes identically")
    ker = linalg.kernel_basis([row])
    dist, _ = distance_to_subspace(N, s0, ker)
    return dist


def metric_gap(N: NormedSpace, h: QuotientMetric, n: int, point: Sequence) -> Magnitude:
    """|.|^quot_{(R_n, N)}(x) / |.|_{h^n}(x) as an exact magnitude ratio."""
    field = h.field
    pt = normalize_point(field, point)
    quot_of_one = quotient_fiber_norm(N, field, h.m, n, pt)
    # the h^n fiber norm of the fiber element 1 is D(x)^{-n}
    d = h.local_frame_value(pt)
    return quot_of_one * d ** n


def sigma(h: QuotientMetric, n: int, point: Sequence) -> Magnitude:
    """The ratio |.|^quot_{h^n}(x) / |.|_{h^n}(x), always >= 1; equality
    (ratio exactly 1) is the semipositivity cross-check."""
    if n == 0:
        return h.field.one_magnitude()
    return metric_gap(h.gauss_space(n), h, n, point)


@dataclass
class MetricFamily:
    """Degree-indexed norms on the section spaces, submultiplicative."""

    field: ValuedField
    m: int
    norms: Dict[int, NormedSpace]

    def space(self, n: int) -> NormedSpace:
        if n not in self.norms:
            raise PreconditionError(f"family has no degree {n}")
        return self.norms[n]

    def check_submultiplicative(self, pairs: int = 20, seed: int = 0) -> bool:
        """Sample products of basis vectors across consecutive degrees and
        verify ||s t|| <= ||s|| ||t||."""
        import random
        rng = random.Random(seed)
        degrees = sorted(self.norms)
        count = 0
        for a in degrees:
            for b in degrees:
                if a + b not in self.norms:
                    continue
                Na, Nb, Nab = self.norms[a], self.norms[b], self.norms[a + b]
                for _ in range(3):
                    i = rng.randrange(Na.dim)
                    j = rng.randrange(Nb.dim)
                    sa = Section.from_vector(self.field, self.m, a, Na.column(i))
                    sb = Section.from_vector(self.field, self.m, b, Nb.column(j))
                    prod = sa * sb
                    if Nab.norm(prod.to_vector()) > Na.weights[i] * Nb.weights[j]:
                        return False
                    count += 1
                    if count >= pairs:
                        return True
        return True


def mu_estimate(F: MetricFamily, h_ref: QuotientMetric, point: Sequence,
                n_max: int) -> tuple[List[Magnitude], List[tuple[Magnitude, int]]]:
    """Per-degree gap ratios r_n and the running minimum of r_n^{1/n},
    kept symbolic as (r_n, n) pairs compared exactly via r_n^m vs r_m^n."""
    ratios: List[Magnitude] = []
    running: List[tuple[Magnitude, int]] = []
    best: Optional[tuple[Magnitude, int]] = None
    for n in range(1, n_max + 1):
        r = metric_gap(F.space(n), h_ref, n, point)
        ratios.append(r)
        if best is None or r ** best[1] < best[0] ** n:
            best = (r, n)
        running.append(best)
    return ratios, running


# ----------------------------------------------------------------------
# Gauss-norm attainment certificates
# ----------------------------------------------------------------------


def gauss_attainment_point(h: QuotientMetric, s: Section) -> List[Fraction]:
    """A rational point where |s|_{h^n}(x) equals the sup norm.

    Requires a p-adic field with p > deg(s) and a metric that is diagonal
    in the coordinates with weights that are powers of p.  The point is
    found by lifting a residue point where the (scaled) section does not
    vanish mod p; such a point exists because a nonzero polynomial of
    degree < p cannot vanish on all of P^m(F_p).
    """
    field = h.field
    if field.kind != "padic":
        raise PreconditionError("attainment certificates require a p-adic field")
    p = field.prime
    n = s.degree
    if p <= n:
        raise PreconditionError("need residue characteristic p > degree")
    nv = h.num_vars
    ident = [[field.one() if i == j else field.zero() for j in range(nv)]
             for i in range(nv)]
    if h.base.basis != ident:
        raise PreconditionError("attainment certificates require a diagonal metric")
    exps = []
    for w in h.base.weights:
        if w.q != 1:
            raise PreconditionError("weights must be powers of p")
        exps.append(-w.n)  # w = p^{-w.n} ... w = (1/p)^{w.n}, so w = p^{-w.n}
    # change of variables x_i -> p^{e_i} x_i turns the metric orthonormal
    scaled = {}
    for e, c in s.coeffs.items():
        factor = Fraction(p) ** (-sum(k * exps[i] for i, k in enumerate(e)))
        scaled[e] = c * factor
    t = Section(field, nv, n, scaled)
    gauss = magnitude_max(field.abs(c) for c in t.coeffs.values())
    # normalize t to unit Gauss norm: divide by a coefficient attaining it
    unit = None
    for c in t.coeffs.values():
        if field.abs(c) == gauss:
            unit = c
            break
    t = t.scale(field.one() / unit)
    # residues of the coefficients: all in Z_(p), at least one a unit
    def residue(x: Fraction) -> int:
        return (x.numerator * pow(x.denominator, -1, p)) % p

    for lead in range(nv):
        prefix = [0] * lead + [1]
        for tail in iter_product(range(p), repeat=nv - lead - 1):
            pt = prefix + list(tail)
            total = 0
            for e, c in t.coeffs.items():
                term = residue(c)
                for x, k in zip(pt, e):
                    term = term * pow(x, k, p) % p
                total = (total + term) % p
            if total % p != 0:
                lifted = [Fraction(x) * Fraction(p) ** (-exps[i])
                          for i, x in enumerate(pt)]
                return lifted
    raise PreconditionError("no residue point found (section vanishes mod p)")
