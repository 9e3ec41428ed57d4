"""Minimal-sup-norm extension of restricted sections.

Given a quotient metric h on O(1), a subvariety Y, and a restricted
degree-1 section l (by a representative), the engine computes for each
degree n the minimal degree-n sup norm of a section restricting to
l^n on Y, as an exact ratio a_n-exponential

    ratio_n = min { ||s||_{h^n} : s|_Y = l^n } / ||l||_{Y,h}^n  >=  1.

It also checks sub-additivity of the ratios, estimates the obstruction
index (the Fekete limit of ratio_n^{1/n}), runs the trivial-valuation
algorithm through a Laurent-field scalar extension, and decides the
e^{n*eps} extension bound exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath

from . import linalg
from .fields import LaurentRationals, Magnitude, RationalFunction, ValuedField, choose_laurent_base
from .metrics import QuotientMetric
from .sections import Section, Subvariety, evaluation_matrix, monomial_basis, restriction_kernel
from .spaces import (NormedSpace, PreconditionError, distance_to_subspace,
                     orthogonalize_flag, scalar_extension)


class DegreeTooSmall(PreconditionError):
    """The restricted section does not extend at this degree."""


@dataclass
class ExtensionProblem:
    metric: QuotientMetric
    Y: Subvariety
    representative: Section  # degree-1 section restricting to l

    def __post_init__(self):
        if self.representative.degree != 1:
            raise PreconditionError("representative must have degree 1")
        if self.representative.num_vars != self.metric.num_vars:
            raise PreconditionError("representative/metric dimension mismatch")
        self._restricted_norm: Optional[Magnitude] = None
        self._ratio_cache: Dict[int, Magnitude] = {}

    @property
    def field(self) -> ValuedField:
        return self.metric.field

    def restricted_norm(self) -> Magnitude:
        """||l||_{Y,h}; must be positive (l nonzero on Y)."""
        if self._restricted_norm is None:
            val = self.metric.restricted_sup_norm(self.representative, self.Y)
            if val.is_zero:
                raise PreconditionError("restricted section vanishes on Y")
            self._restricted_norm = val
        return self._restricted_norm


def _initial_extension(P: ExtensionProblem, n: int) -> List:
    """Coefficient vector of one degree-n section restricting to l^n."""
    field = P.field
    target = P.representative ** n
    if P.Y.kind == "linear":
        return target.to_vector()
    rows = evaluation_matrix(P.Y, n)
    values = [target.evaluate(pt) for pt in P.Y.points]
    sol = linalg.solve(rows, values)
    if sol is None:
        raise DegreeTooSmall(f"l^{n} does not extend at degree {n}")
    return sol


def min_norm_lift(P: ExtensionProblem, n: int) -> Tuple[Section, Magnitude]:
    """The minimal-norm degree-n extension of l^n and the exact ratio
    ||s||_{h^n} / ||l||_{Y,h}^n."""
    if n < 1:
        raise PreconditionError("degree must be >= 1")
    field = P.field
    s0 = _initial_extension(P, n)
    ker = restriction_kernel(P.Y, n)
    N = P.metric.gauss_space(n)
    dist, minimizer = distance_to_subspace(N, s0, ker)
    vec = [a - b for a, b in zip(s0, minimizer)]
    s = Section.from_vector(field, P.metric.m, n, vec)
    ratio = dist / P.restricted_norm() ** n
    P._ratio_cache[n] = ratio
    return s, ratio


def ratio_sequence(P: ExtensionProblem, n_max: int) -> List[Magnitude]:
    out = []
    for n in range(1, n_max + 1):
        if n in P._ratio_cache:
            out.append(P._ratio_cache[n])
        else:
            out.append(min_norm_lift(P, n)[1])
    return out


def subadditivity_check(P: ExtensionProblem, n_max: int) -> List[tuple]:
    """Violations of ratio_{m+n} <= ratio_m * ratio_n for m+n <= n_max
    (expected: none)."""
    ratios = ratio_sequence(P, n_max)
    violations = []
    for m in range(1, n_max):
        for n in range(m, n_max - m + 1):
            if ratios[m + n - 1] > ratios[m - 1] * ratios[n - 1]:
                violations.append((m, n, ratios[m - 1], ratios[n - 1],
                                   ratios[m + n - 1]))
    return violations


def lambda_estimate(P: ExtensionProblem, n_max: int) -> Tuple[
        List[Magnitude], List[Tuple[Magnitude, int]]]:
    """Per-degree ratios and the running minimum of ratio_n^{1/n}
    (symbolic (ratio, n) pairs, compared exactly via cross powers);
    the final entry exponentiates an upper bound for the obstruction
    index."""
    ratios = ratio_sequence(P, n_max)
    running: List[Tuple[Magnitude, int]] = []
    best: Optional[Tuple[Magnitude, int]] = None
    for n, r in enumerate(ratios, start=1):
        if best is None or r ** best[1] < best[0] ** n:
            best = (r, n)
        running.append(best)
    return ratios, running


def extend_trivial_via_laurent(P: ExtensionProblem, n: int) -> Tuple[Section, Magnitude]:
    """The trivial-valuation extension algorithm routed through a Laurent
    scalar extension.

    (i) collect the finite value set of the degree-n norm, (ii) choose a
    base prime avoiding multiplicative relations, (iii) extend scalars,
    (iv) minimize the norm over the extension, (v) expand the result in
    an orthogonal basis whose initial segment spans the restriction
    kernel, drop the kernel coordinates, verify the rest are constants
    (T-free), and assemble the answer over the base field.
    """
    field = P.field
    if field.kind != "trivial":
        raise PreconditionError("Laurent-path extension requires the trivial valuation")
    if n == 0:
        one = Section.monomial(field, (0,) * P.metric.num_vars)
        return one, field.one_magnitude()
    N = P.metric.gauss_space(n)
    values = N.norm_value_set()
    prime = choose_laurent_base(values)
    ext_field = LaurentRationals(prime)
    NL = scalar_extension(N, ext_field)

    s0 = _initial_extension(P, n)
    ker = restriction_kernel(P.Y, n)
    s0_L = [RationalFunction.constant(x) for x in s0]
    ker_L = [[RationalFunction.constant(x) for x in v] for v in ker]
    dist, minimizer = distance_to_subspace(NL, s0_L, ker_L)
    s_prime = [a - b for a, b in zip(s0_L, minimizer)]

    # orthogonal basis of the base space adapted to the kernel (kernel first)
    flag: List[list] = [list(v) for v in ker]
    dim = N.dim
    for j in range(dim):
        e = [field.one() if i == j else field.zero() for i in range(dim)]
        if linalg.rank(flag + [e]) > len(flag):
            flag.append(e)
            if len(flag) == dim:
                break
    g, g_norms, _ = orthogonalize_flag(N, flag)
    d = len(ker)
    # expand s' in the g basis over the extension
    g_matrix_L = [[RationalFunction.constant(g[j][i]) for j in range(dim)]
                  for i in range(dim)]
    coords = linalg.mat_vec(linalg.invert(g_matrix_L), s_prime)
    vec = [field.zero()] * dim
    for i in range(d, dim):
        c = coords[i]
        if c.is_zero:
            continue
        if not c.is_constant():
            raise PreconditionError(
                f"non-constant coefficient {c!r} outside the kernel "
                "(violates the descent property)")
        cv = c.constant_value()
        vec = [a + cv * b for a, b in zip(vec, g[i])]
    s = Section.from_vector(field, P.metric.m, n, vec)
    ratio = N.norm(vec) / P.restricted_norm() ** n
    return s, ratio


def _exceeds_exp(value: Fraction, bound: Fraction) -> bool:
    """Exact decision of value > e^bound for positive rational value and
    rational bound; never ambiguous since log(value) = bound has no
    solution with both rational and nonzero."""
    if value <= 0:
        raise PreconditionError("value must be positive")
    if bound == 0:
        return value > 1
    if value == 1:
        return bound < 0
    prec = 64
    while True:
        with mpmath.workprec(prec):
            lhs = (mpmath.log(value.numerator) - mpmath.log(value.denominator))
            gap = lhs - mpmath.mpf(bound.numerator) / bound.denominator
            err = mpmath.mpf(2) ** (8 - prec) * (abs(lhs) + abs(gap) + 1)
            if abs(gap) > err:
                return gap > 0
        prec *= 2
        if prec > 1 << 16:
            raise RuntimeError("could not separate log(value) from bound")


def check_extension_theorem(P: ExtensionProblem, epsilon: Fraction,
                            n_max: int) -> dict:
    """Per-degree report of ratio_n <= e^{n*epsilon} and the first n0
    such that the bound holds for every n in [n0, n_max]."""
    if epsilon < 0:
        raise PreconditionError("epsilon must be non-negative")
    ratios = ratio_sequence(P, n_max)
    ok = []
    for n, r in enumerate(ratios, start=1):
        ok.append(not _exceeds_exp(r.value(), Fraction(n) * epsilon))
    n0 = None
    for n in range(1, n_max + 1):
        if all(ok[n - 1:]):
            n0 = n
            break
    return {"ratios": ratios, "holds": ok, "first_n0": n0}
