"""Finite-dimensional ultrametric normed spaces with orthogonal bases.

A norm is represented by an invertible matrix whose columns form an
orthogonal basis together with positive weights: for v with coordinates
a = basis^{-1} v, ``norm(v) = max_i |a_i| * w_i``.  Every operation here
(orthogonalizing a flag, distances to subspaces, quotient and dual
norms, scalar extension, unit-ball lattices) is carried out in exact
arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from . import linalg
from .fields import (FieldElement, Magnitude, RationalFunction, ValuedField,
                     magnitude_max)


class PreconditionError(ValueError):
    """A mathematical precondition of an operation was violated."""


def _elem_is_zero(x) -> bool:
    if isinstance(x, (int, Fraction)):
        return x == 0
    return x.is_zero


@dataclass
class NormedSpace:
    """Ultrametric norm given by an orthogonal basis with weights.

    ``basis`` is a square matrix (list of rows) over the field whose
    columns are the orthogonal vectors; ``weights[i]`` is the norm of
    column i.  The standard basis with unit weights gives the sup norm.
    """

    field: ValuedField
    basis: List[list]
    weights: List[Magnitude]

    def __post_init__(self):
        r = len(self.basis)
        if any(len(row) != r for row in self.basis):
            raise PreconditionError("basis matrix must be square")
        if len(self.weights) != r:
            raise PreconditionError("one weight per basis vector required")
        if any(w.is_zero for w in self.weights):
            raise PreconditionError("weights must be positive")
        self._inverse = None

    # -- constructors ----------------------------------------------------

    @classmethod
    def standard(cls, field: ValuedField, dim: int,
                 weights: Optional[Sequence[Magnitude]] = None) -> "NormedSpace":
        one, zero = field.one(), field.zero()
        basis = [[one if i == j else zero for j in range(dim)] for i in range(dim)]
        if weights is None:
            weights = [field.one_magnitude() for _ in range(dim)]
        return cls(field, basis, list(weights))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def basis_inverse(self) -> List[list]:
        if self._inverse is None:
            self._inverse = linalg.invert(self.basis)
        return self._inverse

    def column(self, i: int) -> list:
        return [row[i] for row in self.basis]

    def coordinates(self, v: Sequence) -> list:
        return linalg.mat_vec(self.basis_inverse(), list(v))

    def norm(self, v: Sequence) -> Magnitude:
        coords = self.coordinates(v)
        best = self.field.zero_magnitude()
        for a, w in zip(coords, self.weights):
            if _elem_is_zero(a):
                continue
            m = self.field.abs(a) * w
            if m > best:
                best = m
        return best

    # -- value set ---------------------------------------------------------

    def norm_value_set(self):
        """Exact description of {norm(v) : v != 0} / the norm values.

        Discrete case: one representative weight per coset modulo the
        value group rho^Z (the full value set is these cosets times
        rho^Z).  Trivial case: the finite set of attained values
        (weights, deduplicated), which with 0 is the whole value set.
        """
        if self.dim == 0:
            return [self.field.zero_magnitude()]
        if self.field.is_discrete_nontrivial:
            # canonical normalization already strips the residue prime
            # from q, so cosets agree exactly when the q parts agree
            reps: dict[Fraction, Magnitude] = {}
            for w in self.weights:
                reps.setdefault(w.q, w)
            return sorted(reps.values(), key=lambda m: (m.q, m.n))
        seen = [self.field.zero_magnitude()]
        for w in self.weights:
            if w not in seen:
                seen.append(w)
        return sorted(seen, key=lambda m: m.value())


# ----------------------------------------------------------------------
# Orthogonalization of compatible flags
# ----------------------------------------------------------------------


def orthogonalize_flag(space: NormedSpace, vectors: Sequence[Sequence]) -> tuple[
        List[list], List[Magnitude], List[int]]:
    """Orthogonalize vectors compatibly with the flag they generate.

    Given v_1, ..., v_t (linearly independent), returns vectors
    g_1, ..., g_t with span(g_1..g_i) = span(v_1..v_i) for each i, an
    orthogonal family for ``space``; also returns their norms and the
    pivot coordinate indices.  Raises PreconditionError on dependence.

    Each g_i differs from v_i by a combination of earlier v_j, so the
    flag is preserved; orthogonality holds because each g_i attains its
    norm on a pivot coordinate at which all later g_k vanish exactly and
    all earlier g_j (in any combination realizing the max) are dominated.
    """
    field = space.field
    t = len(vectors)
    # rows of `work` are the flag vectors in the orthogonal coordinates
    work = [space.coordinates(v) for v in vectors]
    dim = space.dim
    pivots: List[int] = []
    norms: List[Magnitude] = []
    for i in range(t):
        row = work[i]
        best_j = None
        best_val = field.zero_magnitude()
        for j in range(dim):
            if j in pivots or _elem_is_zero(row[j]):
                continue
            val = field.abs(row[j]) * space.weights[j]
            if best_j is None or val > best_val:
                best_j, best_val = j, val
        if best_j is None:
            raise PreconditionError(
                f"flag vectors are linearly dependent at position {i}")
        pivots.append(best_j)
        norms.append(best_val)
        inv_pivot = field.one() / row[best_j] if not isinstance(row[best_j], (int, Fraction)) \
            else Fraction(1) / row[best_j]
        for k in range(i + 1, t):
            c = work[k][best_j]
            if _elem_is_zero(c):
                continue
            f = c * inv_pivot
            work[k] = [x - f * y for x, y in zip(work[k], row)]
    # map back to ambient vectors
    out = [linalg.mat_vec(space.basis, row) for row in work]
    return out, norms, pivots


def distance_to_subspace(space: NormedSpace, x: Sequence,
                         subspace_vectors: Sequence[Sequence]) -> tuple[Magnitude, list]:
    """Exact distance from x to span(subspace_vectors) and a minimizer.

    Returns (dist, w) with w in the subspace and norm(x - w) = dist,
    which is the least value of norm(x - w') over the subspace.
    """
    field = space.field
    if not subspace_vectors:
        return space.norm(x), [field.zero()] * space.dim
    coords_x = space.coordinates(x)
    work = [space.coordinates(v) for v in subspace_vectors]
    dim = space.dim
    pivots: List[int] = []
    residual = list(coords_x)
    for i in range(len(work)):
        row = work[i]
        best_j = None
        best_val = field.zero_magnitude()
        for j in range(dim):
            if j in pivots or _elem_is_zero(row[j]):
                continue
            val = field.abs(row[j]) * space.weights[j]
            if best_j is None or val > best_val:
                best_j, best_val = j, val
        if best_j is None:
            raise PreconditionError("subspace vectors are linearly dependent")
        pivots.append(best_j)
        inv_pivot = row[best_j]
        inv_pivot = (Fraction(1) / inv_pivot if isinstance(inv_pivot, (int, Fraction))
                     else field.one() / inv_pivot)
        for k in range(i + 1, len(work)):
            c = work[k][best_j]
            if not _elem_is_zero(c):
                f = c * inv_pivot
                work[k] = [a - f * b for a, b in zip(work[k], row)]
        c = residual[best_j]
        if not _elem_is_zero(c):
            f = c * inv_pivot
            residual = [a - f * b for a, b in zip(residual, row)]
    dist = field.zero_magnitude()
    for a, w in zip(residual, space.weights):
        if _elem_is_zero(a):
            continue
        m = field.abs(a) * w
        if m > dist:
            dist = m
    g = linalg.mat_vec(space.basis, residual)
    minimizer = [a - b for a, b in zip(x, g)]
    return dist, minimizer


# ----------------------------------------------------------------------
# Quotients, duals, scalar extension
# ----------------------------------------------------------------------


def quotient_norm(space: NormedSpace, surjection: Sequence[Sequence]) -> tuple[
        "NormedSpace", List[list]]:
    """Quotient norm on the image of a surjective linear map.

    ``surjection`` is an s x r matrix (rows) of full row rank mapping
    the r-dimensional ``space`` onto the target.  Returns the quotient
    NormedSpace together with norm-attaining lifts of its basis columns.
    """
    field = space.field
    s = len(surjection)
    r = space.dim
    if linalg.rank(surjection) != s:
        raise PreconditionError("map is not surjective")
    ker = linalg.kernel_basis(surjection)
    d = len(ker)  # = r - s
    # pick r - d = s vectors completing the kernel to a basis of the source
    chosen: List[list] = list(ker)
    complements: List[list] = []
    for j in range(r):
        e = [field.one() if i == j else field.zero() for i in range(r)]
        if linalg.rank(chosen + [e]) > len(chosen):
            chosen.append(e)
            complements.append(e)
            if len(chosen) == r:
                break
    g, norms, _ = orthogonalize_flag(space, list(ker) + complements)
    lifts = g[d:]
    quot_basis_cols = [linalg.mat_vec(surjection, v) for v in lifts]
    quot_basis = [[quot_basis_cols[j][i] for j in range(s)] for i in range(s)]
    quot = NormedSpace(field, quot_basis, norms[d:])
    return quot, lifts


def norm_attaining_lift(space: NormedSpace, surjection: Sequence[Sequence],
                        target_vector: Sequence,
                        quotient: Optional[NormedSpace] = None,
                        lifts: Optional[List[list]] = None) -> list:
    """A lift v of target_vector with norm(v) equal to the quotient norm."""
    if quotient is None or lifts is None:
        quotient, lifts = quotient_norm(space, surjection)
    coords = quotient.coordinates(target_vector)
    field = space.field
    out = [field.zero()] * space.dim
    for c, g in zip(coords, lifts):
        if _elem_is_zero(c):
            continue
        out = [a + c * b for a, b in zip(out, g)]
    return out


def dual_norm(space: NormedSpace) -> NormedSpace:
    """The operator norm on the dual space, in dual-basis coordinates.

    A functional is a row vector phi acting by phi . v; the dual of an
    orthogonal basis is orthogonal with reciprocal weights.
    """
    inv = space.basis_inverse()
    # rows of basis^{-1} are the dual basis functionals; we store the dual
    # space with those functionals as basis *columns* of the coefficient
    # space, i.e. the matrix whose column i is the i-th dual functional.
    dual_basis = [[inv[j][i] for j in range(space.dim)] for i in range(space.dim)]
    weights = [space.field.one_magnitude() / w for w in space.weights]
    return NormedSpace(space.field, dual_basis, weights)


def scalar_extension(space: NormedSpace, target: ValuedField) -> NormedSpace:
    """Extend a trivially-valued rational space to a Laurent field.

    The same basis stays orthogonal and keeps its weights, provided the
    target base prime was chosen so that no two norm values have a ratio
    whose prime support is exactly that prime (see choose_laurent_base).
    """
    if space.field.kind != "trivial":
        raise PreconditionError("scalar extension implemented from the trivial valuation")
    if target.kind != "laurent":
        raise PreconditionError("scalar extension target must be a Laurent field")
    basis = [[RationalFunction.constant(x) for x in row] for row in space.basis]
    weights = [Magnitude(target.rho, w.q, 0) for w in space.weights]
    return NormedSpace(target, basis, weights)


# ----------------------------------------------------------------------
# Lattices over the valuation ring of a p-adic field
# ----------------------------------------------------------------------


def _vp(x: Fraction, p: int) -> int:
    if x == 0:
        raise ValueError("zero has no finite valuation")
    e = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        e += 1
    while den % p == 0:
        den //= p
        e -= 1
    return e


@dataclass
class Lattice:
    """Free module over Z_(p) (rationals with denominator prime to p)
    spanned by the columns of an invertible rational matrix, stored in a
    canonical form: each column is p^a times a column whose pivot entry
    is 1, in staircase shape with off-pivot entries reduced mod p^a."""

    field: ValuedField
    basis: List[list]  # rows; columns are the canonical generators

    def __post_init__(self):
        if self.field.kind != "padic":
            raise PreconditionError("lattices require a p-adic base field")

    @classmethod
    def from_columns(cls, field: ValuedField, cols: Sequence[Sequence[Fraction]]) -> "Lattice":
        canon = canonical_lattice_columns(field.prime, [list(c) for c in cols])
        basis = [[canon[j][i] for j in range(len(canon))] for i in range(len(canon[0]))]
        return cls(field, basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def columns(self) -> List[list]:
        return [[row[i] for row in self.basis] for i in range(self.dim)]

    def contains(self, v: Sequence[Fraction]) -> bool:
        coords = linalg.solve(self.basis, list(v))
        if coords is None:
            return False
        p = self.field.prime
        return all(c == 0 or _vp(c, p) >= 0 for c in coords)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Lattice):
            return NotImplemented
        return self.field == other.field and self.basis == other.basis


def _coset_rep(x: Fraction, p: int, a: int) -> Fraction:
    """Canonical representative of x + p^a Z_(p): of the form k / p^s
    with s = max(0, -v_p(x)) and integer 0 <= k < p^(a+s)."""
    if x == 0:
        return x
    v = _vp(x, p)
    if v >= a:
        return Fraction(0)
    s = max(0, -v)
    y = x * Fraction(p) ** s
    m = p ** (a + s)
    k = (y.numerator * pow(y.denominator, -1, m)) % m
    return Fraction(k, p ** s)


def canonical_lattice_columns(p: int, cols: List[list]) -> List[list]:
    """Canonical basis of a full-rank Z_(p)-lattice given spanning columns.

    Hermite-style reduction over the valuation ring Z_(p): repeatedly
    pick, among unpivoted columns and unused rows, the entry of least
    p-adic valuation a; normalize the column so that entry becomes
    exactly p^a; clear that row from all other unpivoted columns (the
    quotients are units times Z_(p) elements by minimality).  Finally
    reduce each earlier column at each later pivot row to the canonical
    coset representative modulo p^a Z_(p).
    """
    n = len(cols[0])
    work = [list(c) for c in cols if any(x != 0 for x in c)]
    if len(work) != n:
        raise PreconditionError("lattice must be given by n independent columns")
    remaining = list(range(len(work)))
    out: List[list] = []
    for r in range(n):
        best = None  # (valuation, col_idx)
        for ci in remaining:
            x = work[ci][r]
            if x == 0:
                continue
            v = _vp(x, p)
            if best is None or v < best[0]:
                best = (v, ci)
        if best is None:
            raise PreconditionError("lattice columns are linearly dependent")
        a, ci = best
        unit = work[ci][r] / Fraction(p) ** a
        pivot = [x / unit for x in work[ci]]
        remaining.remove(ci)
        for cj in remaining:
            if work[cj][r] == 0:
                continue
            f = work[cj][r] / pivot[r]  # v_p(f) >= 0 by pivot minimality
            work[cj] = [x - f * y for x, y in zip(work[cj], pivot)]
        out.append(pivot)
    # out[j] is zero above its pivot row j with p^{a_j} on the diagonal;
    # canonicalize the below-diagonal entries modulo p^{a_r} Z_(p)
    pivot_vals = [_vp(out[j][j], p) for j in range(n)]
    for j in range(n):
        for k in range(j + 1, n):
            x = out[j][k]
            if x == 0:
                continue
            rep = _coset_rep(x, p, pivot_vals[k])
            c = (x - rep) / out[k][k]  # lies in Z_(p)
            if c != 0:
                out[j] = [y - c * z for y, z in zip(out[j], out[k])]
    return out


def lattice_from_norm(space: NormedSpace) -> Lattice:
    """The unit ball {v : norm(v) <= 1} as a lattice (discrete case).

    With orthogonal basis e_i of weight w_i, the unit ball is the span
    of p^{m_i} e_i over Z_(p) where p^{-m_i} is the largest power of the
    uniformizer magnitude with p^{m_i} * w_i... concretely m_i is the
    least integer with |p^{m_i}| * w_i <= 1, i.e. p^{-m_i} <= 1/w_i.
    """
    field = space.field
    if field.kind != "padic":
        raise PreconditionError("unit-ball lattice requires a p-adic field")
    p = field.prime
    cols = []
    for i, w in enumerate(space.weights):
        # need smallest m with (1/p)^m * w <= 1  <=>  p^m >= w
        wv = w.value()
        m = 0
        if wv > 1:
            while Fraction(p) ** m < wv:
                m += 1
        else:
            while Fraction(p) ** (m - 1) >= wv:
                m -= 1
        col = [x * Fraction(p) ** m for x in space.column(i)]
        cols.append(col)
    return Lattice.from_columns(field, cols)


def norm_from_lattice(lat: Lattice) -> NormedSpace:
    """The norm whose unit ball is the given lattice: its canonical
    basis is orthonormal."""
    weights = [lat.field.one_magnitude() for _ in range(lat.dim)]
    return NormedSpace(lat.field, [list(r) for r in lat.basis], weights)
