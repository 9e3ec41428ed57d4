"""Adelically normed Q-vector spaces and their lambda invariants.

An adelic space carries a p-adic norm at finitely many primes (all other
primes standard orthonormal) plus an archimedean polyhedral norm given
by finitely many rational linear functionals.  The finite places cut out
a Z-lattice; lambda_Q / lambda_Z are the smallest archimedean bounds
admitting a Q-basis inside the lattice / a Z-basis of the lattice, both
computed by exact enumeration.  On top sits the graded basis search for
free bases of archimedean norm < 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations, product as iter_product
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .fields import PadicRationals, ValuedField
from .spaces import NormedSpace, PreconditionError, quotient_norm

RANK_BOUND = 8


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _vp(x: Fraction, p: int) -> int:
    e = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        e += 1
    while den % p == 0:
        den //= p
        e -= 1
    return e


# ----------------------------------------------------------------------
# Archimedean polyhedral norms
# ----------------------------------------------------------------------


def arch_norm(functionals: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> Fraction:
    """max_j |<f_j, v>| over the defining functionals (exact)."""
    best = Fraction(0)
    for f in functionals:
        val = abs(sum(a * b for a, b in zip(f, v)))
        if val > best:
            best = val
    return best


def _polytope_vertices(functionals: Sequence[Sequence[Fraction]]) -> List[List[Fraction]]:
    """Vertices of the unit ball {x : |<f_j, x>| <= 1}, exactly.

    Enumerate r-subsets of the constraint rows (+-f_j), solve the
    equality system, keep feasible solutions.  Intended for small
    dimension and few functionals.
    """
    r = len(functionals[0])
    rows: List[List[Fraction]] = []
    for f in functionals:
        rows.append([Fraction(x) for x in f])
        rows.append([-Fraction(x) for x in f])
    verts: List[List[Fraction]] = []
    for subset in combinations(range(len(rows)), r):
        mat = [rows[i] for i in subset]
        if linalg.rank(mat) < r:
            continue
        sol = linalg.solve(mat, [Fraction(1)] * r)
        if sol is None:
            continue
        if all(abs(sum(a * b for a, b in zip(f, sol))) <= 1 for f in functionals):
            if sol not in verts:
                verts.append(sol)
    return verts


def _hull_functionals_1d(points: List[List[Fraction]]) -> List[List[Fraction]]:
    c = max(abs(pt[0]) for pt in points)
    if c == 0:
        raise PreconditionError("quotient unit ball is degenerate")
    return [[Fraction(1) / c]]


def _hull_functionals_2d(points: List[List[Fraction]]) -> List[List[Fraction]]:
    """H-representation of the symmetric convex hull of points in Q^2:
    one functional per hull edge, normalized to value 1 on the edge."""
    pts = []
    for pt in points:
        for s in (1, -1):
            q = [s * pt[0], s * pt[1]]
            if q != [0, 0] and q not in pts:
                pts.append(q)
    if linalg.rank(pts) < 2:
        raise PreconditionError("quotient unit ball is degenerate")
    # exact gift-wrapping convex hull
    start = min(pts, key=lambda q: (q[0], q[1]))
    hull = [start]
    current = start
    while True:
        candidate = None
        for q in pts:
            if q == current:
                continue
            if candidate is None:
                candidate = q
                continue
            cross = ((candidate[0] - current[0]) * (q[1] - current[1])
                     - (candidate[1] - current[1]) * (q[0] - current[0]))
            if cross < 0:
                candidate = q
            elif cross == 0:
                # keep the farther point
                d1 = (candidate[0] - current[0]) ** 2 + (candidate[1] - current[1]) ** 2
                d2 = (q[0] - current[0]) ** 2 + (q[1] - current[1]) ** 2
                if d2 > d1:
                    candidate = q
        if candidate == start:
            break
        hull.append(candidate)
        current = candidate
    out: List[List[Fraction]] = []
    for i in range(len(hull)):
        a = hull[i]
        b = hull[(i + 1) % len(hull)]
        # functional (u, v) with u*x + v*y = 1 on the edge a-b
        nx, ny = a[1] - b[1], b[0] - a[0]
        val = nx * a[0] + ny * a[1]
        if val == 0:
            continue
        f = [nx / val, ny / val]
        if f not in out and [-f[0], -f[1]] not in out:
            out.append(f)
    return out


# ----------------------------------------------------------------------
# AdelicSpace and its finite-part lattice
# ----------------------------------------------------------------------


@dataclass
class AdelicSpace:
    """Q^r with p-adic norms at finitely many primes and a polyhedral
    archimedean norm; unlisted primes carry the standard norm."""

    dim: int
    finite_places: Dict[int, NormedSpace]
    arch_functionals: List[List[Fraction]]

    def __post_init__(self):
        for p, space in self.finite_places.items():
            if space.field != PadicRationals(p):
                raise PreconditionError(f"place {p} carries a wrong-field norm")
            if space.dim != self.dim:
                raise PreconditionError("finite-place dimension mismatch")
        funcs = [[Fraction(x) for x in f] for f in self.arch_functionals]
        if linalg.rank(funcs) < self.dim:
            raise PreconditionError("archimedean functionals must span the dual")
        self.arch_functionals = funcs

    def arch(self, v: Sequence[Fraction]) -> Fraction:
        return arch_norm(self.arch_functionals, v)

    def place(self, p: int) -> NormedSpace:
        if p in self.finite_places:
            return self.finite_places[p]
        return NormedSpace.standard(PadicRationals(p), self.dim)


@dataclass
class NormedLattice:
    """A Z-lattice in Q^r (canonical basis columns) with an archimedean
    polyhedral norm attached."""

    basis_columns: List[List[Fraction]]  # canonical, full rank
    arch_functionals: List[List[Fraction]]

    @property
    def rank(self) -> int:
        return len(self.basis_columns)

    @property
    def dim(self) -> int:
        return len(self.basis_columns[0]) if self.basis_columns else 0

    def vector(self, coords: Sequence[int]) -> List[Fraction]:
        n = self.dim
        return [sum(Fraction(c) * self.basis_columns[j][i]
                    for j, c in enumerate(coords)) for i in range(n)]

    def arch(self, v: Sequence[Fraction]) -> Fraction:
        return arch_norm(self.arch_functionals, v)

    def contains(self, v: Sequence[Fraction]) -> bool:
        mat = [[self.basis_columns[j][i] for j in range(self.rank)]
               for i in range(self.dim)]
        coords = linalg.solve(mat, list(v))
        return coords is not None and all(c.denominator == 1 for c in coords)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NormedLattice):
            return NotImplemented
        return self.basis_columns == other.basis_columns


def _rational_hnf(cols: Sequence[Sequence[Fraction]]) -> List[List[Fraction]]:
    """Canonical Z-basis of the lattice spanned by rational columns."""
    cols = [list(c) for c in cols]
    d = 1
    for c in cols:
        for x in c:
            d = _lcm(d, Fraction(x).denominator)
    int_cols = [[int(x * d) for x in c] for c in cols]
    hnf = linalg.hnf_column_basis(int_cols)
    return [[Fraction(x, d) for x in c] for c in hnf]


def _rational_intersection(a: Sequence[Sequence[Fraction]],
                           b: Sequence[Sequence[Fraction]]) -> List[List[Fraction]]:
    d = 1
    for cols in (a, b):
        for c in cols:
            for x in c:
                d = _lcm(d, Fraction(x).denominator)
    ai = [[int(x * d) for x in c] for c in a]
    bi = [[int(x * d) for x in c] for c in b]
    inter = linalg.lattice_intersection(ai, bi)
    return [[Fraction(x, d) for x in c] for c in inter]


def _globalized_place_lattice(p: int, space: NormedSpace,
                              over_den: int) -> List[List[Fraction]]:
    """A Z-lattice G with G (x) Z_(p) = unit ball of the place norm and
    G (x) Z_(q) = (1/over_den) Z_(q)^r for every other prime q, where the
    overlattice U = (1/over_den) Z^r contains every place's unit ball."""
    from .spaces import lattice_from_norm
    lat = lattice_from_norm(space)
    r = space.dim
    cols: List[List[Fraction]] = []
    for col in lat.columns():
        # rescale by a prime-to-p rational into p^v * (primitive integers):
        # same Z_(p)-span, but q-integral for every other prime q
        v = min(_vp(x, p) for x in col if x != 0)
        reduced = [x / Fraction(p) ** v for x in col]
        den = 1
        for x in reduced:
            den = _lcm(den, x.denominator)
        ints = [int(x * den) for x in reduced]
        g = 0
        for x in ints:
            g = gcd(g, x)
        cols.append([Fraction(p) ** v * Fraction(x, g) for x in ints])
    # a large p-power multiple of U sits inside the unit ball
    inv = linalg.invert([[lat.basis[i][j] for j in range(r)] for i in range(r)])
    n0 = 0
    for row in inv:
        for x in row:
            if x != 0:
                n0 = max(n0, -_vp(x, p))
    n0 += max(0, -_vp(Fraction(1, over_den), p))
    scale = Fraction(p) ** n0 / over_den
    for i in range(r):
        cols.append([scale if j == i else Fraction(0) for j in range(r)])
    return _rational_hnf(cols)


def finite_unit_lattice(A: AdelicSpace) -> NormedLattice:
    """The lattice {x : ||x||_p <= 1 for all finite p}, with A's
    archimedean norm attached."""
    r = A.dim
    # common overlattice U = (1/D) Z^r containing every place's unit ball
    d = 1
    from .spaces import lattice_from_norm
    for p, space in A.finite_places.items():
        n_p = 0
        for col in lattice_from_norm(space).columns():
            for x in col:
                if x != 0:
                    n_p = max(n_p, -_vp(x, p))
        d *= p ** n_p
    current = None
    for p in sorted(A.finite_places):
        g = _globalized_place_lattice(p, A.finite_places[p], d)
        current = g if current is None else _rational_intersection(current, g)
    if current is None:
        current = [[Fraction(1) if i == j else Fraction(0) for i in range(r)]
                   for j in range(r)]  # Z^r
    return NormedLattice(current, A.arch_functionals)


def check_localization(A: AdelicSpace, M: NormedLattice, p: int) -> bool:
    """Lemma-style identity: M (x) Z_(p) equals the p-adic unit ball,
    checked by generator membership both ways."""
    space = A.place(p)
    one = space.field.one_magnitude()
    # every lattice generator has p-norm <= 1
    for col in M.basis_columns:
        if space.norm(col) > one:
            return False
    # every unit-ball generator lies in M (x) Z_(p)
    from .spaces import lattice_from_norm
    ball = lattice_from_norm(space)
    mat = [[M.basis_columns[j][i] for j in range(M.rank)] for i in range(M.dim)]
    for col in ball.columns():
        coords = linalg.solve(mat, col)
        if coords is None or any(c != 0 and _vp(c, p) < 0 for c in coords):
            return False
    return True


# ----------------------------------------------------------------------
# lambda invariants by exact enumeration
# ----------------------------------------------------------------------


def _lll_rows(rows: List[List[int]],
              dot: "callable") -> List[List[int]]:
    """Exact LLL reduction (delta = 3/4) of integer rows under the given
    positive-definite inner product; returns a unimodular transform of
    the input rows."""
    b = [list(row) for row in rows]
    n = len(b)

    def gso():
        mu = [[Fraction(0)] * n for _ in range(n)]
        norms = [Fraction(0)] * n
        # Gram-Schmidt norms via the Gram matrix only (no rational vectors)
        gram = [[dot(b[i], b[j]) for j in range(n)] for i in range(n)]
        for i in range(n):
            norms[i] = gram[i][i]
            for j in range(i):
                mu[i][j] = gram[i][j]
                for k in range(j):
                    mu[i][j] -= mu[i][k] * mu[j][k] * norms[k]
                mu[i][j] /= norms[j]
                norms[i] -= mu[i][j] ** 2 * norms[j]
        return mu, norms

    mu, norms = gso()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q != 0:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                mu, norms = gso()
        if norms[k] >= (Fraction(3, 4) - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            mu, norms = gso()
            k = max(k - 1, 1)
    return b


def _reduced_coordinate_basis(phi: List[List[Fraction]], r: int) -> List[List[int]]:
    """A unimodular change of lattice coordinates making the functional
    values small (LLL under sum-of-squares of functional values)."""
    def dot(x: Sequence[int], y: Sequence[int]) -> Fraction:
        s = Fraction(0)
        for row in phi:
            s += (sum(a * c for a, c in zip(row, x))
                  * sum(a * c for a, c in zip(row, y)))
        return s

    rows = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    return _lll_rows(rows, dot)


def _short_vectors(M: NormedLattice, bound: Fraction) -> List[Tuple[Fraction, Tuple[int, ...]]]:
    """All nonzero lattice coordinate vectors (one per +-pair) with
    archimedean norm <= bound, as sorted (norm, coords) pairs."""
    r = M.rank
    # functionals in lattice coordinates
    phi0 = [[sum(f[i] * M.basis_columns[j][i] for i in range(M.dim))
             for j in range(r)] for f in M.arch_functionals]
    # enumerate in LLL-reduced coordinates (smaller boxes), convert back
    red = _reduced_coordinate_basis(phi0, r) if r > 1 else [[1]]
    phi = [[sum(row[j] * red[k][j] for j in range(r)) for k in range(r)]
           for row in phi0]
    # choose an invertible row subset giving the smallest enumeration box
    best_box = None
    idxs = list(range(len(phi)))
    for subset in combinations(idxs, r):
        mat = [phi[i] for i in subset]
        try:
            inv = linalg.invert(mat)
        except ValueError:
            continue
        box = [bound * sum(abs(inv[i][j]) for j in range(r)) for i in range(r)]
        size = 1
        for b in box:
            size *= 2 * int(b) + 1
        if best_box is None or size < best_box[0]:
            best_box = (size, box)
    if best_box is None:
        raise PreconditionError("archimedean functionals do not span")
    box = best_box[1]
    ranges = [range(-int(b), int(b) + 1) for b in box]
    out: List[Tuple[Fraction, Tuple[int, ...]]] = []
    for coords in iter_product(*ranges):
        # one representative per +-pair
        nz = next((c for c in coords if c != 0), 0)
        if nz <= 0:
            continue
        val = Fraction(0)
        ok = True
        for row in phi:
            t = abs(sum(a * c for a, c in zip(row, coords)))
            if t > bound:
                ok = False
                break
            if t > val:
                val = t
        if ok:
            orig = [sum(c * red[k][j] for k, c in enumerate(coords))
                    for j in range(r)]
            # canonical sign: first nonzero original coordinate positive
            lead = next((c for c in orig if c != 0), 0)
            if lead < 0:
                orig = [-c for c in orig]
            out.append((val, tuple(orig)))
    # ties broken toward sparser/smaller coordinate vectors
    out.sort(key=lambda t: (t[0], sum(abs(c) for c in t[1]), t[1]))
    return out


def _initial_bound(M: NormedLattice) -> Fraction:
    """Norm bound attained by some Z-basis of M (LLL-reduced), hence an
    upper bound for both lambda invariants."""
    r = M.rank
    phi = [[sum(f[i] * M.basis_columns[j][i] for i in range(M.dim))
            for j in range(r)] for f in M.arch_functionals]
    red = _reduced_coordinate_basis(phi, r) if r > 1 else [[1]]
    return max(max(abs(sum(a * c for a, c in zip(row, vec))) for row in phi)
               for vec in red)


def lambda_Q(M: NormedLattice) -> Fraction:
    """Least lambda admitting a Q-basis inside M with all archimedean
    norms <= lambda."""
    if M.rank == 0:
        return Fraction(0)
    if M.rank > RANK_BOUND:
        raise PreconditionError(
            f"rank {M.rank} exceeds the exact enumeration bound {RANK_BOUND}; "
            "use the labeled upper-bound heuristic instead")
    lam0 = _initial_bound(M)
    vectors = _short_vectors(M, lam0)
    chosen: List[list] = []
    lam = Fraction(0)
    for val, coords in vectors:
        row = [Fraction(c) for c in coords]
        if linalg.rank(chosen + [row]) > len(chosen):
            chosen.append(row)
            lam = max(lam, val)
            if len(chosen) == M.rank:
                return lam
    raise PreconditionError("enumeration failed to find a basis (internal error)")


def _partial_is_primitive(rows: List[Sequence[int]]) -> bool:
    """True iff the rows extend to a Z-basis of Z^r: all elementary
    divisors equal 1."""
    div = linalg.smith_diagonal([list(r) for r in rows])
    return len(div) == len(rows) and all(d == 1 for d in div)


def _find_unimodular(vectors: List[Tuple[Fraction, Tuple[int, ...]]],
                     r: int) -> Optional[List[Tuple[int, ...]]]:
    """A size-r subset of the coordinate vectors forming a Z-basis of
    Z^r (determinant +-1), or None."""
    coords = [v for _, v in vectors]

    def dfs(start: int, selected: List[Tuple[int, ...]]) -> Optional[List[Tuple[int, ...]]]:
        if len(selected) == r:
            return list(selected)
        for i in range(start, len(coords)):
            trial = selected + [coords[i]]
            if _partial_is_primitive(trial):
                found = dfs(i + 1, trial)
                if found is not None:
                    return found
        return None

    return dfs(0, [])


def lambda_Z(M: NormedLattice, want_basis: bool = False):
    """Least lambda admitting a Z-basis of M with all archimedean norms
    <= lambda; optionally also returns one such basis (ambient vectors)."""
    if M.rank == 0:
        return (Fraction(0), []) if want_basis else Fraction(0)
    if M.rank > RANK_BOUND:
        raise PreconditionError(
            f"rank {M.rank} exceeds the exact enumeration bound {RANK_BOUND}; "
            "use the labeled upper-bound heuristic instead")
    lam0 = _initial_bound(M)
    vectors = _short_vectors(M, lam0)
    values = sorted({val for val, _ in vectors})
    # binary search the smallest attained value admitting a Z-basis
    lo, hi = 0, len(values) - 1
    best: Optional[Tuple[Fraction, List[Tuple[int, ...]]]] = None
    while lo <= hi:
        mid = (lo + hi) // 2
        subset = [(v, c) for v, c in vectors if v <= values[mid]]
        found = _find_unimodular(subset, M.rank)
        if found is not None:
            best = (values[mid], found)
            hi = mid - 1
        else:
            lo = mid + 1
    if best is None:
        raise PreconditionError("no Z-basis found below the initial bound (internal error)")
    if want_basis:
        return best[0], [M.vector(c) for c in best[1]]
    return best[0]


def lambda_upper_bound(M: NormedLattice) -> Fraction:
    """Heuristic UPPER BOUND for lambda_Z (max norm of the canonical
    basis); exact only by accident.  Available at any rank."""
    if M.rank == 0:
        return Fraction(0)
    return max(M.arch(c) for c in M.basis_columns)


def support_unit(primes: Sequence[int]) -> Fraction:
    """A rational with positive valuation exactly at the given primes
    (over Q simply their product)."""
    out = Fraction(1)
    for p in primes:
        out *= p
    return out


# ----------------------------------------------------------------------
# Quotients of adelic spaces
# ----------------------------------------------------------------------


def quotient_adelic(A: AdelicSpace, f: Sequence[Sequence[Fraction]]) -> AdelicSpace:
    """The quotient adelic structure under a surjection f: Q^r -> Q^s.

    Finite places: quotient norms place by place (including any new
    primes where the image of the standard lattice is non-standard).
    Archimedean place: the polyhedral quotient norm, computed by exact
    vertex enumeration of the unit polytope (target dimension <= 2).
    """
    f = [[Fraction(x) for x in row] for row in f]
    s, r = len(f), A.dim
    if linalg.rank(f) != s:
        raise PreconditionError("map is not surjective")
    # primes where f(Z^r) differs from Z^s
    image = _rational_hnf([[row[j] for row in f] for j in range(r)])
    extra: set = set(A.finite_places)
    for col in image:
        for x in col:
            for n in (x.numerator, x.denominator):
                n = abs(n)
                d = 2
                while d * d <= n:
                    if n % d == 0:
                        extra.add(d)
                        while n % d == 0:
                            n //= d
                    d += 1
                if n > 1:
                    extra.add(n)
    places: Dict[int, NormedSpace] = {}
    for p in sorted(extra):
        src = A.place(p)
        quot, _ = quotient_norm(src, f)
        places[p] = quot
    # archimedean quotient via the image polytope
    if s > 2:
        raise PreconditionError(
            "polyhedral quotient implemented for target dimension <= 2")
    verts = _polytope_vertices(A.arch_functionals)
    images = [linalg.mat_vec(f, v) for v in verts]
    if s == 1:
        funcs = _hull_functionals_1d(images)
    else:
        funcs = _hull_functionals_2d(images)
    out = AdelicSpace(s, places, funcs)
    # exact quotient-lattice identity check
    src_lat = finite_unit_lattice(A)
    quo_lat = finite_unit_lattice(out)
    pushed = _rational_hnf([linalg.mat_vec(f, c) for c in src_lat.basis_columns])
    if pushed != quo_lat.basis_columns:
        raise PreconditionError("quotient lattice identity failed (internal error)")
    return out


# ----------------------------------------------------------------------
# Graded structures: lambda tables and the basis search
# ----------------------------------------------------------------------


def graded_lambda_table(G: Dict[int, AdelicSpace], n_max: int) -> dict:
    """Per-degree (lambda_Q, lambda_Z, rank) plus a floating least
    squares decay fit of log lambda_Z against n (diagnostic only)."""
    rows = []
    for n in range(1, n_max + 1):
        if n not in G:
            raise PreconditionError(f"graded family missing degree {n}")
        M = finite_unit_lattice(G[n])
        lq = lambda_Q(M)
        lz = lambda_Z(M)
        rows.append({"n": n, "lambda_Q": lq, "lambda_Z": lz, "rank": M.rank})
    import math
    pts = [(row["n"], math.log(row["lambda_Z"])) for row in rows
           if row["lambda_Z"] > 0]
    fit = None
    if len(pts) >= 2:
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        n = len(pts)
        xbar, ybar = sum(xs) / n, sum(ys) / n
        denom = sum((x - xbar) ** 2 for x in xs)
        if denom > 0:
            slope = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys)) / denom
            fit = {"slope": slope, "intercept": ybar - slope * xbar,
                   "note": "diagnostic least-squares fit; floating point"}
    return {"rows": rows, "log_fit": fit}


def nakai_basis_search(G: Dict[int, AdelicSpace], n: int):
    """A Z-basis of the degree-n finite-part lattice with all archimedean
    norms < 1, or None at this degree (decided exactly via lambda_Z)."""
    M = finite_unit_lattice(G[n])
    lz, basis = lambda_Z(M, want_basis=True)
    if lz < 1:
        return basis
    return None


def nakai_first_success(G: Dict[int, AdelicSpace], n_max: int):
    """(first degree with a norm-<1 free basis, that basis), or (None, None)."""
    for n in range(1, n_max + 1):
        if n not in G:
            raise PreconditionError(f"graded family missing degree {n}")
        basis = nakai_basis_search(G, n)
        if basis is not None:
            return n, basis
    return None, None
