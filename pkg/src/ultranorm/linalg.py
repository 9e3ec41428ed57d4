"""Exact linear algebra helpers.

Two layers:

* generic Gaussian elimination over any exact field whose elements
  support +, -, *, /, == 0 (Fractions or RationalFunctions here), and
* integer-lattice routines (column Hermite normal form, kernels,
  intersections, Smith normal form) used by the lattice and adelic code.

Matrices are lists of rows throughout.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Callable, List, Optional, Sequence

Matrix = List[list]


def _is_zero(x) -> bool:
    if isinstance(x, (int, Fraction)):
        return x == 0
    return x.is_zero


def mat_copy(m: Sequence[Sequence]) -> Matrix:
    return [list(row) for row in m]


def identity(n: int, one=Fraction(1), zero=Fraction(0)) -> Matrix:
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    rows, inner, cols = len(a), len(b), len(b[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = a[i][0] * b[0][j]
            for k in range(1, inner):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def mat_vec(a: Sequence[Sequence], v: Sequence) -> list:
    out = []
    for row in a:
        acc = row[0] * v[0]
        for k in range(1, len(v)):
            acc = acc + row[k] * v[k]
        out.append(acc)
    return out


def transpose(a: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*a)]


def rref(m: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row-echelon form; returns (rref matrix, pivot columns)."""
    a = mat_copy(m)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot = None
        for i in range(r, rows):
            if not _is_zero(a[i][c]):
                pivot = i
                break
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = a[r][c]
        a[r] = [x / inv for x in a[r]]
        for i in range(rows):
            if i != r and not _is_zero(a[i][c]):
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(m: Sequence[Sequence]) -> int:
    return len(rref(m)[1])


def solve(a: Sequence[Sequence], b: Sequence) -> Optional[list]:
    """One solution x of a x = b, or None if inconsistent."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    aug = [list(a[i]) + [b[i]] for i in range(rows)]
    red, pivots = rref(aug)
    if cols in pivots:
        return None
    zero = None
    for row in a:
        for x in row:
            zero = x - x
            break
        if zero is not None:
            break
    if zero is None:
        zero = b[0] - b[0] if b else Fraction(0)
    x = [zero] * cols
    for r, c in enumerate(pivots):
        x[c] = red[r][cols]
    return x


def invert(a: Sequence[Sequence]) -> Matrix:
    """Inverse of a square matrix; raises ValueError if singular."""
    n = len(a)
    one = None
    for row in a:
        for x in row:
            if not _is_zero(x):
                one = x / x
                break
        if one is not None:
            break
    if one is None:
        raise ValueError("singular matrix (zero)")
    zero = one - one
    aug = [list(a[i]) + [one if i == j else zero for j in range(n)] for i in range(n)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("singular matrix")
    return [row[n:] for row in red]


def kernel_basis(m: Sequence[Sequence]) -> Matrix:
    """Basis (list of vectors) of the right kernel of m."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    if rows == 0:
        return identity(cols)
    red, pivots = rref(m)
    one = None
    for row in m:
        for x in row:
            if not _is_zero(x):
                one = x / x
                break
        if one is not None:
            break
    if one is None:
        return identity(cols)
    zero = one - one
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * cols
        v[f] = one
        for r, c in enumerate(pivots):
            v[c] = zero - red[r][f]
        basis.append(v)
    return basis


# ----------------------------------------------------------------------
# Integer lattice routines (columns span the lattice)
# ----------------------------------------------------------------------


def _int_col_reduce(cols: List[list[int]]) -> List[list[int]]:
    """Column-style Hermite normal form of the lattice spanned by
    ``cols`` (each an integer vector of common length).  Returns a basis
    in lower-staircase form: pivots positive, entries right of a pivot
    reduced into [0, pivot)."""
    work = [list(c) for c in cols if any(c)]
    if not work:
        return []
    n = len(work[0])
    basis: List[list[int]] = []
    row = 0
    while work and row < n:
        # bring every column's `row` entry to a single pivot via gcd steps
        while True:
            nz = [c for c in work if c[row] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda c: abs(c[row]))
            a, b = nz[0], nz[1]
            q = b[row] // a[row]
            for i in range(n):
                b[i] -= q * a[i]
        pivot_col = None
        for c in work:
            if c[row] != 0:
                pivot_col = c
                break
        if pivot_col is not None:
            work.remove(pivot_col)
            work = [c for c in work if any(c)]
            if pivot_col[row] < 0:
                pivot_col = [-x for x in pivot_col]
            basis.append(pivot_col)
        row += 1
    # reduce entries of earlier basis vectors against later pivots
    pivot_rows = []
    for b in basis:
        r = 0
        while b[r] == 0:
            r += 1
        pivot_rows.append(r)
    for j in range(len(basis)):
        for k in range(j + 1, len(basis)):
            r = pivot_rows[k]
            p = basis[k][r]
            q = basis[j][r] // p
            if q:
                for i in range(len(basis[j])):
                    basis[j][i] -= q * basis[k][i]
    return basis


def hnf_column_basis(cols: Sequence[Sequence[int]]) -> List[list[int]]:
    """Canonical integer basis (as columns) of the lattice spanned by cols."""
    return _int_col_reduce([list(c) for c in cols])


def integer_kernel(m: Sequence[Sequence[int]]) -> List[list[int]]:
    """Z-basis of the full integer kernel {x in Z^cols : m x = 0},
    computed by unimodular column reduction with an identity tracker."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    work = [[m[i][j] for i in range(rows)] +
            [1 if k == j else 0 for k in range(cols)]
            for j in range(cols)]
    active = list(range(cols))
    for r in range(rows):
        while True:
            nz = [j for j in active if work[j][r] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda j: abs(work[j][r]))
            a, b = work[nz[0]], work[nz[1]]
            q = b[r] // a[r]
            for i in range(rows + cols):
                b[i] -= q * a[i]
        nz = [j for j in active if work[j][r] != 0]
        if nz:
            active.remove(nz[0])
    ker = [work[j][rows:] for j in active]
    return hnf_column_basis(ker) if ker else []


def lattice_intersection(a_cols: Sequence[Sequence[int]],
                         b_cols: Sequence[Sequence[int]]) -> List[list[int]]:
    """Basis of the intersection of two full-rank integer lattices in Z^n,
    given by basis columns."""
    n = len(a_cols[0])
    # x in A cap B  <=>  x = A u = B v; solve [A | -B] (u,v)^T = 0 over Z.
    m = [[a_cols[j][i] for j in range(len(a_cols))] +
         [-b_cols[j][i] for j in range(len(b_cols))]
         for i in range(n)]
    ker = integer_kernel(m)
    vecs = []
    for w in ker:
        u = w[:len(a_cols)]
        x = [sum(a_cols[j][i] * u[j] for j in range(len(a_cols))) for i in range(n)]
        vecs.append(x)
    return hnf_column_basis(vecs)


def smith_diagonal(m: Sequence[Sequence[int]]) -> list[int]:
    """Elementary divisors (Smith normal form diagonal) of an integer
    matrix, nonzero entries only, each dividing the next."""
    a = [list(row) for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    divisors = []
    top = 0
    left = 0
    while top < rows and left < cols:
        # find the nonzero entry of least absolute value in the submatrix
        best = None
        for i in range(top, rows):
            for j in range(left, cols):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        bi, bj = best
        a[top], a[bi] = a[bi], a[top]
        for row in a:
            row[left], row[bj] = row[bj], row[left]
        p = a[top][left]
        dirty = False
        for i in range(top + 1, rows):
            q = a[i][left] // p
            if q:
                for j in range(left, cols):
                    a[i][j] -= q * a[top][j]
            if a[i][left] != 0:
                dirty = True
        for j in range(left + 1, cols):
            q = a[top][j] // p
            if q:
                for i in range(top, rows):
                    a[i][j] -= q * a[i][left]
            if a[top][j] != 0:
                dirty = True
        if dirty:
            continue
        # pivot must divide every remaining entry
        ok = True
        for i in range(top + 1, rows):
            for j in range(left + 1, cols):
                if a[i][j] % p != 0:
                    for k in range(left, cols):
                        a[top][k] += a[i][k]
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        divisors.append(abs(p))
        top += 1
        left += 1
    return divisors
