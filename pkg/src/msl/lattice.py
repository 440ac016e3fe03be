"""Exact integer and rational linear algebra.

Matrices are plain lists of rows.  Entries are ``int`` or ``Fraction``; no
floating point is ever produced.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Optional, Sequence

Matrix = Sequence[Sequence]


def _as_fraction_rows(rows: Matrix) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in rows]


def bareiss_det(rows: Matrix) -> int:
    """Determinant of a square integer matrix by fraction-free elimination."""
    a = [[int(x) for x in row] for row in rows]
    k = len(a)
    if k == 0:
        return 1
    sign = 1
    prev = 1
    for i in range(k - 1):
        if a[i][i] == 0:
            swap = next((r for r in range(i + 1, k) if a[r][i] != 0), None)
            if swap is None:
                return 0
            a[i], a[swap] = a[swap], a[i]
            sign = -sign
        for r in range(i + 1, k):
            for c in range(i + 1, k):
                a[r][c] = (a[r][c] * a[i][i] - a[r][i] * a[i][c]) // prev
        prev = a[i][i]
    return sign * a[k - 1][k - 1]


def gcd_maximal_minors(rows: Matrix) -> int:
    """Greatest common divisor of all k x k minors of a k x n integer matrix.

    Returns 0 exactly when the matrix has rank < k.  The scan over column
    subsets stops as soon as the running gcd reaches 1.
    """
    k = len(rows)
    if k == 0:
        raise ValueError("matrix needs at least one row")
    n = len(rows[0])
    if any(len(r) != n for r in rows):
        raise ValueError("ragged matrix")
    if k > n:
        raise ValueError("underdetermined minor shape")
    g = 0
    for cols in combinations(range(n), k):
        det = bareiss_det([[row[c] for c in cols] for row in rows])
        g = gcd(g, det)
        if g == 1:
            break
    return g


def vector_gcd(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g


def primitive_and_length(v: Sequence[int]) -> tuple[tuple[int, ...], int]:
    """Split an integer vector as ``length * primitive``.

    The zero vector maps to ``(zero, 0)``.
    """
    g = vector_gcd(v)
    if g == 0:
        return tuple(0 for _ in v), 0
    return tuple(int(x) // g for x in v), g


def rref(rows: Matrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form with lexicographic (leftmost, topmost) pivots."""
    a = _as_fraction_rows(rows)
    if not a:
        return a, []
    m, n = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(rows: Matrix) -> int:
    return len(rref(rows)[1])


def solve_rational(a: Matrix, b: Sequence) -> Optional[list[Fraction]]:
    """Return one exact solution of ``a x = b`` (free variables set to 0), or None."""
    m = len(a)
    if len(b) != m:
        raise ValueError("shape mismatch: %d rows vs rhs of length %d" % (m, len(b)))
    if m == 0:
        return []
    n = len(a[0])
    if any(len(row) != n for row in a):
        raise ValueError("ragged matrix")
    aug = [list(row) + [b[i]] for i, row in enumerate(a)]
    red, pivots = rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = red[i][n]
    return x


def nullspace(rows: Matrix, ncols: Optional[int] = None) -> list[list[Fraction]]:
    """Rational basis of the kernel, one vector per free column."""
    if not rows:
        if ncols is None:
            raise ValueError("need ncols for an empty matrix")
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    n = len(rows[0])
    red, pivots = rref(rows)
    basis = []
    for free in (c for c in range(n) if c not in pivots):
        v = [Fraction(0)] * n
        v[free] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -red[i][free]
        basis.append(v)
    return basis


def in_rational_span(v: Sequence, generators: Sequence[Sequence]) -> bool:
    """True iff ``v`` is a rational combination of ``generators``."""
    dim = len(v)
    if any(len(g) != dim for g in generators):
        raise ValueError("dimension mismatch")
    if not generators:
        return all(x == 0 for x in v)
    return rank(list(generators)) == rank(list(generators) + [list(v)])


def clear_denominators(v: Sequence) -> list[int]:
    """Smallest positive integer multiple of a rational vector, made primitive."""
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    return list(primitive_and_length(ints)[0]) if any(ints) else ints


def integer_kernel(rows: Matrix, ncols: Optional[int] = None) -> list[list[int]]:
    """Z-basis of ``{x in Z^n : A x = 0}`` for a rational matrix A.

    Unimodular column reduction: A U = [H | 0] and the trailing columns of U
    span the integer kernel.
    """
    if not rows:
        if ncols is None:
            raise ValueError("need ncols for an empty matrix")
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    a = [clear_denominators(r) if any(r) else [0] * len(r) for r in rows]
    n = len(a[0])
    u = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop(i: int, j: int, p: int, q: int, r: int, s: int) -> None:
        # col_i, col_j <- p*col_i + q*col_j, r*col_i + s*col_j
        for mat in (a, u):
            for row in mat:
                x, y = row[i], row[j]
                row[i], row[j] = p * x + q * y, r * x + s * y

    piv = 0
    for i in range(len(a)):
        if piv == n:
            break
        for j in range(piv + 1, n):
            x, y = a[i][piv], a[i][j]
            if y == 0:
                continue
            if x == 0:
                colop(piv, j, 0, 1, 1, 0)
                continue
            g, s, t = _xgcd(x, y)
            colop(piv, j, s, t, -y // g, x // g)
        if a[i][piv] != 0:
            piv += 1
    return [[u[r][c] for r in range(n)] for c in range(piv, n)]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) > 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def unit_preimage(phi: Sequence[int]) -> list[int]:
    """Integer vector c with phi . c = 1 for a primitive integer covector phi."""
    n = len(phi)
    c = [0] * n
    g = 0
    coeffs: list[int] = []
    for x in phi:
        g2, s, t = _xgcd(g, int(x)) if (g or x) else (0, 1, 0)
        coeffs = [s * y for y in coeffs] + [t]
        g = g2
    if g != 1:
        raise ValueError("covector is not primitive")
    for i, y in enumerate(coeffs):
        c[i] = y
    return c


def mat_vec(rows: Matrix, v: Sequence) -> list:
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in rows]


def transpose(rows: Matrix) -> list[list]:
    return [list(col) for col in zip(*rows)]
