from fractions import Fraction
from itertools import combinations, permutations
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from msl.lattice import (
    bareiss_det,
    clear_denominators,
    gcd_maximal_minors,
    in_rational_span,
    integer_kernel,
    mat_vec,
    nullspace,
    primitive_and_length,
    rank,
    rref,
    solve_rational,
    transpose,
    unit_preimage,
)
from msl.lp import maximize


# ----------------------------------------------------------------- oracles


def leibniz_det(m):
    """Determinant as a signed sum over permutations."""
    n = len(m)
    total = 0
    for perm in permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = 1
        for i in range(n):
            prod *= m[i][perm[i]]
        total += (-1) ** inversions * prod
    return total


def minors_gcd_oracle(m):
    k, n = len(m), len(m[0])
    g = 0
    for cols in combinations(range(n), k):
        g = gcd(g, leibniz_det([[row[c] for c in cols] for row in m]))
    return g


def matrices(rows, cols, lo=-5, hi=5):
    return st.lists(st.lists(st.integers(lo, hi), min_size=cols, max_size=cols), min_size=rows, max_size=rows)


def unimodular(n):
    """Products of elementary integer row operations."""
    ops = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(-3, 3))

    def build(steps):
        u = [[int(i == j) for j in range(n)] for i in range(n)]
        for i, j, c in steps:
            if i != j:
                u[i] = [a + c * b for a, b in zip(u[i], u[j])]
        return u

    return st.lists(ops, max_size=8).map(build)


def mat_mul(a, b):
    return [[sum(x * y for x, y in zip(row, col)) for col in zip(*b)] for row in a]


# ------------------------------------------------------------ determinants


@given(matrices(4, 4))
def test_bareiss_matches_leibniz(m):
    assert bareiss_det(m) == leibniz_det(m)


def test_gcd_minors_worked_examples():
    assert gcd_maximal_minors([[1, -2, -2]]) == 1
    assert gcd_maximal_minors([[1, -2, 0, -2, 0], [1, 0, -4, 0, -4]]) == 2
    assert gcd_maximal_minors([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == 1


def test_gcd_minors_rejects_wide_shape():
    with pytest.raises(ValueError):
        gcd_maximal_minors([[1], [2]])


@given(matrices(2, 4))
def test_gcd_minors_2x4_matches_six_minor_enumeration(m):
    assert gcd_maximal_minors(m) == minors_gcd_oracle(m)


@settings(max_examples=60)
@given(matrices(3, 5, -3, 3), unimodular(3), st.permutations(range(5)), st.permutations(range(3)))
def test_gcd_minors_invariant_under_unimodular_ops(m, u, colperm, rowperm):
    base = gcd_maximal_minors(m)
    assert gcd_maximal_minors(mat_mul(u, m)) == base
    assert gcd_maximal_minors([[row[c] for c in colperm] for row in m]) == base
    assert gcd_maximal_minors([m[r] for r in rowperm]) == base


@given(matrices(3, 4, -2, 2))
def test_gcd_minors_zero_iff_rank_deficient(m):
    assert (gcd_maximal_minors(m) == 0) == (rank(m) < 3)


# ------------------------------------------------------- primitive vectors


def test_primitive_examples():
    assert primitive_and_length((2, 4, -6)) == ((1, 2, -3), 2)
    assert primitive_and_length((0, 0)) == ((0, 0), 0)


def test_type_two_vector_length_is_gcd():
    # d2 * v_I1 + d1 * v_I2 on disjoint supports, d1 = 2, d2 = 4
    a = (1, 0, 1, 0, 0)
    b = (0, 1, 0, 0, 1)
    v = tuple(4 * x + 2 * y for x, y in zip(a, b))
    assert primitive_and_length(v) == ((2, 1, 2, 0, 1), 2)


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=6))
def test_primitive_roundtrip(v):
    prim, length = primitive_and_length(v)
    assert tuple(length * x for x in prim) == tuple(v)
    if any(v):
        assert gcd(*prim) == 1 if len(prim) > 1 else abs(prim[0]) == 1


# ------------------------------------------------------------ rational spans


def test_span_examples():
    assert in_rational_span((1, 1), [(1, 0), (0, 1)])
    assert not in_rational_span((1, 1), [(1, -1)])


fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@given(st.lists(st.lists(fractions, min_size=4, max_size=4), min_size=1, max_size=3), st.lists(fractions, min_size=3, max_size=3))
def test_constructed_combinations_are_in_span(gens, coeffs):
    v = [sum(c * g[k] for c, g in zip(coeffs, gens)) for k in range(4)]
    assert in_rational_span(v, gens)


@settings(max_examples=100)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=3), st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_span_agrees_with_solve(gens, v):
    stacked = transpose(gens)
    assert in_rational_span(v, gens) == (solve_rational(stacked, v) is not None)


def test_solve_rational_cases():
    assert solve_rational([[2, 0], [0, 3]], [1, 1]) == [Fraction(1, 2), Fraction(1, 3)]
    assert solve_rational([[1, 1], [1, 1]], [1, 2]) is None
    x = solve_rational([[1, 1, 0]], [3])
    assert x is not None and x[0] + x[1] == 3
    with pytest.raises(ValueError):
        solve_rational([[1, 0]], [1, 2])


@given(matrices(3, 5, -4, 4))
def test_rref_and_nullspace(m):
    r, pivots = rref(m)
    assert len(pivots) == rank(m)
    for v in nullspace(m, 5):
        assert all(x == 0 for x in mat_vec(m, v))
    assert len(nullspace(m, 5)) == 5 - rank(m)


@given(matrices(2, 5, -4, 4))
def test_integer_kernel_is_a_saturated_basis(m):
    basis = integer_kernel(m, 5)
    assert len(basis) == 5 - rank(m)
    for v in basis:
        assert all(isinstance(x, int) for x in v)
        assert all(x == 0 for x in mat_vec(m, v))
    if basis:
        # saturation: the basis spans every integer kernel vector, i.e. gcd of minors is 1
        assert gcd_maximal_minors(basis) == 1


@given(st.lists(st.integers(-20, 20), min_size=1, max_size=5).filter(lambda v: any(v)))
def test_unit_preimage(phi):
    prim, _ = primitive_and_length(phi)
    c = unit_preimage(prim)
    assert sum(a * b for a, b in zip(prim, c)) == 1


def test_clear_denominators():
    assert clear_denominators([Fraction(1, 2), Fraction(-1, 3), 0]) == [3, -2, 0]


# -------------------------------------------------------------------- LP


def lp_oracle(c, a, b):
    """Max of c.x over {a x <= b, x >= 0} in two variables by vertex enumeration."""
    rows = [list(r) for r in a] + [[-1, 0], [0, -1]]
    rhs = list(b) + [0, 0]
    best = None
    for i, j in combinations(range(len(rows)), 2):
        det = rows[i][0] * rows[j][1] - rows[i][1] * rows[j][0]
        if det == 0:
            continue
        x = Fraction(rhs[i] * rows[j][1] - rows[i][1] * rhs[j], det)
        y = Fraction(rows[i][0] * rhs[j] - rhs[i] * rows[j][0], det)
        if all(r[0] * x + r[1] * y <= s for r, s in zip(rows, rhs)):
            val = c[0] * x + c[1] * y
            best = val if best is None else max(best, val)
    return best


@given(
    st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(0, 6)), min_size=2, max_size=4),
    st.tuples(st.integers(-3, 3), st.integers(-3, 3)),
)
def test_lp_matches_vertex_enumeration(cons, c):
    a = [[p, q] for p, q, _ in cons] + [[1, 0], [0, 1]]  # bounded box keeps the optimum finite
    b = [r for _, _, r in cons] + [10, 10]
    res = maximize(list(c), a_ub=a, b_ub=b)
    assert res.status == "optimal"
    assert res.value == lp_oracle(c, a, b)


def test_lp_infeasible_and_unbounded():
    assert maximize([1], a_eq=[[1]], b_eq=[-1]).status == "infeasible"
    assert maximize([1], a_ub=[[-1]], b_ub=[0]).status == "unbounded"
