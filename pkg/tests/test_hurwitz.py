from collections import Counter
from fractions import Fraction
from itertools import permutations, product
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from msl.hurwitz import (
    HurwitzProblem,
    cycle_type,
    genus_zero_dimension,
    hurwitz_for_local_degree,
    hurwitz_number_marked,
    raw_count,
)


def oracle_raw(d, profiles):
    """Every tuple in S_d^k with the right cycle types, product identity, transitive."""
    perms = list(permutations(range(d)))

    def ctype(p):
        seen, out = set(), []
        for s in range(d):
            if s in seen:
                continue
            n, x = 0, s
            while x not in seen:
                seen.add(x)
                x = p[x]
                n += 1
            out.append(n)
        return tuple(sorted(out, reverse=True))

    choices = [[p for p in perms if ctype(p) == tuple(sorted(mu, reverse=True))] for mu in profiles]
    count = 0
    for tup in product(*choices):
        prod = tuple(range(d))
        for p in tup:
            prod = tuple(p[prod[i]] for i in range(d))
        if prod != tuple(range(d)):
            continue
        reach, frontier = {0}, [0]
        while frontier:
            x = frontier.pop()
            for p in tup:
                if p[x] not in reach:
                    reach.add(p[x])
                    frontier.append(p[x])
        count += len(reach) == d
    return count


def oracle_h(d, profiles):
    marks = 1
    for mu in profiles:
        for m in Counter(mu).values():
            marks *= factorial(m)
    return Fraction(oracle_raw(d, profiles) * marks, factorial(d))


def partitions(n, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


def rigid_problems(max_d, max_points=4):
    out = []
    for d in range(1, max_d + 1):
        parts = list(partitions(d))
        for k in range(2, max_points + 1):
            for combo in product(parts, repeat=k):
                if list(combo) != sorted(combo):
                    continue
                p = HurwitzProblem.of(d, combo)
                if genus_zero_dimension(p) == 0:
                    out.append(p)
    return out


# frozen oracle values
FROZEN = {
    (2, ((2,), (1, 1), (2,))): Fraction(1),
    (3, ((3,), (3,), (1, 1, 1))): Fraction(2),
    (2, ((2,), (2,))): Fraction(1, 2),
    (3, ((3,), (3,), (2, 1))): Fraction(0),
}


def test_oracle_reproduces_frozen_values():
    for (d, profiles), value in FROZEN.items():
        assert oracle_h(d, profiles) == value


def test_worked_values():
    assert hurwitz_number_marked(HurwitzProblem.of(2, [[2], [1, 1], [2]])) == 1
    assert hurwitz_number_marked(HurwitzProblem.of(3, [[3], [3], [1, 1, 1]])) == 2
    assert hurwitz_number_marked(HurwitzProblem.of(2, [[2], [2]])) == Fraction(1, 2)


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_degree_one(k):
    p = HurwitzProblem.of(1, [[1]] * k)
    assert genus_zero_dimension(p) == 0 or k != 2
    if genus_zero_dimension(p) == 0:
        assert hurwitz_number_marked(p) == 1
    assert oracle_h(1, [[1]] * k) == 1


def test_genus_zero_dimension():
    assert genus_zero_dimension(HurwitzProblem.of(2, [[2], [1, 1], [2]])) == 0
    assert genus_zero_dimension(HurwitzProblem.of(1, [[1], [1], [1]])) == 0
    p = HurwitzProblem.of(3, [[3], [3], [2, 1]])
    assert genus_zero_dimension(p) == -1


def test_dimension_is_riemann_hurwitz_excess():
    # 2d - 2 minus the total ramification sum(d - len(mu))
    for d in range(1, 6):
        for k in range(1, 5):
            for combo in product(list(partitions(d)), repeat=k):
                p = HurwitzProblem.of(d, combo)
                assert genus_zero_dimension(p) == (2 * d - 2) - sum(d - len(mu) for mu in combo)


def test_no_transitive_factorization():
    p = HurwitzProblem.of(3, [[3], [3], [2, 1]])
    assert raw_count(p) == 0


def test_non_rigid_problem_rejected():
    with pytest.raises(ValueError):
        hurwitz_number_marked(HurwitzProblem.of(2, [[2], [2], [2]]))


def test_degree_bound():
    with pytest.raises(ValueError):
        hurwitz_number_marked(HurwitzProblem.of(3, [[3], [3], [1, 1, 1]]), max_d=2)


def test_bad_partition_rejected():
    with pytest.raises(ValueError):
        HurwitzProblem.of(3, [[2], [3]])


@pytest.mark.parametrize("p", rigid_problems(4), ids=lambda p: "%d:%s" % (p.d, p.profiles))
def test_all_rigid_problems_up_to_degree_four(p):
    value = hurwitz_number_marked(p)
    assert value >= 0
    assert (value * factorial(p.d)).denominator == 1
    # conjugation invariance: fixing the first permutation changes nothing
    assert raw_count(p, fix_first=True) == raw_count(p, fix_first=False)
    # symmetry in the order of the branch points
    for perm in set(permutations(p.profiles)):
        assert hurwitz_number_marked(HurwitzProblem(p.d, perm)) == value


@pytest.mark.parametrize("p", [q for q in rigid_problems(3)], ids=lambda p: "%d:%s" % (p.d, p.profiles))
def test_matches_naive_oracle(p):
    assert hurwitz_number_marked(p) == oracle_h(p.d, p.profiles)


def test_cycle_type():
    assert cycle_type((1, 2, 0, 3)) == (3, 1)


def test_local_degree_wrapper():
    link = [(-1, 0), (0, -1), (1, 1)]
    # the weight-2 merged vertex of the plane conic example
    assert hurwitz_for_local_degree(link, [(-2, 0), (0, -1), (0, -1), (2, 2)]) == 1
    assert hurwitz_for_local_degree(link, [(-1, 0), (0, -1), (1, 1)]) == 1
    assert hurwitz_for_local_degree(link, [(0, 0), (-1, 0), (0, -1), (1, 1), (0, 0)]) == 1
    with pytest.raises(ValueError):
        hurwitz_for_local_degree(link, [(-2, 0), (0, -1), (1, 1)])


@settings(max_examples=30)
@given(st.sampled_from(rigid_problems(4)), st.data())
def test_relabelling_equal_parts_is_consistent(p, data):
    # H divided by the marking factor is the unmarked count and is label independent
    shuffled = tuple(tuple(data.draw(st.permutations(mu))) for mu in p.profiles)
    assert hurwitz_number_marked(HurwitzProblem.of(p.d, shuffled)) == hurwitz_number_marked(p)
