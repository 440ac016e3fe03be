"""Marked genus-zero Hurwitz numbers by counting permutation factorizations.

A problem is a degree d and one partition of d per branch point.  The marked
number counts covers whose preimages of the branch points are labelled, each
weighted by one over its automorphism count:

    H = raw * prod_i prod_m mult_m(mu_i)! / d!

where raw is the number of transitive tuples (s_0, ..., s_q) in S_d with
cycle types mu_i and product the identity.
"""

from __future__ import annotations

import threading
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import factorial
from typing import Iterable, Sequence

from .lattice import primitive_and_length

DEFAULT_MAX_D = 6

Perm = tuple[int, ...]


@dataclass(frozen=True)
class HurwitzProblem:
    d: int
    profiles: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("degree must be positive")
        if not self.profiles:
            raise ValueError("need at least one branch profile")
        for mu in self.profiles:
            if any(p < 1 for p in mu) or sum(mu) != self.d:
                raise ValueError("profile %s is not a partition of %d" % (mu, self.d))

    @classmethod
    def of(cls, d: int, profiles: Iterable[Iterable[int]]) -> "HurwitzProblem":
        return cls(d, tuple(tuple(sorted(mu, reverse=True)) for mu in profiles))

    @property
    def num_parts(self) -> int:
        return sum(len(mu) for mu in self.profiles)


def genus_zero_dimension(p: HurwitzProblem) -> int:
    """Dimension of the space of such covers of P^1 with moving branch points removed."""
    return 2 * p.d - 2 + p.num_parts - p.d * len(p.profiles)


def cycle_type(perm: Perm) -> tuple[int, ...]:
    seen = [False] * len(perm)
    lengths = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        n = 0
        x = start
        while not seen[x]:
            seen[x] = True
            x = perm[x]
            n += 1
        lengths.append(n)
    return tuple(sorted(lengths, reverse=True))


def _compose(a: Perm, b: Perm) -> Perm:
    # apply a first, then b
    return tuple(b[a[i]] for i in range(len(a)))


def _inverse(a: Perm) -> Perm:
    inv = [0] * len(a)
    for i, x in enumerate(a):
        inv[x] = i
    return tuple(inv)


def _class_members(d: int) -> dict[tuple[int, ...], list[Perm]]:
    table: dict[tuple[int, ...], list[Perm]] = {}
    for perm in permutations(range(d)):
        table.setdefault(cycle_type(perm), []).append(perm)
    return table


_CLASS_CACHE: dict[int, dict[tuple[int, ...], list[Perm]]] = {}
_LOCK = threading.Lock()


def conjugacy_classes(d: int) -> dict[tuple[int, ...], list[Perm]]:
    with _LOCK:
        if d not in _CLASS_CACHE:
            _CLASS_CACHE[d] = _class_members(d)
        return _CLASS_CACHE[d]


def class_representative(mu: Sequence[int]) -> Perm:
    """The permutation with consecutive cycles (0 1 .. mu_0-1)(mu_0 ..) ..."""
    perm = []
    start = 0
    for part in mu:
        perm.extend(start + (k + 1) % part for k in range(part))
        start += part
    return tuple(perm)


def _transitive(perms: Sequence[Perm], d: int) -> bool:
    parent = list(range(d))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for perm in perms:
        for i, j in enumerate(perm):
            a, b = find(i), find(j)
            if a != b:
                parent[a] = b
    root = find(0)
    return all(find(x) == root for x in range(d))


def _count_with_first(p: HurwitzProblem, firsts: Sequence[Perm]) -> int:
    classes = conjugacy_classes(p.d)
    middle = [classes.get(mu, []) for mu in p.profiles[1:-1]]
    last_type = p.profiles[-1] if len(p.profiles) > 1 else None
    count = 0

    def rec(k: int, product: Perm, chosen: list[Perm]) -> None:
        nonlocal count
        if k == len(middle):
            if last_type is None:
                ok = all(x == i for i, x in enumerate(product))
                tail = []
            else:
                last = _inverse(product)
                ok = cycle_type(last) == last_type
                tail = [last]
            if ok and _transitive(chosen + tail, p.d):
                count += 1
            return
        for perm in middle[k]:
            chosen.append(perm)
            rec(k + 1, _compose(product, perm), chosen)
            chosen.pop()

    for first in firsts:
        rec(0, first, [first])
    return count


def raw_count(p: HurwitzProblem, fix_first: bool = True) -> int:
    """Number of transitive factorizations of the identity with the given cycle types.

    With ``fix_first`` the first permutation is a fixed class representative
    and the result is scaled by the class size; otherwise every member of
    the class is enumerated.  Both paths must agree.
    """
    mu0 = p.profiles[0]
    members = conjugacy_classes(p.d)[mu0]
    if fix_first:
        return len(members) * _count_with_first(p, [class_representative(mu0)])
    return _count_with_first(p, members)


def marking_factor(p: HurwitzProblem) -> int:
    f = 1
    for mu in p.profiles:
        for mult in Counter(mu).values():
            f *= factorial(mult)
    return f


_H_CACHE: dict[HurwitzProblem, Fraction] = {}


def hurwitz_number_marked(p: HurwitzProblem, max_d: int = DEFAULT_MAX_D) -> Fraction:
    if genus_zero_dimension(p) != 0:
        raise ValueError("not a rigid local problem: dimension %d" % genus_zero_dimension(p))
    if p.d > max_d:
        raise ValueError("degree %d exceeds the bound %d" % (p.d, max_d))
    # the number does not depend on the order of the branch points
    key = HurwitzProblem(p.d, tuple(sorted(p.profiles)))
    with _LOCK:
        hit = _H_CACHE.get(key)
    if hit is not None:
        return hit
    value = Fraction(raw_count(key) * marking_factor(key), factorial(key.d))
    with _LOCK:
        _H_CACHE[key] = value
    return value


def profiles_from_directions(
    d: int, link_directions: Sequence[Sequence[int]], end_directions: Sequence[Sequence[int]]
) -> HurwitzProblem:
    """Group non-zero end directions by the link ray they point along.

    ``link_directions`` are the primitive outgoing directions of the target at the
    vertex; zero entries of ``end_directions`` (contracted ends) are ignored.
    """
    parts: list[list[int]] = [[] for _ in link_directions]
    prims = [tuple(u) for u in link_directions]
    for w in end_directions:
        prim, m = primitive_and_length(w)
        if m == 0:
            continue
        if prim not in prims:
            raise ValueError("direction not along the target: %s" % (tuple(w),))
        parts[prims.index(prim)].append(m)
    return HurwitzProblem.of(d, parts)


def hurwitz_for_local_degree(
    link_directions: Sequence[Sequence[int]],
    end_directions: Sequence[Sequence[int]],
    max_d: int = DEFAULT_MAX_D,
) -> Fraction:
    """H of a vertex over a vertex of the target; contracted ends are dropped."""
    coverage: Counter = Counter()
    for w in end_directions:
        prim, m = primitive_and_length(w)
        if m:
            coverage[prim] += m
    values = {coverage.get(tuple(u), 0) for u in link_directions}
    if len(values) != 1 or 0 in values:
        raise ValueError("local degree is not balanced over the link")
    return hurwitz_number_marked(profiles_from_directions(values.pop(), link_directions, end_directions), max_d)
