"""One-dimensional local moduli spaces at a vertex over a vertex of the target.

A star is modelled on the standard line in R^q: ray k < q points along -e_(k+1)
and ray q along e_1 + ... + e_q.  Ends are labelled 1..N_V; a contracted end
has no ray.  Ray vectors live in Q^(N_V choose 2) modulo U_(N_V).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterator, Optional, Sequence

from .hurwitz import DEFAULT_MAX_D, HurwitzProblem, hurwitz_number_marked
from .lattice import primitive_and_length
from .maptypes import riemann_hurwitz
from .maptypes import rdim as rdim_formula
from .trees import canonical_rep_mod_UN, forgetful_project, is_zero_mod_UN, split_vector


@dataclass(frozen=True)
class StarEnd:
    label: int
    ray: Optional[int]  # None for a contracted end
    weight: int


@dataclass(frozen=True)
class VertexStar:
    q: int
    ends: tuple[StarEnd, ...]

    def __post_init__(self) -> None:
        if self.q < 1:
            raise ValueError("q must be at least 1")
        labels = sorted(e.label for e in self.ends)
        if labels != list(range(1, len(self.ends) + 1)):
            raise ValueError("end labels must be 1..N_V")
        for e in self.ends:
            if e.ray is None:
                if e.weight != 0:
                    raise ValueError("contracted ends have weight 0")
            elif not 0 <= e.ray <= self.q or e.weight < 1:
                raise ValueError("bad end %s" % (e,))
        cover = [sum(e.weight for e in self.ends if e.ray == k) for k in range(self.q + 1)]
        if len(set(cover)) != 1 or cover[0] == 0:
            raise ValueError("star is not balanced: ray coverages %s" % cover)

    @classmethod
    def of(cls, q: int, ends: Sequence[tuple[Optional[int], int]]) -> "VertexStar":
        """Build from (ray, weight) pairs, labelled 1, 2, ... in the given order."""
        return cls(q, tuple(StarEnd(i + 1, r, w) for i, (r, w) in enumerate(ends)))

    @property
    def N(self) -> int:
        return len(self.ends)

    @property
    def n(self) -> int:
        return sum(1 for e in self.ends if e.ray is None)

    @property
    def d(self) -> int:
        return sum(e.weight for e in self.ends if e.ray == 0)

    def end(self, label: int) -> StarEnd:
        return self.ends[label - 1]

    def rh(self) -> int:
        return riemann_hurwitz(self.N, self.n, self.d, self.q + 1)

    def rdim(self) -> int:
        return rdim_formula(self.N, self.d, self.q + 1, 1)

    def ray_direction(self, k: int) -> tuple[int, ...]:
        if k == self.q:
            return tuple(1 for _ in range(self.q))
        return tuple(-int(j == k) for j in range(self.q))

    def direction(self, label: int) -> tuple[int, ...]:
        e = self.end(label)
        if e.ray is None:
            return tuple(0 for _ in range(self.q))
        return tuple(e.weight * x for x in self.ray_direction(e.ray))


def star_hurwitz(q: int, parts: Sequence[tuple[int, int]], max_d: int = DEFAULT_MAX_D) -> Fraction:
    """H for a pinned vertex with non-contracted (ray, weight) parts."""
    d = sum(w for r, w in parts if r == 0)
    profiles = [[w for r, w in parts if r == k] for k in range(q + 1)]
    return hurwitz_number_marked(HurwitzProblem.of(d, profiles), max_d)


@dataclass(frozen=True)
class Resolution:
    kind: str  # "I", "II" or "contracted"
    end: int  # type I: first merged end; type II: split end; contracted: partner end
    other: int = 0  # type I: second merged end
    d1: int = 0
    d2: int = 0
    side1: tuple[int, ...] = ()
    side2: tuple[int, ...] = ()


def enumerate_resolutions(s: VertexStar) -> list[Resolution]:
    if s.rdim() != 1:
        raise ValueError("rdim is %d, expected 1" % s.rdim())
    if s.n > 1 or s.rh() < 0:
        raise ValueError("star violates RH >= 0")
    out = []
    if s.n == 1:
        c = next(e.label for e in s.ends if e.ray is None)
        for e in s.ends:
            if e.ray is not None:
                out.append(Resolution("contracted", e.label, c))
        return out
    for a, b in combinations(s.ends, 2):
        if a.ray == b.ray:
            out.append(Resolution("I", a.label, b.label, a.weight + b.weight))
    for i in s.ends:
        rest = [e for e in s.ends if e.label != i.label]
        for d1 in range(1, i.weight):
            d2 = i.weight - d1
            for k in range(1, len(rest)):
                for side1 in combinations(rest, k):
                    side2 = [e for e in rest if e not in side1]
                    if min(e.label for e in side1) > min(e.label for e in side2):
                        continue
                    if not _side_ok(s, i.ray, d1, side1) or not _side_ok(s, i.ray, d2, side2):
                        continue
                    out.append(Resolution(
                        "II", i.label, 0, d1, d2,
                        tuple(e.label for e in side1), tuple(e.label for e in side2),
                    ))
    return out


def _side_ok(s: VertexStar, split_ray: int, dk: int, side: Sequence[StarEnd]) -> bool:
    """Per-ray balance and RH >= 0 for the pinned vertex on one side.

    The side holds the ends in ``side`` and an edge of weight dk along the
    split ray; its own degree is whatever common coverage results.
    """
    cover = [0] * (s.q + 1)
    cover[split_ray] += dk
    for e in side:
        cover[e.ray] += e.weight
    if len(set(cover)) != 1:
        return False
    return riemann_hurwitz(len(side) + 1, 0, cover[0], s.q + 1) >= 0


def ray_vector(res: Resolution, s: VertexStar) -> tuple[int, ...]:
    N = s.N
    if res.kind in ("I", "contracted"):
        return split_vector({res.end, res.other}, N)
    a = split_vector(res.side1, N)
    b = split_vector(res.side2, N)
    return tuple(res.d2 * x + res.d1 * y for x, y in zip(a, b))


def resolution_hurwitz(res: Resolution, s: VertexStar, max_d: int = DEFAULT_MAX_D) -> Fraction:
    """Product of Hurwitz numbers of the pinned vertices of the resolution."""
    if res.kind == "contracted":
        parts = [(e.ray, e.weight) for e in s.ends if e.ray is not None]
        return star_hurwitz(s.q, parts, max_d)
    if res.kind == "I":
        merged = s.end(res.end)
        parts = [(e.ray, e.weight) for e in s.ends if e.label not in (res.end, res.other)]
        parts.append((merged.ray, res.d1))
        return star_hurwitz(s.q, parts, max_d)
    ray = s.end(res.end).ray
    h = Fraction(1)
    for dk, side in ((res.d1, res.side1), (res.d2, res.side2)):
        parts = [(s.end(j).ray, s.end(j).weight) for j in side] + [(ray, dk)]
        h *= star_hurwitz(s.q, parts, max_d)
    return h


def resolution_weight(res: Resolution, s: VertexStar, max_d: int = DEFAULT_MAX_D) -> Fraction:
    """Gluing weight of the resolution's cell."""
    h = resolution_hurwitz(res, s, max_d)
    if res.kind == "II":
        return gcd(res.d1, res.d2) * h
    return h


@dataclass(frozen=True)
class WeightedRay:
    primitive: tuple[int, ...]
    weight: Fraction
    resolution: Resolution


@dataclass
class LocalFan:
    star: VertexStar
    rays: list[WeightedRay]  # support (positive weight)
    zero_weight: list[Resolution]


def build_local_fan(s: VertexStar, max_d: int = DEFAULT_MAX_D) -> LocalFan:
    rays, zeros = [], []
    for res in enumerate_resolutions(s):
        w = resolution_weight(res, s, max_d)
        prim, length = primitive_and_length(ray_vector(res, s))
        if w == 0:
            zeros.append(res)
            continue
        if length == 0:
            raise ValueError("zero ray vector for %s" % (res,))
        rays.append(WeightedRay(prim, w, res))
    return LocalFan(s, rays, zeros)


def check_balanced_local(rays: Sequence[WeightedRay], N: int) -> tuple[bool, tuple[Fraction, ...]]:
    """Is the weighted sum of primitive ray vectors zero modulo U_N?

    The residual is returned as its canonical representative.
    """
    total = [Fraction(0)] * (N * (N - 1) // 2)
    for ray in rays:
        total = [t + ray.weight * x for t, x in zip(total, ray.primitive)]
    return is_zero_mod_UN(total, N), canonical_rep_mod_UN(total, N)


# --------------------------------------------------------------- projections

_FOUR_SPLITS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


def split_multiple(y: Sequence) -> tuple[int, Optional[tuple[tuple[int, int], tuple[int, int]]]]:
    """Write a 6-vector as c * v_split modulo U_4; positions refer to sorted labels.

    Returns (0, None) for vectors in U_4.
    """
    # order 12, 13, 14, 23, 24, 34
    sums = [y[0] + y[5], y[1] + y[4], y[2] + y[3]]
    lo = min(sums)
    others = [x for x in sums if x != lo]
    if not others:
        return 0, None
    if len(others) != 2 or others[0] != others[1]:
        raise ValueError("projection is not a multiple of a split vector")
    c = Fraction(others[0] - lo, 2)
    if c.denominator != 1:
        raise ValueError("non-integral split multiple")
    return int(c), _FOUR_SPLITS[sums.index(lo)]


def ft_multiplicity(res: Resolution, s: VertexStar, subset: Sequence[int]) -> tuple[int, Optional[frozenset]]:
    """Multiple c and split of the projection of the ray vector to M_0,4 of ``subset``.

    The split is returned as the pair (frozenset) containing the smallest label.
    """
    labels = sorted(subset)
    y = forgetful_project(ray_vector(res, s), s.N, labels)
    c, split = split_multiple(y)
    if split is None:
        return 0, None
    a, b = split[0]
    return c, frozenset((labels[a], labels[b]))


def ft_multiplicity_table(res: Resolution, subset: Sequence[int]) -> tuple[int, Optional[frozenset]]:
    """The case table for boundary multiplicities, without any vector arithmetic."""
    sub = set(subset)
    low = min(sub)

    def pair_with_low(pair: set) -> frozenset:
        return frozenset(pair if low in pair else sub - pair)

    if res.kind in ("I", "contracted"):
        pair = {res.end, res.other}
        return (1, pair_with_low(pair)) if pair <= sub else (0, None)
    in1 = sub & set(res.side1)
    in2 = sub & set(res.side2)
    if res.end in sub:
        if len(in1) == 1 and len(in2) == 2:
            return res.d1, pair_with_low(in1 | {res.end})
        if len(in1) == 2 and len(in2) == 1:
            return res.d2, pair_with_low(in2 | {res.end})
        return 0, None
    if len(in1) == 2 and len(in2) == 2:
        return res.d1 + res.d2, pair_with_low(in1)
    return 0, None


def wdvv_totals(s: VertexStar, subset: Sequence[int], max_d: int = DEFAULT_MAX_D) -> dict[frozenset, Fraction]:
    """Per split of ``subset``: sum over resolutions of H * boundary multiplicity."""
    labels = sorted(subset)
    totals = {frozenset((labels[0], x)): Fraction(0) for x in labels[1:]}
    for res in enumerate_resolutions(s):
        c, split = ft_multiplicity(res, s, labels)
        if c:
            totals[split] += resolution_hurwitz(res, s, max_d) * c
    return totals


# ------------------------------------------------------------------- corpus


def _partitions(n: int, largest: Optional[int] = None) -> Iterator[tuple[int, ...]]:
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def all_stars(qs: Sequence[int] = (2, 3), max_d: int = 5, max_n: int = 8) -> list[VertexStar]:
    """Every star with rdim 1 and n_V <= 1 up to the bounds.

    Profiles are taken per ray (ordered); labels run through the contracted
    end first and then the rays in order.
    """
    out = []
    for q in qs:
        for d in range(1, max_d + 1):
            for n_v in (0, 1):
                target = d * (q - 1) + 3 - n_v  # non-contracted ends for rdim 1
                if target + n_v > max_n:
                    continue

                def rec(k: int, chosen: list[tuple[int, ...]]) -> None:
                    used = sum(len(p) for p in chosen)
                    if k == q + 1:
                        if used == target:
                            ends: list[tuple[Optional[int], int]] = [(None, 0)] * n_v
                            for ray, mu in enumerate(chosen):
                                ends.extend((ray, w) for w in mu)
                            out.append(VertexStar.of(q, ends))
                        return
                    for mu in _partitions(d):
                        if used + len(mu) <= target:
                            chosen.append(mu)
                            rec(k + 1, chosen)
                            chosen.pop()

                rec(0, [])
    return out
