"""Distance coordinates on the moduli space of N-marked rational tropical curves.

Ends are labelled 1..N.  Vectors in ``Q^(N choose 2)`` are indexed by pairs
``(i, j)``, ``i < j``, in lexicographic order.  The lineality space ``U_N``
consists of vectors ``x_ij = mu_i + mu_j``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from .lattice import solve_rational


@lru_cache(maxsize=None)
def pairs(n: int) -> tuple[tuple[int, int], ...]:
    return tuple(combinations(range(1, n + 1), 2))


@lru_cache(maxsize=None)
def pair_index(n: int) -> dict[tuple[int, int], int]:
    return {p: k for k, p in enumerate(pairs(n))}


def normalize_split(side: Iterable[int], n: int) -> frozenset[int]:
    """Represent a split by the side that does not contain label 1."""
    s = frozenset(side)
    return frozenset(range(1, n + 1)) - s if 1 in s else s


def split_vector(side: Iterable[int], n: int) -> tuple[int, ...]:
    """The distance vector v_I of the one-edge tree with split I | I^c."""
    s = frozenset(side)
    if not s <= frozenset(range(1, n + 1)) or not 1 < len(s) < n - 1:
        raise ValueError("not a moduli split: %s for N=%d" % (sorted(s), n))
    return tuple(int((i in s) != (j in s)) for i, j in pairs(n))


def split_vector_any(side: Iterable[int], n: int) -> tuple[int, ...]:
    """Like :func:`split_vector` but allows degenerate sides (they lie in U_N)."""
    s = frozenset(side)
    return tuple(int((i in s) != (j in s)) for i, j in pairs(n))


@dataclass(frozen=True)
class MarkedTree:
    """An abstract N-marked rational tropical curve.

    Internal vertices are ``0..num_vertices-1``; ``leaf_vertex[i-1]`` is the
    vertex carrying end i; ``edges`` are bounded edges ``(u, v, length)``.
    """

    n_leaves: int
    num_vertices: int
    leaf_vertex: tuple[int, ...]
    edges: tuple[tuple[int, int, Fraction], ...]

    def __post_init__(self) -> None:
        if len(self.leaf_vertex) != self.n_leaves:
            raise ValueError("one vertex per leaf required")
        if len(self.edges) != self.num_vertices - 1:
            raise ValueError("not a tree: wrong number of edges")
        adj = self.adjacency()
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w, _ in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != self.num_vertices:
            raise ValueError("not connected")
        for v in range(self.num_vertices):
            val = len(adj[v]) + self.leaf_vertex.count(v)
            if val < 3:
                raise ValueError("vertex %d has valence %d < 3" % (v, val))
        if any(length <= 0 for _, _, length in self.edges):
            raise ValueError("bounded edges need positive length")

    def adjacency(self) -> dict[int, list[tuple[int, Fraction]]]:
        adj: dict[int, list[tuple[int, Fraction]]] = defaultdict(list)
        for u, v, length in self.edges:
            adj[u].append((v, Fraction(length)))
            adj[v].append((u, Fraction(length)))
        return adj

    @classmethod
    def from_splits(cls, n: int, weighted_splits: Sequence[tuple[Iterable[int], Fraction]]) -> "MarkedTree":
        """Build the tree realising a compatible family of splits."""
        clusters = []
        for side, length in weighted_splits:
            clusters.append((normalize_split(side, n), Fraction(length)))
        clusters.sort(key=lambda c: (len(c[0]), sorted(c[0])))
        vertex_of = {}
        # vertex 0 is the one carrying end 1
        leaf_vertex = [0] * n
        edges = []
        for idx, (s, _) in enumerate(clusters):
            vertex_of[s] = idx + 1

        def parent(s: frozenset[int]) -> int:
            best = None
            for t, _ in clusters:
                if s < t and (best is None or len(t) < len(best)):
                    best = t
            return 0 if best is None else vertex_of[best]

        for s, length in clusters:
            edges.append((parent(s), vertex_of[s], length))
        for i in range(2, n + 1):
            leaf_vertex[i - 1] = parent(frozenset([i]))
        return cls(n, len(clusters) + 1, tuple(leaf_vertex), tuple(edges))

    def splits(self) -> dict[frozenset[int], Fraction]:
        """Split (side without label 1) and length of every bounded edge."""
        adj = self.adjacency()
        result = {}
        for u, v, length in self.edges:
            # leaves reachable from v without crossing (u, v)
            side = set()
            stack, seen = [v], {u, v}
            while stack:
                x = stack.pop()
                side.update(i + 1 for i, w in enumerate(self.leaf_vertex) if w == x)
                for y, _ in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            result[normalize_split(side, self.n_leaves)] = Fraction(length)
        return result


def tree_type(t: MarkedTree) -> frozenset[frozenset[int]]:
    """Combinatorial type: the set of splits induced by bounded edges."""
    return frozenset(t.splits())


def distance_vector(t: MarkedTree) -> tuple[Fraction, ...]:
    """Leaf-to-leaf path lengths (ends have length zero)."""
    adj = t.adjacency()
    dist_from: dict[int, dict[int, Fraction]] = {}
    for start in set(t.leaf_vertex):
        d = {start: Fraction(0)}
        stack = [start]
        while stack:
            x = stack.pop()
            for y, length in adj[x]:
                if y not in d:
                    d[y] = d[x] + length
                    stack.append(y)
        dist_from[start] = d
    lv = t.leaf_vertex
    return tuple(dist_from[lv[i - 1]][lv[j - 1]] for i, j in pairs(t.n_leaves))


def lineality_vector(mu: Sequence, n: int) -> tuple:
    """The element of U_N with entries mu_i + mu_j."""
    return tuple(mu[i - 1] + mu[j - 1] for i, j in pairs(n))


def _check_dim(x: Sequence, n: int) -> None:
    if len(x) != len(pairs(n)):
        raise ValueError("expected a vector of length %d for N=%d" % (len(pairs(n)), n))


def is_zero_mod_UN(x: Sequence, n: int) -> bool:
    """True iff x lies in U_N, decided by solving x_ij = mu_i + mu_j exactly."""
    if n < 4:
        raise ValueError("N must be at least 4")
    _check_dim(x, n)
    rows = [[int(k in (i, j)) for k in range(1, n + 1)] for i, j in pairs(n)]
    return solve_rational(rows, [Fraction(v) for v in x]) is not None


def forgetful_project(x: Sequence, n: int, subset: Iterable[int]) -> tuple:
    """Restrict to the distances between ends in a 4-element label set.

    The result is indexed by the pairs of the sorted subset, relabelled 1..4.
    """
    labels = sorted(subset)
    if len(labels) != 4 or len(set(labels)) != 4:
        raise ValueError("forgetful projection needs exactly four labels")
    idx = pair_index(n)
    return tuple(x[idx[(a, b)]] for a, b in combinations(labels, 2))


def four_point_zero(y: Sequence) -> bool:
    """Membership of a 6-vector in U_4: the three pair sums agree."""
    # order 12, 13, 14, 23, 24, 34
    return y[0] + y[5] == y[1] + y[4] == y[2] + y[3]


def is_zero_mod_UN_by_projections(x: Sequence, n: int) -> bool:
    """Zero test through all forgetful maps to M_0,4."""
    if n < 4:
        raise ValueError("N must be at least 4")
    _check_dim(x, n)
    return all(four_point_zero(forgetful_project(x, n, s)) for s in combinations(range(1, n + 1), 4))


def lineality_coefficients(x: Sequence, n: int) -> list[Fraction]:
    """The mu of the U_N element subtracted by :func:`canonical_rep_mod_UN`.

    It is chosen so that the representative vanishes on the entries
    {1,2}, {1,3}, {2,3} and {1,k} for k >= 4.  This is a linear section.
    """
    idx = pair_index(n)
    x12, x13, x23 = (Fraction(x[idx[p]]) for p in ((1, 2), (1, 3), (2, 3)))
    mu1 = (x12 + x13 - x23) / 2
    mu = [mu1, x12 - mu1, x13 - mu1]
    mu.extend(Fraction(x[idx[(1, k)]]) - mu1 for k in range(4, n + 1))
    return mu


def canonical_rep_mod_UN(x: Sequence, n: int) -> tuple[Fraction, ...]:
    """Deterministic representative of the class of x modulo U_N.

    For N = 3 the quotient is a point and the representative is zero.
    """
    if n < 3:
        raise ValueError("N must be at least 3")
    _check_dim(x, n)
    mu = lineality_coefficients(x, n)
    return tuple(Fraction(v) - u for v, u in zip(x, lineality_vector(mu, n)))
