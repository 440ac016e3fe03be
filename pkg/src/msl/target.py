"""Smooth rational tropical curves in R^r (all weights one)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence, Union

from .lattice import gcd_maximal_minors, primitive_and_length, rank

IntVec = tuple[int, ...]


@dataclass(frozen=True)
class Edge:
    tail: int
    head: int
    direction: IntVec  # primitive, pointing from tail to head
    length: Fraction  # lattice length


@dataclass(frozen=True)
class Ray:
    vertex: int
    direction: IntVec  # primitive, pointing to infinity


@dataclass(frozen=True, order=True)
class Cell:
    """A cell of the target: ``("vertex", i)``, ``("edge", i)`` or ``("ray", i)``."""

    kind: str
    index: int

    def __str__(self) -> str:
        return "%s%d" % (self.kind[0].upper(), self.index)


@dataclass(frozen=True)
class CellRef:
    """A point of the target: a vertex, or a cell with a coordinate along it.

    The coordinate is measured in lattice length from the tail of an edge or
    from the base vertex of a ray.
    """

    cell: Cell
    coord: Optional[Fraction] = None


@dataclass(frozen=True)
class VertexLink:
    q: int
    directions: tuple[IntVec, ...]


@dataclass(frozen=True)
class EdgeLink:
    direction: IntVec


LocalLink = Union[VertexLink, EdgeLink]


@dataclass(frozen=True)
class TargetCurve:
    vertices: tuple[tuple[Fraction, ...], ...]
    edges: tuple[Edge, ...] = ()
    rays: tuple[Ray, ...] = ()

    @property
    def ambient_dim(self) -> int:
        return len(self.vertices[0])

    def outgoing(self, v: int) -> list[tuple[Cell, IntVec]]:
        """Cells leaving vertex v with their primitive outgoing directions."""
        out = []
        for i, e in enumerate(self.edges):
            if e.tail == v:
                out.append((Cell("edge", i), e.direction))
            if e.head == v:
                out.append((Cell("edge", i), tuple(-x for x in e.direction)))
        for i, r in enumerate(self.rays):
            if r.vertex == v:
                out.append((Cell("ray", i), r.direction))
        return out

    def valence(self, v: int) -> int:
        return len(self.outgoing(v))

    def cells(self) -> list[Cell]:
        return (
            [Cell("vertex", i) for i in range(len(self.vertices))]
            + [Cell("edge", i) for i in range(len(self.edges))]
            + [Cell("ray", i) for i in range(len(self.rays))]
        )

    def cell_direction(self, c: Cell) -> IntVec:
        if c.kind == "edge":
            return self.edges[c.index].direction
        if c.kind == "ray":
            return self.rays[c.index].direction
        raise ValueError("vertices have no direction")

    def cell_endpoints(self, c: Cell) -> tuple[int, Optional[int]]:
        """(tail, head) vertex indices; head is None for rays."""
        if c.kind == "edge":
            e = self.edges[c.index]
            return e.tail, e.head
        if c.kind == "ray":
            return self.rays[c.index].vertex, None
        raise ValueError("vertices have no endpoints")

    def cell_length(self, c: Cell) -> Optional[Fraction]:
        return self.edges[c.index].length if c.kind == "edge" else None

    def point(self, ref: CellRef) -> tuple[Fraction, ...]:
        if ref.cell.kind == "vertex":
            return self.vertices[ref.cell.index]
        tail, _ = self.cell_endpoints(ref.cell)
        u = self.cell_direction(ref.cell)
        return tuple(p + ref.coord * x for p, x in zip(self.vertices[tail], u))

    def sum_val_minus_two(self) -> int:
        return sum(self.valence(v) - 2 for v in range(len(self.vertices)))


def standard_line(q: int) -> TargetCurve:
    """The standard tropical line in R^q: rays -e_1..-e_q and e_1+..+e_q."""
    if q < 1:
        raise ValueError("q must be at least 1")
    rays = []
    for i in range(q):
        rays.append(Ray(0, tuple(-int(j == i) for j in range(q))))
    rays.append(Ray(0, tuple(1 for _ in range(q))))
    return TargetCurve((tuple(Fraction(0) for _ in range(q)),), (), tuple(rays))


def validate_smooth(curve: TargetCurve) -> list[str]:
    """List of violations of smoothness; empty when the curve is a smooth rational curve."""
    problems = []
    nv = len(curve.vertices)
    if nv == 0:
        return ["curve has no vertices"]
    r = curve.ambient_dim
    if any(len(p) != r for p in curve.vertices):
        problems.append("vertex positions have inconsistent dimension")
        return problems
    for i, e in enumerate(curve.edges):
        if not (0 <= e.tail < nv and 0 <= e.head < nv) or e.tail == e.head:
            problems.append("edge %d has invalid endpoints" % i)
            continue
        if len(e.direction) != r or primitive_and_length(e.direction)[1] != 1:
            problems.append("edge %d direction %s is not primitive" % (i, e.direction))
            continue
        if e.length <= 0:
            problems.append("edge %d has non-positive length" % i)
            continue
        expect = tuple(p + e.length * x for p, x in zip(curve.vertices[e.tail], e.direction))
        if expect != tuple(curve.vertices[e.head]):
            problems.append("edge %d: head position differs from tail + length*direction" % i)
    for i, ray in enumerate(curve.rays):
        if not 0 <= ray.vertex < nv:
            problems.append("ray %d has invalid vertex" % i)
        elif len(ray.direction) != r or primitive_and_length(ray.direction)[1] != 1:
            problems.append("ray %d direction %s is not primitive" % (i, ray.direction))
    if problems:
        return problems
    # tree-ness
    if len(curve.edges) != nv - 1:
        problems.append("underlying graph is not a tree (%d vertices, %d edges)" % (nv, len(curve.edges)))
    parent = list(range(nv))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in curve.edges:
        parent[find(e.tail)] = find(e.head)
    if len({find(v) for v in range(nv)}) != 1:
        problems.append("underlying graph is not connected")
    for v in range(nv):
        dirs = [u for _, u in curve.outgoing(v)]
        if len(dirs) < 2:
            problems.append("vertex %d has valence %d" % (v, len(dirs)))
            continue
        if len(dirs) == 2 and nv > 1:
            problems.append("2-valent vertex %d" % v)
            continue
        if any(sum(u[k] for u in dirs) != 0 for k in range(r)):
            problems.append("vertex %d is not balanced" % v)
            continue
        q = len(dirs) - 1
        if q > r:
            problems.append("vertex %d has %d directions in R^%d" % (v, q + 1, r))
            continue
        for sub in combinations(dirs, q):
            if rank(list(sub)) < q or gcd_maximal_minors(list(sub)) != 1:
                problems.append("vertex %d is not locally a unimodular standard line" % v)
                break
    return problems


def link_at(curve: TargetCurve, ref: CellRef) -> LocalLink:
    if ref.cell.kind == "vertex":
        dirs = tuple(u for _, u in curve.outgoing(ref.cell.index))
        return VertexLink(len(dirs) - 1, dirs)
    return EdgeLink(curve.cell_direction(ref.cell))


def ray_of_direction(curve: TargetCurve, vertex: int, w: Sequence[int]) -> tuple[Cell, int]:
    """The outgoing cell at ``vertex`` along which w points, and the multiple m."""
    prim, m = primitive_and_length(w)
    if m == 0:
        raise ValueError("zero direction")
    for cell, u in curve.outgoing(vertex):
        if u == prim:
            return cell, m
    raise ValueError("direction not along the target: %s" % (tuple(w),))
