"""Combinatorial types of rational tropical stable maps with image in the target curve.

A type is stored as its degree, the splits of its bounded edges and the cell
of the target containing the image of each vertex.  Vertex 0 carries end 1; vertex
k >= 1 is the endpoint below split k-1 (splits are sorted, each given by the
side without label 1).  Bounded edge k-1 runs from its parent vertex to
vertex k, and its direction at the parent is the sum of the end directions
on the child side.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .errors import ResourceBoundExceeded
from .lattice import primitive_and_length, rank
from .lp import maximize
from .target import Cell, TargetCurve, ray_of_direction

log = logging.getLogger(__name__)

IntVec = tuple[int, ...]

DEFAULT_MAX_N = 10
DEFAULT_MAX_CELLS = 20000


@dataclass(frozen=True)
class DegreeSpec:
    """End directions v(x_1), ..., v(x_N); the first n are contracted."""

    directions: tuple[IntVec, ...]
    n: int = 0

    def __post_init__(self) -> None:
        dirs = self.directions
        if not dirs:
            raise ValueError("degree needs at least one end")
        r = len(dirs[0])
        if any(len(v) != r for v in dirs):
            raise ValueError("end directions have inconsistent dimension")
        if not 0 <= self.n <= len(dirs):
            raise ValueError("bad number of contracted ends")
        for i, v in enumerate(dirs):
            if (i < self.n) != (not any(v)):
                raise ValueError("exactly the first n ends must be contracted")
        if any(sum(v[k] for v in dirs) != 0 for k in range(r)):
            raise ValueError("end directions do not sum to zero")

    @classmethod
    def of(cls, directions: Iterable[Iterable[int]], n: Optional[int] = None) -> "DegreeSpec":
        dirs = tuple(tuple(int(x) for x in v) for v in directions)
        if n is None:
            n = 0
            while n < len(dirs) and not any(dirs[n]):
                n += 1
        return cls(dirs, n)

    @property
    def N(self) -> int:
        return len(self.directions)

    def direction(self, label: int) -> IntVec:
        return self.directions[label - 1]


def covering_degree(degree: DegreeSpec, target: TargetCurve) -> int:
    """The degree d with h_*(Gamma) = d times the target; every ray of the target is covered d times."""
    totals: dict[IntVec, int] = {}
    ray_count: dict[IntVec, int] = {}
    for ray in target.rays:
        ray_count[ray.direction] = ray_count.get(ray.direction, 0) + 1
    for w in degree.directions:
        prim, m = primitive_and_length(w)
        if m == 0:
            continue
        if prim not in ray_count:
            raise ValueError("degree incompatible with the target: %s is not along a ray" % (w,))
        totals[prim] = totals.get(prim, 0) + m
    degrees = set()
    for u, k in ray_count.items():
        total = totals.get(u, 0)
        if total % k:
            raise ValueError("degree incompatible with the target: uneven coverage along %s" % (u,))
        degrees.add(total // k)
    if len(degrees) != 1 or 0 in degrees:
        raise ValueError("degree incompatible with the target: ray coverages %s" % sorted(degrees))
    return degrees.pop()


def riemann_hurwitz(n_adj: int, n_contracted: int, d: int, val_w: int) -> int:
    return n_adj - n_contracted - d * (val_w - 2) - 2


def rdim(n_adj: int, d: int, val_w: int, r: int) -> int:
    """Resolution dimension; r = 1 over a vertex of the target, 0 over an edge."""
    return n_adj - d * (val_w - 2) + r - 3


def classification_number(n_adj: int, r: int) -> int:
    return n_adj + r


def expected_dimension(degree: DegreeSpec, target: TargetCurve) -> int:
    d = covering_degree(degree, target)
    return degree.N - d * target.sum_val_minus_two() - 2


@dataclass(frozen=True)
class LocalDegree:
    """Directions at a vertex grouped along the link of its image."""

    labels: tuple[str, ...]
    directions: tuple[IntVec, ...]
    link: tuple[IntVec, ...]
    blocks: tuple[tuple[int, ...], ...]  # indices into directions, one block per link direction
    contracted: tuple[int, ...]
    d: int

    @property
    def N(self) -> int:
        return len(self.directions)

    @property
    def n(self) -> int:
        return len(self.contracted)

    @property
    def q(self) -> int:
        return len(self.link) - 1

    def profiles(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(sorted((primitive_and_length(self.directions[i])[1] for i in b), reverse=True))
            for b in self.blocks
        )


def local_degree(labels: Sequence[str], directions: Sequence[IntVec], link: Sequence[IntVec]) -> LocalDegree:
    link = tuple(tuple(u) for u in link)
    blocks: list[list[int]] = [[] for _ in link]
    contracted = []
    cover = [0] * len(link)
    for i, w in enumerate(directions):
        prim, m = primitive_and_length(w)
        if m == 0:
            contracted.append(i)
            continue
        if prim not in link:
            raise ValueError("direction not along the target: %s" % (w,))
        k = link.index(prim)
        blocks[k].append(i)
        cover[k] += m
    if len(set(cover)) != 1:
        raise ValueError("local degree is not balanced over the link: coverages %s" % cover)
    return LocalDegree(
        tuple(labels), tuple(tuple(w) for w in directions), link,
        tuple(tuple(b) for b in blocks), tuple(contracted), cover[0],
    )


@dataclass(frozen=True)
class HalfEdge:
    kind: str  # "end" or "edge"
    index: int  # end label, or bounded edge index
    direction: IntVec  # outgoing from the vertex


@dataclass(frozen=True)
class StableMapType:
    degree: DegreeSpec
    splits: tuple[tuple[int, ...], ...]
    cells: tuple[Cell, ...]
    target: TargetCurve = field(compare=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.cells) != len(self.splits) + 1:
            raise ValueError("one cell per vertex required")
        if list(self.splits) != sorted(self.splits):
            raise ValueError("splits must be sorted")

    @property
    def num_vertices(self) -> int:
        return len(self.cells)

    @cached_property
    def parents(self) -> tuple[int, ...]:
        """parents[k] is the parent vertex of vertex k + 1."""
        sets = [frozenset(s) for s in self.splits]
        out = []
        for s in sets:
            best = None
            for j, t in enumerate(sets):
                if s < t and (best is None or len(t) < len(sets[best])):
                    best = j
            out.append(0 if best is None else best + 1)
        return tuple(out)

    @cached_property
    def leaf_vertex(self) -> tuple[int, ...]:
        sets = [frozenset(s) for s in self.splits]
        out = [0]
        for i in range(2, self.degree.N + 1):
            best = None
            for j, t in enumerate(sets):
                if i in t and (best is None or len(t) < len(sets[best])):
                    best = j
            out.append(0 if best is None else best + 1)
        return tuple(out)

    @cached_property
    def edge_directions(self) -> tuple[IntVec, ...]:
        r = len(self.degree.directions[0])
        return tuple(
            tuple(sum(self.degree.direction(i)[k] for i in s) for k in range(r)) for s in self.splits
        )

    @cached_property
    def half_edges(self) -> tuple[tuple[HalfEdge, ...], ...]:
        table: list[list[HalfEdge]] = [[] for _ in self.cells]
        for label, v in enumerate(self.leaf_vertex, start=1):
            table[v].append(HalfEdge("end", label, self.degree.direction(label)))
        for e, (p, w) in enumerate(zip(self.parents, self.edge_directions)):
            table[p].append(HalfEdge("edge", e, w))
            table[e + 1].append(HalfEdge("edge", e, tuple(-x for x in w)))
        return tuple(tuple(sorted(h, key=lambda x: (x.kind != "end", x.index))) for h in table)

    def edge_endpoints(self, e: int) -> tuple[int, int]:
        return self.parents[e], e + 1

    def is_pinned(self, v: int) -> bool:
        return self.cells[v].kind == "vertex"

    def link(self, v: int) -> tuple[IntVec, ...]:
        c = self.cells[v]
        if c.kind == "vertex":
            return tuple(u for _, u in self.target.outgoing(c.index))
        u = self.target.cell_direction(c)
        return (u, tuple(-x for x in u))

    def val_w(self, v: int) -> int:
        c = self.cells[v]
        return self.target.valence(c.index) if c.kind == "vertex" else 2

    def local_degree(self, v: int) -> LocalDegree:
        hs = self.half_edges[v]
        labels = ["x%d" % h.index if h.kind == "end" else "e%d" % h.index for h in hs]
        return local_degree(labels, [h.direction for h in hs], self.link(v))

    def rh(self, v: int) -> int:
        ld = self.local_degree(v)
        return riemann_hurwitz(ld.N, ld.n, ld.d, self.val_w(v))

    def rdim(self, v: int) -> int:
        ld = self.local_degree(v)
        return rdim(ld.N, ld.d, self.val_w(v), int(self.is_pinned(v)))

    def sort_key(self) -> tuple:
        return (self.splits, tuple((c.kind, c.index) for c in self.cells))

    def describe(self) -> str:
        parts = ["|".join(",".join(map(str, s)) for s in self.splits) or "-"]
        parts.append(" ".join(str(c) for c in self.cells))
        return "; ".join(parts)


def is_contracted_component(map_type: StableMapType, v: int) -> bool:
    """True if every edge and end at v has direction zero (local degree 0)."""
    return not any(any(h.direction) for h in map_type.half_edges[v])


def rh_condition(map_type: StableMapType, v: int) -> bool:
    """RH(V) >= 0, imposed on vertices of positive local degree only.

    A vertex all of whose edges are contracted carries no cover, so the
    Riemann-Hurwitz count does not apply to it; such vertices arise when
    marked points collide and are needed for balancing.
    """
    return is_contracted_component(map_type, v) or map_type.rh(v) >= 0


def cell_dimension(map_type: StableMapType) -> int:
    """Vertices inside edges or rays of the target plus contracted edges at vertices of the target."""
    inner = sum(1 for c in map_type.cells if c.kind != "vertex")
    pinned_contracted = sum(
        1
        for e, w in enumerate(map_type.edge_directions)
        if not any(w) and map_type.is_pinned(map_type.parents[e])
    )
    return inner + pinned_contracted


def is_maximal_type(map_type: StableMapType) -> bool:
    for v in range(map_type.num_vertices):
        if map_type.is_pinned(v):
            ld = map_type.local_degree(v)
            if ld.n or riemann_hurwitz(ld.N, ld.n, ld.d, map_type.val_w(v)) != 0:
                return False
        elif len(map_type.half_edges[v]) != 3:
            return False
    return True


# ---------------------------------------------------------------- geometry


def _coord(map_type: StableMapType, v: int, cell: Cell, tvar: dict[int, int], nvars: int) -> tuple[list[Fraction], Fraction]:
    """Affine coordinate of vertex v along ``cell`` as (coefficients, constant)."""
    target = map_type.target
    row = [Fraction(0)] * nvars
    c = map_type.cells[v]
    if c == cell:
        row[tvar[v]] = Fraction(1)
        return row, Fraction(0)
    tail, head = target.cell_endpoints(cell)
    if c == Cell("vertex", tail):
        return row, Fraction(0)
    if head is not None and c == Cell("vertex", head):
        return row, Fraction(target.cell_length(cell))
    raise ValueError("vertex %d does not lie on the closure of %s" % (v, cell))


def segment_cell(map_type: StableMapType, e: int) -> Optional[Cell]:
    """The cell of the target whose relative interior contains the interior of edge e."""
    p, c = map_type.edge_endpoints(e)
    for v in (p, c):
        if not map_type.is_pinned(v):
            return map_type.cells[v]
    w = map_type.edge_directions[e]
    if not any(w):
        return None
    cell, _ = ray_of_direction(map_type.target, map_type.cells[p].index, w)
    return cell


@dataclass
class CellSystem:
    """The closed polyhedron of a type in coordinates (t_V, l_e).

    ``eq`` rows are (coefficients, rhs) meaning coefficients . z = rhs;
    ``ineq`` rows are (coefficients, constant, tag) meaning coefficients . z + constant >= 0.
    """

    nvars: int
    tvar: dict[int, int]
    lvar: dict[int, int]
    eq: list[tuple[list[Fraction], Fraction]]
    ineq: list[tuple[list[Fraction], Fraction, tuple]]


def cell_system(map_type: StableMapType) -> CellSystem:
    target = map_type.target
    inner = [v for v in range(map_type.num_vertices) if not map_type.is_pinned(v)]
    tvar = {v: k for k, v in enumerate(inner)}
    lvar = {e: len(inner) + e for e in range(len(map_type.splits))}
    nvars = len(inner) + len(map_type.splits)
    eq = []
    for e, w in enumerate(map_type.edge_directions):
        cell = segment_cell(map_type, e)
        if cell is None:
            continue
        p, c = map_type.edge_endpoints(e)
        rp, kp = _coord(map_type, p, cell, tvar, nvars)
        rc, kc = _coord(map_type, c, cell, tvar, nvars)
        row = [a - b for a, b in zip(rc, rp)]
        prim, m = primitive_and_length(w)
        if m:
            u = target.cell_direction(cell)
            s = 1 if prim == u else -1
            row[lvar[e]] -= s * m
        eq.append((row, kp - kc))
    ineq = []
    for e in range(len(map_type.splits)):
        row = [Fraction(0)] * nvars
        row[lvar[e]] = Fraction(1)
        ineq.append((row, Fraction(0), ("length", e)))
    for v in inner:
        row = [Fraction(0)] * nvars
        row[tvar[v]] = Fraction(1)
        ineq.append((row, Fraction(0), ("tail", v)))
        length = target.cell_length(map_type.cells[v])
        if length is not None:
            ineq.append(([-x for x in row], Fraction(length), ("head", v)))
    return CellSystem(nvars, tvar, lvar, eq, ineq)


def max_min_slack(system: CellSystem, active: Sequence[int], tight: Sequence[int] = ()) -> Fraction:
    """max eps with h_j >= eps on ``active`` and h_j = 0 on ``tight`` (eps <= 1)."""
    n = system.nvars
    a_eq = [row + [Fraction(0)] for row, _ in system.eq]
    b_eq = [rhs for _, rhs in system.eq]
    for j in tight:
        row, const, _ = system.ineq[j]
        a_eq.append(list(row) + [Fraction(0)])
        b_eq.append(-const)
    a_ub, b_ub = [], []
    for j, (row, const, _) in enumerate(system.ineq):
        if j in tight:
            continue
        # -row . z + eps <= const  (active) or -row . z <= const (the others)
        a_ub.append([-x for x in row] + [Fraction(1 if j in active else 0)])
        b_ub.append(const)
    a_ub.append([Fraction(0)] * n + [Fraction(1)])
    b_ub.append(Fraction(1))
    res = maximize([Fraction(0)] * n + [Fraction(1)], a_eq, b_eq, a_ub, b_ub)
    if res.status != "optimal":
        return Fraction(-1)
    return res.value


def is_nonempty(map_type: StableMapType) -> bool:
    system = cell_system(map_type)
    return max_min_slack(system, range(len(system.ineq))) > 0


def implied_tight(system: CellSystem, tight: Sequence[int]) -> Optional[list[int]]:
    """All inequalities that vanish on the whole face {h_j = 0, j in tight}.

    Returns None if that face is empty.
    """
    n = system.nvars
    m = len(system.ineq)
    unknown = [j for j in range(m) if j not in tight]
    while unknown:
        # maximise the sum of s_j <= min(h_j, 1) over the still undecided j
        k = len(unknown)
        a_eq = [list(row) + [Fraction(0)] * k for row, _ in system.eq]
        b_eq = [rhs for _, rhs in system.eq]
        for j in tight:
            row, const, _ = system.ineq[j]
            a_eq.append(list(row) + [Fraction(0)] * k)
            b_eq.append(-const)
        a_ub, b_ub = [], []
        for j, (row, const, _) in enumerate(system.ineq):
            if j in tight:
                continue
            slot = [Fraction(0)] * k
            if j in unknown:
                slot[unknown.index(j)] = Fraction(1)
            a_ub.append([-x for x in row] + slot)
            b_ub.append(const)
        for i in range(k):
            slot = [Fraction(0)] * k
            slot[i] = Fraction(1)
            a_ub.append([Fraction(0)] * n + slot)
            b_ub.append(Fraction(1))
        res = maximize([Fraction(0)] * n + [Fraction(1)] * k, a_eq, b_eq, a_ub, b_ub)
        if res.status != "optimal":
            return None
        positive = [j for i, j in enumerate(unknown) if res.x[n + i] > 0]
        if not positive:
            break
        unknown = [j for j in unknown if j not in positive]
    return sorted(set(tight) | set(unknown))


def face_dimension(system: CellSystem, tight: Sequence[int]) -> int:
    rows = [row for row, _ in system.eq] + [system.ineq[j][0] for j in tight]
    return system.nvars - (rank(rows) if rows else 0)


# ------------------------------------------------------------- enumeration


def _compatible(s: frozenset, t: frozenset) -> bool:
    return s <= t or t <= s or not (s & t)


def admissible_splits(target: TargetCurve, degree: DegreeSpec) -> list[tuple[int, ...]]:
    """Sides (without label 1) whose direction sum can be an edge of a map to the target."""
    N = degree.N
    r = len(degree.directions[0])
    dirs = {u for c in target.cells() if c.kind != "vertex" for u in (target.cell_direction(c),)}
    dirs |= {tuple(-x for x in u) for u in dirs}
    out = []
    for size in range(2, N - 1):
        for side in combinations(range(2, N + 1), size):
            w = tuple(sum(degree.direction(i)[k] for i in side) for k in range(r))
            prim, m = primitive_and_length(w)
            if m and prim not in dirs:
                continue
            out.append(side)
    return out


def laminar_families(splits: Sequence[tuple[int, ...]]) -> list[tuple[tuple[int, ...], ...]]:
    sets = [frozenset(s) for s in splits]
    out = []

    def rec(start: int, chosen: list[int]) -> None:
        out.append(tuple(sorted(splits[i] for i in chosen)))
        for k in range(start, len(sets)):
            if all(_compatible(sets[k], sets[j]) for j in chosen):
                chosen.append(k)
                rec(k + 1, chosen)
                chosen.pop()

    rec(0, [])
    return out


def _child_options(target: TargetCurve, parent_cell: Cell, w: IntVec) -> list[Cell]:
    prim, m = primitive_and_length(w)
    if m == 0:
        return [parent_cell]
    if parent_cell.kind == "vertex":
        try:
            cell, _ = ray_of_direction(target, parent_cell.index, w)
        except ValueError:
            return []
        opts = [cell]
        if cell.kind == "edge":
            e = target.edges[cell.index]
            opts.append(Cell("vertex", e.head if e.tail == parent_cell.index else e.tail))
        return opts
    u = target.cell_direction(parent_cell)
    tail, head = target.cell_endpoints(parent_cell)
    if prim == u:
        return [parent_cell] + ([Cell("vertex", head)] if head is not None else [])
    if prim == tuple(-x for x in u):
        return [parent_cell, Cell("vertex", tail)]
    return []


def _ends_fit(target: TargetCurve, cell: Cell, directions: Iterable[IntVec]) -> bool:
    for w in directions:
        prim, m = primitive_and_length(w)
        if m == 0:
            continue
        if cell.kind == "vertex":
            try:
                c, _ = ray_of_direction(target, cell.index, w)
            except ValueError:
                return False
            if c.kind != "ray":
                return False
        elif cell.kind != "ray" or target.cell_direction(cell) != prim:
            return False
    return True


def _types_for_family(target: TargetCurve, degree: DegreeSpec, splits: tuple) -> list[StableMapType]:
    skeleton = StableMapType(degree, splits, tuple(Cell("vertex", 0) for _ in range(len(splits) + 1)), target)
    nv = skeleton.num_vertices
    children: list[list[int]] = [[] for _ in range(nv)]
    for e, p in enumerate(skeleton.parents):
        children[p].append(e)
    order = [0]
    for v in order:
        order.extend(e + 1 for e in children[v])
    ends_at: list[list[IntVec]] = [[] for _ in range(nv)]
    for label, v in enumerate(skeleton.leaf_vertex, start=1):
        ends_at[v].append(degree.direction(label))
    found = []
    cells: list[Optional[Cell]] = [None] * nv

    def rec(k: int) -> None:
        if k == nv:
            map_type = StableMapType(degree, splits, tuple(cells), target)
            try:
                if not all(rh_condition(map_type, v) for v in range(nv)):
                    log.debug("pruned (RH < 0): %s", map_type.describe())
                    return
            except ValueError:
                log.debug("pruned (unbalanced vertex): %s", map_type.describe())
                return
            if is_nonempty(map_type):
                found.append(map_type)
            else:
                log.debug("pruned (empty cell): %s", map_type.describe())
            return
        v = order[k]
        if v == 0:
            options = target.cells()
        else:
            e = v - 1
            options = _child_options(target, cells[skeleton.parents[e]], skeleton.edge_directions[e])
        for c in options:
            if not _ends_fit(target, c, ends_at[v]):
                continue
            cells[v] = c
            rec(k + 1)
        cells[v] = None

    rec(0)
    return found


def thread_count(threads: Optional[int] = None) -> int:
    if threads is None:
        threads = int(os.environ.get("MSL_THREADS", "1") or 1)
    return max(1, threads)


def enumerate_types(
    target: TargetCurve,
    degree: DegreeSpec,
    max_cells: int = DEFAULT_MAX_CELLS,
    dimension_filter: Optional[int] = None,
    threads: Optional[int] = None,
    max_n: int = DEFAULT_MAX_N,
) -> list[StableMapType]:
    """All types of nonempty cells with RH >= 0 at every vertex, sorted canonically."""
    covering_degree(degree, target)
    if degree.N > max_n:
        raise ResourceBoundExceeded("N=%d exceeds the bound %d" % (degree.N, max_n))
    if len(degree.directions[0]) != target.ambient_dim:
        raise ValueError("degree and target live in different dimensions")
    families = laminar_families(admissible_splits(target, degree))
    log.info("%d candidate tree topologies", len(families))
    workers = thread_count(threads)
    if workers == 1:
        chunks = [_types_for_family(target, degree, f) for f in families]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda f: _types_for_family(target, degree, f), families))
    out = []
    for chunk in chunks:
        for map_type in chunk:
            if dimension_filter is None or cell_dimension(map_type) == dimension_filter:
                out.append(map_type)
        if len(out) > max_cells:
            raise ResourceBoundExceeded("more than %d cells" % max_cells, len(out))
    out.sort(key=lambda a: (cell_dimension(a), a.sort_key()))
    return out
