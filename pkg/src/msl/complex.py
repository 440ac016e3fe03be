"""The weighted polyhedral complex of stable maps to the target and its balancing test.

Points are embedded in Q^(N choose 2) x Q^r: the canonical representative of
the tree distances modulo U_N, followed by an anchor position in R^r.  With a
contracted end the anchor is the image of x_1.  Otherwise it is the point on
end x_N reached after the end length fixed by the canonical representative
(see ``anchor_end``), which is affine on every cell and continuous across
cells.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import ResourceBoundExceeded
from .hurwitz import DEFAULT_MAX_D, hurwitz_for_local_degree
from .lattice import (
    clear_denominators,
    gcd_maximal_minors,
    in_rational_span,
    integer_kernel,
    mat_vec,
    primitive_and_length,
    rank,
    transpose,
    unit_preimage,
)
from .maptypes import (
    DEFAULT_MAX_CELLS,
    DEFAULT_MAX_N,
    CellSystem,
    DegreeSpec,
    StableMapType,
    cell_dimension,
    cell_system,
    covering_degree,
    enumerate_types,
    expected_dimension,
    face_dimension,
    implied_tight,
    is_maximal_type,
    segment_cell,
    thread_count,
)
from .localfan import VertexStar, enumerate_resolutions, resolution_weight
from .target import Cell, TargetCurve
from .trees import canonical_rep_mod_UN, lineality_coefficients, split_vector

log = logging.getLogger(__name__)


# ------------------------------------------------------------------ weights


def gluing_columns(map_type: StableMapType) -> list[tuple[str, int, int]]:
    """Column labels: ("x", v, -1) for positions, ("l", v, e) for half-edge lengths."""
    cols = []
    for v in range(map_type.num_vertices):
        if not map_type.is_pinned(v):
            cols.append(("x", v, -1))
        for h in map_type.half_edges[v]:
            if h.kind == "edge":
                cols.append(("l", v, h.index))
    return cols


def gluing_matrix(map_type: StableMapType) -> list[list[int]]:
    """Rows ev_f - ev_f' for each bounded edge cut into half-edges f (parent side) and f'."""
    if not is_maximal_type(map_type):
        raise ValueError("gluing matrix needs a maximal type")
    target = map_type.target
    cols = gluing_columns(map_type)
    index = {c: k for k, c in enumerate(cols)}
    rows = []
    for e, w in enumerate(map_type.edge_directions):
        cell = segment_cell(map_type, e)
        if cell is None:
            raise ValueError("cut point at vertex of the target - re-cut")
        p, c = map_type.edge_endpoints(e)
        row = [0] * len(cols)
        if not map_type.is_pinned(p):
            row[index[("x", p, -1)]] += 1
        if not map_type.is_pinned(c):
            row[index[("x", c, -1)]] -= 1
        prim, m = primitive_and_length(w)
        s = 0 if m == 0 else (1 if prim == target.cell_direction(cell) else -1)
        row[index[("l", p, e)]] = s * m
        row[index[("l", c, e)]] = s * m
        rows.append(row)
    return rows


def vertex_weight(map_type: StableMapType, v: int, max_d: int = DEFAULT_MAX_D) -> Fraction:
    if not map_type.is_pinned(v):
        return Fraction(1)
    return hurwitz_for_local_degree(map_type.link(v), [h.direction for h in map_type.half_edges[v]], max_d)


def cell_weight(map_type: StableMapType, max_d: int = DEFAULT_MAX_D) -> Fraction:
    rows = gluing_matrix(map_type)
    index = gcd_maximal_minors(rows) if rows else 1
    w = Fraction(index)
    for v in range(map_type.num_vertices):
        w *= vertex_weight(map_type, v, max_d)
    return w


# ---------------------------------------------------------------- embedding


def anchor_end(degree: DegreeSpec) -> int:
    return 1 if degree.n >= 1 else degree.N


def _vertex_position(map_type: StableMapType, v: int, point: dict[int, Fraction], system: CellSystem) -> list[Fraction]:
    target = map_type.target
    c = map_type.cells[v]
    if c.kind == "vertex":
        return list(target.vertices[c.index])
    tail, _ = target.cell_endpoints(c)
    u = target.cell_direction(c)
    t = point[system.tvar[v]]
    return [p + t * x for p, x in zip(target.vertices[tail], u)]


def embed(map_type: StableMapType, coords: Sequence, system: Optional[CellSystem] = None) -> tuple[Fraction, ...]:
    """Embedding of the point with local coordinates (positions on the target, edge lengths).

    Coordinates follow :func:`msl.maptypes.cell_system`: one position per
    vertex inside an edge or ray of the target, then one length per bounded edge.
    """
    system = system or cell_system(map_type)
    if len(coords) != system.nvars:
        raise ValueError("expected %d local coordinates" % system.nvars)
    point = {k: Fraction(x) for k, x in enumerate(coords)}
    degree = map_type.degree
    N = degree.N
    dist = [Fraction(0)] * (N * (N - 1) // 2)
    for e, side in enumerate(map_type.splits):
        length = point[system.lvar[e]]
        if length:
            for k, x in enumerate(split_vector(side, N)):
                dist[k] += length * x
    a = anchor_end(degree)
    anchor = _vertex_position(map_type, map_type.leaf_vertex[a - 1], point, system)
    if N >= 3:
        rep = canonical_rep_mod_UN(dist, N)
        mu = lineality_coefficients(dist, N)[a - 1]
        anchor = [p - mu * x for p, x in zip(anchor, degree.direction(a))]
    else:
        rep = tuple(dist)
    return tuple(rep) + tuple(anchor)


def embedding_linear_part(map_type: StableMapType, system: CellSystem) -> list[list[Fraction]]:
    """Matrix (ambient x local) of the linear part of :func:`embed`."""
    zero = embed(map_type, [0] * system.nvars, system)
    cols = []
    for k in range(system.nvars):
        unit = [0] * system.nvars
        unit[k] = 1
        cols.append([a - b for a, b in zip(embed(map_type, unit, system), zero)])
    return transpose(cols) if cols else [[] for _ in zero]


# ------------------------------------------------------------------- facets


@dataclass
class Facet:
    face: StableMapType  # type of the relatively open facet
    tight: tuple[int, ...]  # inequalities of the closed cell vanishing on it
    normal_local: tuple[int, ...]  # primitive normal in the local coordinates of the cell


def _lattice(system: CellSystem) -> list[list[int]]:
    """Basis (as columns) of the integer points of the tangent space."""
    rows = [row for row, _ in system.eq]
    basis = integer_kernel(rows, system.nvars) if rows else integer_kernel([], system.nvars)
    return transpose(basis) if basis else [[] for _ in range(system.nvars)]


def degenerate(map_type: StableMapType, system: CellSystem, tight: Sequence[int]) -> StableMapType:
    """The type of the points where exactly the inequalities ``tight`` vanish."""
    target = map_type.target
    nv = map_type.num_vertices
    parent = list(range(nv))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    new_cell = list(map_type.cells)
    for j in tight:
        kind, obj = system.ineq[j][2]
        if kind == "length":
            p, c = map_type.edge_endpoints(obj)
            parent[find(c)] = find(p)
        else:
            tail, head = target.cell_endpoints(map_type.cells[obj])
            new_cell[obj] = Cell("vertex", tail if kind == "tail" else head)
    group_cell: dict[int, Cell] = {}
    for v in range(nv):
        g = find(v)
        c = new_cell[v]
        old = group_cell.get(g)
        if old is None or (old.kind != "vertex" and c.kind == "vertex"):
            group_cell[g] = c
        elif c.kind == "vertex" and old != c:
            raise ValueError("inconsistent degeneration")
    contracted = {e for j in tight for kind, e in [system.ineq[j][2]] if kind == "length"}
    splits = tuple(s for e, s in enumerate(map_type.splits) if e not in contracted)
    cells = [group_cell[find(0)]]
    for e, s in enumerate(map_type.splits):
        if e not in contracted:
            cells.append(group_cell[find(e + 1)])
    return StableMapType(map_type.degree, splits, tuple(cells), target)


def facets(map_type: StableMapType, system: Optional[CellSystem] = None) -> list[Facet]:
    system = system or cell_system(map_type)
    dim = face_dimension(system, [])
    seen: set[tuple[int, ...]] = set()
    out = []
    basis = _lattice(system)
    for j in range(len(system.ineq)):
        tight = implied_tight(system, [j])
        if tight is None or tuple(tight) in seen:
            continue
        seen.add(tuple(tight))
        if face_dimension(system, tight) != dim - 1:
            continue
        # covector on the cell lattice cutting out the facet, positive inside
        phi = None
        for k in tight:
            row = mat_vec(transpose(basis), system.ineq[k][0]) if basis and basis[0] else []
            if any(row):
                phi = clear_denominators(row)
                break
        if phi is None:
            raise ValueError("facet without a normal direction")
        c = unit_preimage(phi)
        normal = tuple(int(x) for x in mat_vec(basis, c))
        out.append(Facet(degenerate(map_type, system, tight), tuple(tight), normal))
    out.sort(key=lambda f: (f.face.sort_key(), f.tight))
    return out


# ------------------------------------------------------------------ complex


@dataclass
class ModuliComplex:
    target: TargetCurve
    degree: DegreeSpec
    covering_degree: int
    expected_dimension: int
    cells: list[StableMapType]
    dimensions: list[int]
    weights: dict[int, Fraction]  # index of maximal cell -> weight
    facets: dict[int, list[tuple[int, Facet]]] = field(default_factory=dict)  # cell -> [(face index, facet)]

    @property
    def dimension(self) -> int:
        return max(self.dimensions) if self.dimensions else -1

    def maximal_indices(self) -> list[int]:
        return [i for i, d in enumerate(self.dimensions) if d == self.expected_dimension]

    def index_of(self, map_type: StableMapType) -> Optional[int]:
        return self._lookup().get(map_type)

    def _lookup(self) -> dict[StableMapType, int]:
        cache = getattr(self, "_lookup_cache", None)
        if cache is None:
            cache = {a: i for i, a in enumerate(self.cells)}
            self._lookup_cache = cache
        return cache

    def is_pure(self) -> bool:
        if not self.cells:
            return True  # the empty complex is vacuously pure
        return self.dimension == self.expected_dimension and not self.uncovered_cells()

    def uncovered_cells(self) -> list[int]:
        """Cells not in the closure of any maximal cell (via chains of facets)."""
        reached = set(self.maximal_indices())
        stack = list(reached)
        while stack:
            i = stack.pop()
            for j, _ in self.facets.get(i, []):
                if j is not None and j not in reached:
                    reached.add(j)
                    stack.append(j)
        return [i for i in range(len(self.cells)) if i not in reached]


def _facets_of(map_type: StableMapType) -> list[Facet]:
    return facets(map_type)


def build_complex(
    target: TargetCurve,
    degree: DegreeSpec,
    max_cells: int = DEFAULT_MAX_CELLS,
    max_d: int = DEFAULT_MAX_D,
    threads: Optional[int] = None,
    max_n: int = DEFAULT_MAX_N,
) -> ModuliComplex:
    d = covering_degree(degree, target)
    if d > max_d:
        raise ResourceBoundExceeded("degree %d exceeds the bound %d" % (d, max_d))
    cells = enumerate_types(target, degree, max_cells=max_cells, threads=threads, max_n=max_n)
    dims = [cell_dimension(a) for a in cells]
    expected = expected_dimension(degree, target)
    weights = {}
    for i, a in enumerate(cells):
        if dims[i] > expected:
            raise AssertionError("cell of dimension %d above the expected %d" % (dims[i], expected))
        if dims[i] == expected:
            if not is_maximal_type(a):
                raise AssertionError("top-dimensional type fails the maximality conditions: %s" % a.describe())
            weights[i] = cell_weight(a, max_d)
            if weights[i] == 0:
                log.info("zero-weight maximal cell %s", a.describe())
    workers = thread_count(threads)
    if workers == 1:
        all_facets = [_facets_of(a) for a in cells]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            all_facets = list(pool.map(_facets_of, cells))
    lookup = {a: i for i, a in enumerate(cells)}
    facet_map = {i: [(lookup.get(f.face), f) for f in fs] for i, fs in enumerate(all_facets)}
    return ModuliComplex(target, degree, d, expected, cells, dims, weights, facet_map)


# ---------------------------------------------------------------- balancing


@dataclass
class BalanceEntry:
    face: int
    passed: bool
    residual: tuple[Fraction, ...]
    contributions: list[tuple[int, Fraction, tuple[Fraction, ...]]]  # (cell, weight, normal)


def _span_of_cell(moduli: ModuliComplex, i: int) -> list[list[Fraction]]:
    map_type = moduli.cells[i]
    system = cell_system(map_type)
    basis = _lattice(system)
    if not basis or not basis[0]:
        return []
    lin = embedding_linear_part(map_type, system)
    return [mat_vec(lin, col) for col in transpose(basis)]


def check_global_balancing(
    moduli: ModuliComplex, weights: Optional[dict[int, Fraction]] = None, threads: Optional[int] = None
) -> list[BalanceEntry]:
    """Per codimension-one cell: is the weighted sum of primitive normals in its span?"""
    weights = moduli.weights if weights is None else weights
    D = moduli.expected_dimension
    faces = [i for i, d in enumerate(moduli.dimensions) if d == D - 1]
    if D <= 0:
        return []
    incoming: dict[int, list[tuple[int, Facet]]] = {i: [] for i in faces}
    for i in moduli.maximal_indices():
        for j, f in moduli.facets.get(i, []):
            if j is None:
                raise AssertionError("facet of %s is not a cell of the complex" % moduli.cells[i].describe())
            incoming.setdefault(j, []).append((i, f))

    def check(j: int) -> BalanceEntry:
        ambient = len(moduli.degree.directions) * (len(moduli.degree.directions) - 1) // 2 + moduli.target.ambient_dim
        total = [Fraction(0)] * ambient
        contributions = []
        for i, f in incoming.get(j, []):
            map_type = moduli.cells[i]
            system = cell_system(map_type)
            u = mat_vec(embedding_linear_part(map_type, system), f.normal_local)
            w = Fraction(weights.get(i, 0))
            contributions.append((i, w, tuple(u)))
            total = [a + w * b for a, b in zip(total, u)]
        span = _span_of_cell(moduli, j)
        ok = in_rational_span(total, span) if span else all(x == 0 for x in total)
        return BalanceEntry(j, ok, tuple(total), contributions)

    workers = thread_count(threads)
    if workers == 1:
        return [check(j) for j in sorted(incoming)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(check, sorted(incoming)))


def is_balanced(moduli: ModuliComplex, weights: Optional[dict[int, Fraction]] = None) -> bool:
    return all(entry.passed for entry in check_global_balancing(moduli, weights))


def embedding_is_injective(moduli: ModuliComplex, i: int) -> bool:
    map_type = moduli.cells[i]
    system = cell_system(map_type)
    return len(_span_of_cell(moduli, i)) == 0 or rank(_span_of_cell(moduli, i)) == face_dimension(system, [])


# ------------------------------------------------------- weight consistency


def local_star(map_type: StableMapType, v: int) -> Optional[VertexStar]:
    """The star of a pinned vertex in standard-line form, or None if it has a contracted edge."""
    if not map_type.is_pinned(v):
        return None
    link = [primitive_and_length(u)[0] for u in map_type.link(v)]
    ends: list[tuple[Optional[int], int]] = []
    for h in map_type.half_edges[v]:
        prim, m = primitive_and_length(h.direction)
        if m == 0:
            if h.kind == "edge":
                return None
            ends.append((None, 0))
        else:
            ends.append((link.index(prim), m))
    ends.sort(key=lambda e: (e[0] is not None, e))
    return VertexStar.of(len(link) - 1, ends)


@dataclass
class WeightCheck:
    face: int
    vertex: int
    local: list[Fraction]  # local-fan weights times the other vertex weights
    adjacent: list[Fraction]  # weights of the maximal cells having the face as a facet

    @property
    def passed(self) -> bool:
        return self.local == self.adjacent


def check_weight_consistency(moduli: ModuliComplex, max_d: int = DEFAULT_MAX_D) -> list[WeightCheck]:
    """Compare maximal weights around codimension-one cells with local fans.

    Applies to faces with a single pinned vertex of rdim 1 and no other
    degenerate vertex.  Both sides are compared as sorted multisets.
    """
    D = moduli.expected_dimension
    adjacent: dict[int, list[Fraction]] = {}
    for i in moduli.maximal_indices():
        for j, _ in moduli.facets.get(i, []):
            adjacent.setdefault(j, []).append(moduli.weights[i])
    out = []
    for j in sorted(adjacent):
        if moduli.dimensions[j] != D - 1:
            continue
        face_type = moduli.cells[j]
        special = [v for v in range(face_type.num_vertices) if face_type.is_pinned(v) and face_type.rdim(v) == 1]
        others_ok = all(
            face_type.rdim(v) == 0 if face_type.is_pinned(v) else len(face_type.half_edges[v]) == 3
            for v in range(face_type.num_vertices)
            if v not in special
        )
        if len(special) != 1 or not others_ok:
            continue
        v = special[0]
        star = local_star(face_type, v)
        if star is None or star.n > 1:
            continue
        factor = Fraction(1)
        for u in range(face_type.num_vertices):
            if u != v:
                factor *= vertex_weight(face_type, u, max_d)
        local = sorted(resolution_weight(r, star, max_d) * factor for r in enumerate_resolutions(star))
        out.append(WeightCheck(j, v, local, sorted(adjacent[j])))
    return out
