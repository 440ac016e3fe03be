from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from msl.errors import ResourceBoundExceeded
from msl.maptypes import (
    DegreeSpec,
    StableMapType,
    cell_dimension,
    cell_system,
    covering_degree,
    enumerate_types,
    expected_dimension,
    face_dimension,
    is_maximal_type,
    is_nonempty,
    rdim,
    rh_condition,
    riemann_hurwitz,
    segment_cell,
)
from msl.target import Cell

from cases import CORPUS, EMPTY, CONIC, L2, T2, case

V0 = Cell("vertex", 0)
R0, R1, R2 = Cell("ray", 0), Cell("ray", 1), Cell("ray", 2)


def conic_type(splits, cells):
    return StableMapType(CONIC, tuple(splits), tuple(cells), L2)


STAR = conic_type([], [V0])
# ends 1,2 meet on ray -e1 and then reach the vertex of the target (edge weight 2)
MERGED_ENDS = conic_type([(3, 4, 5)], [R0, V0])
# end 5 splits into two weight-1 edges to pinned vertices carrying {1,3} and {2,4}
SPLIT_END = conic_type([(2, 4), (2, 4, 5)], [V0, V0, R2])
# the excluded configuration: a degree-2 vertex with profiles (2), (2), (2)
OVERRAMIFIED = conic_type([(3, 4), (3, 4, 5)], [R0, R1, V0])


# ------------------------------------------------------------------ degrees


def test_covering_degree_examples():
    assert covering_degree(CONIC, L2) == 2
    assert covering_degree(DegreeSpec.of([(-1, 0), (0, -1), (1, 1)]), L2) == 1


def test_covering_degree_mismatch():
    with pytest.raises(ValueError):
        covering_degree(DegreeSpec.of([(-1, 0), (-1, 0), (0, -1), (1, 2)]), L2)
    with pytest.raises(ValueError):
        DegreeSpec.of([(-1, 0), (-1, 0), (0, -1), (1, 1)])  # does not sum to zero


def test_degree_spec_contracted_ends_first():
    with pytest.raises(ValueError):
        DegreeSpec(((-1, 0), (0, 0), (0, -1), (1, 1)), 1)
    assert DegreeSpec.of([(0, 0), (-1, 0), (0, -1), (1, 1)]).n == 1


def test_riemann_hurwitz_examples():
    assert riemann_hurwitz(5, 0, 2, 3) == 1
    assert riemann_hurwitz(3, 0, 2, 3) == -1
    assert riemann_hurwitz(3, 0, 1, 2) == 1


def test_rdim_examples():
    assert rdim(5, 2, 3, 1) == 1
    assert rdim(3, 1, 2, 0) == 0


@given(st.integers(1, 10), st.integers(0, 3), st.integers(1, 6), st.integers(2, 5), st.integers(0, 1))
def test_rdim_minus_rh(n_adj, n_con, d, val, r):
    val_w = 2 if r == 0 else val
    assert rdim(n_adj, d, val_w, r) - riemann_hurwitz(n_adj, n_con, d, val_w) == n_con - (1 - r)


def test_expected_dimension_examples():
    assert expected_dimension(CONIC, L2) == 1
    assert expected_dimension(DegreeSpec.of([(-1, 0), (0, -1), (1, 1)]), L2) == 0
    target, degree = case("two_vertex_line")
    assert expected_dimension(degree, target) == 0
    types = enumerate_types(target, degree)
    assert max(cell_dimension(a) for a in types) == 0


# ------------------------------------------------------------ plane conic types


def test_cell_dimensions_of_conic_types():
    assert cell_dimension(STAR) == 0
    assert cell_dimension(MERGED_ENDS) == 1
    assert cell_dimension(SPLIT_END) == 1


def test_contracted_edge_at_vertex_counts():
    degree = DegreeSpec.of([(0, 0), (0, 0), (-1, 0), (0, -1), (1, 1)])
    map_type = StableMapType(degree, ((3, 4, 5),), (V0, V0), L2)
    assert cell_dimension(map_type) == 1
    assert not is_maximal_type(map_type)


def test_maximality():
    assert is_maximal_type(MERGED_ENDS) and is_maximal_type(SPLIT_END)
    assert not is_maximal_type(STAR)
    assert not rh_condition(OVERRAMIFIED, 2)
    assert not is_maximal_type(OVERRAMIFIED)


def test_conic_enumeration():
    types = enumerate_types(L2, CONIC)
    assert len(types) == 5
    assert STAR in types and MERGED_ENDS in types and SPLIT_END in types
    assert OVERRAMIFIED not in types
    assert sum(1 for a in types if cell_dimension(a) == 1) == 4


def test_degree_one_line_has_one_type():
    degree = DegreeSpec.of([(-1, 0), (0, -1), (1, 1)])
    types = enumerate_types(L2, degree)
    # with three ends there is only the star tree, which must sit at the vertex
    assert types == [StableMapType(degree, (), (V0,), L2)]


def test_nonempty_and_face_dimension():
    for map_type in (STAR, MERGED_ENDS, SPLIT_END):
        assert is_nonempty(map_type)
        assert face_dimension(cell_system(map_type), []) == cell_dimension(map_type)


def test_dimension_filter_and_bounds():
    assert len(enumerate_types(L2, CONIC, dimension_filter=1)) == 4
    with pytest.raises(ResourceBoundExceeded):
        enumerate_types(L2, CONIC, max_cells=2)
    with pytest.raises(ResourceBoundExceeded):
        enumerate_types(L2, CONIC, max_n=4)


def test_threads_do_not_change_enumeration():
    target, degree = case("conic_six_ends")
    assert enumerate_types(target, degree, threads=1) == enumerate_types(target, degree, threads=3)


# ------------------------------------------------------ corpus invariants


SMALL = [n for n in CORPUS if n not in ("cubic_seven_ends", "two_vertex_line_two_points")]


@pytest.mark.parametrize("name", SMALL)
def test_enumerated_types_are_balanced_and_bounded(name):
    target, degree = case(name)
    D = expected_dimension(degree, target)
    for map_type in enumerate_types(target, degree):
        for v in range(map_type.num_vertices):
            hs = map_type.half_edges[v]
            assert all(sum(h.direction[k] for h in hs) == 0 for k in range(target.ambient_dim))
            assert rh_condition(map_type, v)
            if map_type.is_pinned(v):
                # coverage is constant over the link (raises otherwise)
                map_type.local_degree(v)
        assert cell_dimension(map_type) <= D
        assert (cell_dimension(map_type) == D) == is_maximal_type(map_type)
        for e, w in enumerate(map_type.edge_directions):
            if any(w):
                assert segment_cell(map_type, e) is not None
        assert face_dimension(cell_system(map_type), []) == cell_dimension(map_type)


@pytest.mark.parametrize("name", sorted(EMPTY))
def test_unrealisable_degrees_give_no_types(name):
    target, degree = case(name)
    assert enumerate_types(target, degree) == []


def test_edge_vertex_positions_on_two_vertex_target():
    target, degree = case("two_vertex_line_one_point")
    types = enumerate_types(target, degree)
    assert any(c == Cell("edge", 0) for a in types for c in a.cells)
