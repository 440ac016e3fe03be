from fractions import Fraction
from itertools import combinations

import pytest

from msl.lattice import gcd_maximal_minors
from msl.target import (
    Cell,
    CellRef,
    Edge,
    EdgeLink,
    Ray,
    TargetCurve,
    VertexLink,
    link_at,
    ray_of_direction,
    standard_line,
    validate_smooth,
)

from cases import T2

F = Fraction


def test_standard_line_plane():
    target = standard_line(2)
    assert [r.direction for r in target.rays] == [(-1, 0), (0, -1), (1, 1)]
    assert target.vertices == ((0, 0),)


def test_standard_line_space_rays_sum_to_zero():
    target = standard_line(3)
    assert len(target.rays) == 4
    assert [sum(r.direction[k] for r in target.rays) for k in range(3)] == [0, 0, 0]


def test_standard_line_q1_is_two_rays():
    target = standard_line(1)
    assert [r.direction for r in target.rays] == [(-1,), (1,)]
    assert validate_smooth(target) == []


@pytest.mark.parametrize("q", range(1, 7))
def test_standard_lines_are_smooth(q):
    assert validate_smooth(standard_line(q)) == []


def test_non_primitive_ray_is_reported():
    target = TargetCurve(((F(0), F(0)),), (), (Ray(0, (-1, 0)), Ray(0, (0, -1)), Ray(0, (2, 2))))
    problems = validate_smooth(target)
    assert problems and any("primitive" in p for p in problems)


def test_unbalanced_vertex_is_reported():
    target = TargetCurve(((F(0), F(0)),), (), (Ray(0, (-1, 0)), Ray(0, (0, -1)), Ray(0, (1, 2))))
    assert validate_smooth(target)


def test_subdivided_ray_gives_two_valent_vertex():
    target = TargetCurve(
        ((F(0), F(0)), (F(1), F(1))),
        (Edge(0, 1, (1, 1), F(1)),),
        (Ray(0, (-1, 0)), Ray(0, (0, -1)), Ray(1, (1, 1))),
    )
    assert any("2-valent vertex" in p for p in validate_smooth(target))


def test_edge_length_must_match_positions():
    target = TargetCurve(
        ((F(0), F(0)), (F(1), F(1))),
        (Edge(0, 1, (1, 1), F(2)),),
        (Ray(0, (-1, 0)), Ray(0, (0, -1)), Ray(1, (1, 0)), Ray(1, (0, 1))),
    )
    assert validate_smooth(target)


def test_two_vertex_line_is_smooth_and_unimodular():
    assert validate_smooth(T2) == []
    for v in range(2):
        dirs = [u for _, u in T2.outgoing(v)]
        assert [sum(u[k] for u in dirs) for k in range(2)] == [0, 0]
        for sub in combinations(dirs, 2):
            assert gcd_maximal_minors(list(sub)) == 1


def test_links():
    target = standard_line(2)
    link = link_at(target, CellRef(Cell("vertex", 0)))
    assert isinstance(link, VertexLink) and link.q == 2
    assert isinstance(link_at(target, CellRef(Cell("ray", 1), F(3))), EdgeLink)
    assert link_at(T2, CellRef(Cell("edge", 0), F(1, 2))) == EdgeLink((1, 1))


def test_links_total_on_support():
    for target in (standard_line(2), standard_line(3), T2):
        for c in target.cells():
            ref = CellRef(c) if c.kind == "vertex" else CellRef(c, F(1, 2))
            link_at(target, ref)
            assert len(target.point(ref)) == target.ambient_dim


def test_ray_of_direction():
    target = standard_line(2)
    assert ray_of_direction(target, 0, (2, 2)) == (Cell("ray", 2), 2)
    assert ray_of_direction(target, 0, (-1, 0)) == (Cell("ray", 0), 1)
    with pytest.raises(ValueError):
        ray_of_direction(target, 0, (1, -1))
