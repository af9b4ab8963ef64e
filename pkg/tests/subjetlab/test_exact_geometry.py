"""Tests for the exact_geometry module."""

from fractions import Fraction
from typing import List

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subjetlab import exact_geometry as geo
from subjetlab.exact_geometry import (
    EMPTY_DIMENSION,
    EmptyPolyhedronError,
    HPolyhedron,
    NotAFaceError,
)
from subjetlab.rational import Vector, vector

ZERO = Fraction(0)
ONE = Fraction(1)


def half_line(a: int, b: int) -> HPolyhedron:
    """The subset ``a x <= b`` of the real line."""
    return HPolyhedron(1, ((vector([a]), Fraction(b)),))


def upper_half_plane() -> HPolyhedron:
    """The half-plane ``y >= 1``."""
    return HPolyhedron(2, ((vector([0, -1]), Fraction(-1)),))


@pytest.fixture
def unit_square() -> HPolyhedron:
    """The square ``[0, 1]^2``."""
    return HPolyhedron.box(vector([0, 0]), vector([1, 1]))


def test_feasible() -> None:
    """Test feasibility of contradictory, orthant and empty systems."""
    assert not geo.feasible(geo.intersect(half_line(1, 1), half_line(-1, -2)))
    assert geo.feasible(HPolyhedron.orthant(2))
    assert geo.feasible(HPolyhedron.whole_space(2))


def test_dim(unit_square: HPolyhedron) -> None:
    """Test the dimension of a square, a segment and the empty set."""
    segment = HPolyhedron(
        2,
        ((vector([0, 1]), ONE), (vector([0, -1]), ZERO)),
        ((vector([1, 0]), ZERO),),
    )
    assert geo.dim(unit_square) == 2
    assert geo.dim(segment) == 1
    assert geo.dim(HPolyhedron.empty(2)) == EMPTY_DIMENSION


def test_faces_of_interval() -> None:
    """Test that [0, 1] has itself and its two endpoints as faces."""
    interval = HPolyhedron.box(vector([0]), vector([1]))
    faces = geo.faces(interval)
    assert len(faces) == 3
    dims = sorted(geo.dim(F) for F in faces)
    assert dims == [0, 0, 1]
    points = sorted(
        geo.relative_interior_point(F) for F in faces if geo.dim(F) == 0
    )
    assert points == [vector([0]), vector([1])]


def test_faces_of_orthant() -> None:
    """Test the four faces of the nonnegative quadrant."""
    faces = geo.faces(HPolyhedron.orthant(2))
    assert sorted(geo.dim(F) for F in faces) == [0, 1, 1, 2]
    origin = HPolyhedron.point(vector([0, 0]))
    assert any(geo.same_set(F, origin) for F in faces)


def test_faces_of_point() -> None:
    """Test that a point is its only face."""
    faces = geo.faces(HPolyhedron.point(vector([1, 2])))
    assert len(faces) == 1


def test_normal_cone_of_orthant() -> None:
    """Test that the normal cone of the quadrant at 0 is the negative
    quadrant.
    """
    P = HPolyhedron.orthant(2)
    N = geo.normal_cone(P, HPolyhedron.point(vector([0, 0])))
    assert geo.same_set(N, HPolyhedron.orthant(2, sign=-1))


def test_normal_cone_of_edge(unit_square: HPolyhedron) -> None:
    """Test that the bottom edge of the square has normal ray -e2."""
    edge = unit_square.constrain(equalities=[(vector([0, 1]), ZERO)])
    N = geo.normal_cone(unit_square, edge)
    generators = geo.v_representation(N)
    assert generators.vertices == (vector([0, 0]),)
    assert generators.rays == (vector([0, -1]),)
    assert generators.lines == ()


def test_normal_cone_of_half_plane() -> None:
    """Test the normal cone of x <= 0 along its boundary line."""
    P = HPolyhedron(2, ((vector([1, 0]), ZERO),))
    line = HPolyhedron(2, (), ((vector([1, 0]), ZERO),))
    generators = geo.v_representation(geo.normal_cone(P, line))
    assert generators.rays == (vector([1, 0]),)


def test_normal_cone_not_a_face(unit_square: HPolyhedron) -> None:
    """Test that a non-face is rejected."""
    inner = HPolyhedron.point(vector(["1/2", "1/2"]))
    outside = HPolyhedron.point(vector([2, 2]))
    for F in (inner, outside):
        with pytest.raises(NotAFaceError):
            geo.normal_cone(unit_square, F)


def test_project(unit_square: HPolyhedron) -> None:
    """Test projections onto the unit square."""
    corner = geo.project(vector([2, 2]), unit_square)
    assert corner.points == (vector([1, 1]),)
    assert corner.distance_sq == 2
    below = geo.project(vector(["1/2", -1]), unit_square)
    assert below.points == (vector(["1/2", 0]),)
    assert below.distance_sq == 1
    inside = geo.project(vector(["1/3", "2/3"]), unit_square)
    assert inside.points == (vector(["1/3", "2/3"]),)
    assert inside.distance_sq == 0


def test_project_empty() -> None:
    """Test that projecting onto the empty set fails."""
    with pytest.raises(EmptyPolyhedronError):
        geo.project(vector([0]), HPolyhedron.empty(1))


def test_project_union() -> None:
    """Test that equidistant nearest points are all returned."""
    left = HPolyhedron.point(vector([-1]))
    right = HPolyhedron.point(vector([1]))
    projection = geo.project_union(vector([0]), [left, right])
    assert projection.points == (vector([-1]), vector([1]))
    assert projection.distance_sq == 1


def test_v_representation() -> None:
    """Test generators of an interval, a half-line and a triangle."""
    interval = geo.v_representation(
        HPolyhedron.box(vector([-1]), vector([1]))
    )
    assert interval.vertices == (vector([-1]), vector([1]))
    assert interval.rays == ()
    ray = geo.v_representation(HPolyhedron.orthant(1))
    assert ray.vertices == (vector([0]),)
    assert ray.rays == (vector([1]),)
    triangle = [vector([1, 0, 0]), vector([0, 1, 0]), vector([0, 0, 0])]
    generators = geo.v_representation(geo.convex_hull(triangle))
    assert set(generators.vertices) == set(triangle)


def test_v_representation_of_line() -> None:
    """Test that lines are split off."""
    line = HPolyhedron(2, (), ((vector([0, 1]), ONE),))
    generators = geo.v_representation(line)
    assert generators.lines == (vector([1, 0]),)
    assert generators.vertices == (vector([0, 1]),)


def test_v_representation_of_half_space() -> None:
    """Test that vertices and rays are orthogonal to the lines."""
    half_space = HPolyhedron(3, ((vector([1, 1, 1]), ONE),))
    generators = geo.v_representation(half_space)
    assert generators.vertices == (vector(["1/3", "1/3", "1/3"]),)
    assert generators.rays == (vector([-1, -1, -1]),)
    assert len(generators.lines) == 2
    for line in generators.lines:
        assert sum(line) == 0


def test_from_generators_with_lines() -> None:
    """Test that a vertex, a ray and a line give a half-plane."""
    half_plane = geo.from_generators(
        2, [vector([0, 1])], [vector([0, 1])], [vector([1, 0])]
    )
    assert geo.same_set(half_plane, upper_half_plane())
    generators = geo.v_representation(half_plane)
    assert generators.vertices == (vector([0, 1]),)
    assert generators.rays == (vector([0, 1]),)
    assert generators.lines == (vector([1, 0]),)


def test_from_generators_of_triangle() -> None:
    """Test the facets of the convex hull of a triangle."""
    triangle = geo.convex_hull(
        [vector([0, 0]), vector([2, 0]), vector([0, 2])]
    )
    for a, _ in triangle.inequalities:
        assert any(q != 0 for q in a)
    assert geo.contains(triangle, vector([1, 1]))
    assert not geo.contains(triangle, vector(["3/2", "3/2"]))
    assert geo.same_set(
        triangle,
        HPolyhedron.orthant(2).constrain([(vector([1, 1]), Fraction(2))]),
    )


def test_minkowski_translate_and_intersect() -> None:
    """Test translation of a cone and intersections of half-lines."""
    translated = geo.minkowski_translate(vector([1]), HPolyhedron.orthant(1))
    assert geo.same_set(translated, half_line(-1, -1))
    interval = geo.intersect(half_line(-1, 1), half_line(1, 1))
    assert geo.same_set(interval, HPolyhedron.box(vector([-1]), vector([1])))
    assert not geo.feasible(geo.intersect(half_line(-1, -1), half_line(1, -1)))


def test_minkowski_sum_and_product() -> None:
    """Test sums and products of intervals."""
    interval = HPolyhedron.box(vector([0]), vector([1]))
    total = geo.minkowski_sum(interval, interval)
    assert geo.same_set(total, HPolyhedron.box(vector([0]), vector([2])))
    assert geo.dim(geo.product(interval, interval)) == 2


def test_linear_image_and_preimage() -> None:
    """Test images and preimages under the diagonal map."""
    interval = HPolyhedron.box(vector([0]), vector([1]))
    diagonal = [vector([1]), vector([1])]
    image = geo.linear_image(interval, diagonal)
    assert geo.dim(image) == 1
    assert geo.contains(image, vector([1, 1]))
    square = HPolyhedron.box(vector([0, 0]), vector([1, 1]))
    assert geo.same_set(geo.preimage(square, diagonal), interval)


def test_chambers() -> None:
    """Test the chambers of two crossing lines."""
    lines = [(vector([1, 0]), ZERO), (vector([0, 1]), ZERO)]
    chambers = geo.chambers(lines, HPolyhedron.whole_space(2))
    assert sorted(signs for signs, _ in chambers) == [
        (-1, -1),
        (-1, 1),
        (1, -1),
        (1, 1),
    ]


def test_covered_by() -> None:
    """Test coverage of a square by its two halves."""
    square = HPolyhedron.box(vector([0, 0]), vector([2, 2]))
    left = HPolyhedron.box(vector([0, 0]), vector([1, 2]))
    right = HPolyhedron.box(vector([1, 0]), vector([2, 2]))
    assert geo.covered_by(square, [left, right])
    point = geo.uncovered_point(square, [left])
    assert point is not None
    assert geo.contains(square, point)
    assert not geo.contains(left, point)


def test_uncovered_direction() -> None:
    """Test directions outside a family of cones."""
    quadrants = [HPolyhedron.orthant(2, 1), HPolyhedron.orthant(2, -1)]
    direction = geo.uncovered_direction(quadrants, 2)
    assert direction is not None
    assert not any(geo.contains(C, direction) for C in quadrants)
    half_planes = [
        HPolyhedron(2, ((vector([1, 0]), ZERO),)),
        HPolyhedron(2, ((vector([-1, 0]), ZERO),)),
    ]
    assert geo.uncovered_direction(half_planes, 2) is None


boxes = st.lists(st.integers(-5, 5), min_size=4, max_size=4)
points = st.lists(st.integers(-8, 8), min_size=2, max_size=2)


@settings(max_examples=25, deadline=None)
@given(bounds=boxes, target=points)
def test_project_box_matches_clipping(
    bounds: List[int], target: List[int]
) -> None:
    """Test that projection onto a box clips each coordinate."""
    lower = vector([min(bounds[0], bounds[1]), min(bounds[2], bounds[3])])
    upper = vector([max(bounds[0], bounds[1]), max(bounds[2], bounds[3])])
    box = HPolyhedron.box(lower, upper)
    x = vector(target)
    expected: Vector = tuple(
        min(max(x[i], lower[i]), upper[i]) for i in range(2)
    )
    projection = geo.project(x, box)
    assert projection.points == (expected,)
    assert projection.distance_sq == sum(
        (x[i] - expected[i]) ** 2 for i in range(2)
    )


@settings(max_examples=25, deadline=None)
@given(bounds=boxes)
def test_v_representation_round_trip(bounds: List[int]) -> None:
    """Test that the hull of the vertices of a box is the box."""
    lower = vector([min(bounds[0], bounds[1]), min(bounds[2], bounds[3])])
    upper = vector([max(bounds[0], bounds[1]), max(bounds[2], bounds[3])])
    box = HPolyhedron.box(lower, upper)
    generators = geo.v_representation(box)
    rebuilt = geo.from_generators(
        2, generators.vertices, generators.rays, generators.lines
    )
    assert geo.same_set(box, rebuilt)
