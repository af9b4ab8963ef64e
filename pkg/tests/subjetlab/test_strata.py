"""Tests for the strata module."""

from typing import Callable

from subjetlab import exact_geometry as geo
from subjetlab.exact_geometry import HPolyhedron
from subjetlab.piecewise_model import PiecewiseFunction
from subjetlab.rational import vector
from subjetlab.strata import (
    clarke_set,
    frechet_set,
    local_pattern,
    normal_cone_at,
    strata_at,
)

Loader = Callable[[str], PiecewiseFunction]


def test_normal_cone_at(corpus_function: Loader) -> None:
    """Test the normal cone of the cell x <= 0 at its endpoint."""
    left = corpus_function("abs").cells[0]
    cone = normal_cone_at(left, vector([0]))
    assert geo.contains(cone, vector([5]))
    assert not geo.contains(cone, vector([-1]))
    inside = normal_cone_at(left, vector([-1]))
    assert geo.same_set(inside, HPolyhedron.point(vector([0])))


def test_frechet_and_clarke_sets(corpus_function: Loader) -> None:
    """Test both sets of |x| at the kink."""
    cells = corpus_function("abs").cells
    interval = HPolyhedron.box(vector([-1]), vector([1]))
    assert geo.same_set(frechet_set(cells, vector([0])), interval)
    assert geo.same_set(clarke_set(cells, vector([0])), interval)
    assert not geo.feasible(frechet_set([], vector([0])))


def test_local_pattern(corpus_function: Loader) -> None:
    """Test the active cells and tight constraints of |x| at 0."""
    pattern = local_pattern(corpus_function("abs"), vector([0]))
    assert pattern.cells == (0, 1)
    assert pattern.linear == (frozenset({0}), frozenset({0}))
    assert pattern.sign == (frozenset(), frozenset())


def test_strata_at_kink(corpus_function: Loader) -> None:
    """Test the strata of min(x, y) at the origin."""
    strata = strata_at(corpus_function("min_kink"), vector([0, 0]))
    assert sorted(s.dimension for s in strata) == [1, 2, 2]
    line = min(strata, key=lambda s: s.dimension)
    assert line.pattern.cells == (0, 1)
    assert line.witness[0] == line.witness[1]
