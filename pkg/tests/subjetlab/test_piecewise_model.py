"""Tests for the piecewise_model module."""

import math
from fractions import Fraction
from pathlib import Path
from typing import Callable

import pytest

from subjetlab import exact_geometry as geo
from subjetlab.exact_geometry import HPolyhedron
from subjetlab.fixtures import load_fixture
from subjetlab.kinds import Tier
from subjetlab.piecewise_model import (
    Cell,
    InconsistentValueError,
    OutsideCellError,
    PiecewiseFunction,
    Polynomial,
    TierError,
    affine_precompose,
    evaluate,
    function_sum,
    gradient_on_cell,
    indicator,
    is_interior_point,
    min_of_affine,
    negate,
    refine,
    validate,
)
from subjetlab.rational import vector
from subjetlab.subdifferential import cell_complex

Loader = Callable[[str], PiecewiseFunction]


def test_polynomial_calculus() -> None:
    """Test evaluation, gradients and affine composition."""
    # x^2 y - 3
    p = Polynomial(2, (((2, 1), Fraction(1)), ((0, 0), Fraction(-3))))
    assert p.degree == 3
    assert not p.is_affine
    assert p.evaluate(vector([2, 1])) == 1
    assert p.gradient(vector([2, 1])) == vector([4, 4])
    # p(t, t) = t^3 - 3
    q = p.compose_affine([vector([1]), vector([1])], vector([0, 0]))
    assert q.evaluate(vector([2])) == 5
    assert Polynomial.affine(vector([1, -2]), Fraction(3)).affine_parts() == (
        vector([1, -2]),
        Fraction(3),
    )


def test_evaluate(corpus_function: Loader) -> None:
    """Test values inside and outside the domain."""
    assert evaluate(corpus_function("neg_abs"), vector([-3])) == -3
    square = indicator(HPolyhedron.box(vector([0, 0]), vector([1, 1])))
    assert evaluate(square, vector([2, 0])) == math.inf
    assert evaluate(square, vector(["1/2", 1])) == 0


def test_evaluate_polynomial_tier(corpus_function: Loader) -> None:
    """Test the three-dimensional fixture built from min{x, y, z^2}."""
    f = corpus_function("clarke3d")
    assert f.tier is Tier.POLYNOMIAL
    assert evaluate(f, vector([1, 2, 1])) == 1


def test_evaluate_inconsistent(data_dir: Path) -> None:
    """Test that disagreeing cells are reported."""
    f = load_fixture(data_dir.joinpath("fixtures/jump.json"))
    with pytest.raises(InconsistentValueError):
        evaluate(f, vector([0]))


def test_gradient_on_cell() -> None:
    """Test gradients of affine and polynomial cells."""
    ray = HPolyhedron.orthant(1)
    cell = Cell(ray, Polynomial.affine(vector([-1]), Fraction(0)))
    assert gradient_on_cell(cell, vector([0])) == vector([-1])
    assert gradient_on_cell(cell, vector([5])) == vector([-1])
    square = Polynomial(3, (((0, 0, 2), Fraction(1)),))
    cube = Cell(HPolyhedron.orthant(3), square)
    assert gradient_on_cell(cube, vector([0, 0, 0])) == vector([0, 0, 0])
    with pytest.raises(OutsideCellError):
        gradient_on_cell(cell, vector([-1]))


def test_affine_tier_rejects_polynomials() -> None:
    """Test that the affine tier only holds affine formulas."""
    cell = Cell(HPolyhedron.whole_space(1), Polynomial(1, (((2,), 1),)))
    with pytest.raises(TierError):
        PiecewiseFunction("square", 1, Tier.AFFINE, (cell,))


def test_validate_passes(corpus_function: Loader) -> None:
    """Test that the affine corpus fixtures are valid."""
    for name in ("abs", "neg_abs", "min_kink", "indicator_box"):
        report = validate(corpus_function(name))
        assert report.passed, report.violations


def test_validate_clarke_fixture(corpus_function: Loader) -> None:
    """Test the declared adjacency of the polynomial-tier fixture."""
    report = validate(corpus_function("clarke3d"))
    assert report.checks["adjacency"]
    assert report.passed


def test_validate_disc_plus_point(corpus_function: Loader) -> None:
    """Test that the disc with an extra boundary point fails lsc."""
    report = validate(corpus_function("disc_plus_point"))
    assert not report.checks["lsc"]
    assert any(v.witness is not None for v in report.violations)


def test_validate_continuity_failure(data_dir: Path) -> None:
    """Test that a jump between cells fails continuity."""
    f = load_fixture(data_dir.joinpath("fixtures/jump.json"))
    report = validate(f)
    assert not report.checks["continuity"]
    assert not report.passed
    assert report.violations[0].witness == vector([0])


def test_refine_splits_overlapping_boundaries() -> None:
    """Test refinement of a half-plane meeting two quadrants."""
    x = Polynomial.affine(vector([1, 0]), Fraction(0))
    zero = Polynomial.constant(2, Fraction(0))
    left = HPolyhedron(2, ((vector([1, 0]), Fraction(0)),))
    upper = HPolyhedron.orthant(2)
    lower = HPolyhedron(
        2,
        ((vector([-1, 0]), Fraction(0)), (vector([0, 1]), Fraction(0))),
    )
    f = PiecewiseFunction(
        "split",
        2,
        Tier.AFFINE,
        (Cell(left, zero), Cell(upper, x), Cell(lower, x)),
    )
    refined = refine(f)
    assert len(refined.cells) == 4
    assert len(refine(refined).cells) == 4
    for cell in refined.cells:
        for other in refined.cells:
            common = geo.intersect(cell.region, other.region)
            if geo.feasible(common):
                assert geo.is_face(cell.region, common)


def test_min_of_three_affine_functions() -> None:
    """Test the complex of min{x, y, -x - y}."""
    f = min_of_affine(
        [
            (vector([1, 0]), Fraction(0)),
            (vector([0, 1]), Fraction(0)),
            (vector([-1, -1]), Fraction(0)),
        ]
    )
    assert len(f.cells) == 3
    dims = sorted(face.dimension for face in cell_complex(f).faces)
    assert dims == [0, 1, 1, 1, 2, 2, 2]


def test_builders(corpus_function: Loader) -> None:
    """Test min, indicator, negation, sums and precomposition."""
    neg_abs = min_of_affine(
        [(vector([1]), Fraction(0)), (vector([-1]), Fraction(0))]
    )
    abs_ = corpus_function("abs")
    points = [vector([t]) for t in (-3, "-1/2", 0, 2)]
    for x in points:
        assert evaluate(neg_abs, x) == -abs(x[0])
        assert evaluate(negate(abs_), x) == evaluate(neg_abs, x)
        assert evaluate(function_sum(abs_, neg_abs), x) == 0
    interval = indicator(HPolyhedron.box(vector([0]), vector([1])))
    assert evaluate(interval, vector(["1/2"])) == 0
    assert evaluate(interval, vector([2])) == math.inf
    g = corpus_function("pullback_sum")
    doubled = affine_precompose(g, [vector([1]), vector([1])])
    assert evaluate(doubled, vector([3])) == -6
    assert evaluate(doubled, vector([-2])) == -4


def test_is_interior_point(corpus_function: Loader) -> None:
    """Test interior points of a proper domain."""
    f = corpus_function("indicator_box")
    assert is_interior_point(f, vector(["1/2"]))
    assert not is_interior_point(f, vector([0]))
    assert is_interior_point(corpus_function("abs"), vector([0]))
