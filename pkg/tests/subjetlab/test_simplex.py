"""Tests for the simplex module."""

from fractions import Fraction

from subjetlab.rational import vector
from subjetlab.simplex import LinearProgramStatus, maximize


def test_optimal() -> None:
    """Test maximizing x + y over a triangle."""
    result = maximize(
        vector([1, 1]),
        inequalities=[
            (vector([-1, 0]), Fraction(0)),
            (vector([0, -1]), Fraction(0)),
            (vector([2, 1]), Fraction(2)),
        ],
    )
    assert result.status is LinearProgramStatus.OPTIMAL
    assert result.value == 2
    assert result.point == vector([0, 2])


def test_equalities() -> None:
    """Test an equality constrained program with a rational optimum."""
    result = maximize(
        vector([1, 0]),
        inequalities=[(vector([3, 0]), Fraction(1))],
        equalities=[(vector([1, 1]), Fraction(1))],
    )
    assert result.value == Fraction(1, 3)
    assert result.point == vector(["1/3", "2/3"])


def test_infeasible() -> None:
    """Test that contradictory constraints are reported."""
    result = maximize(
        vector([1]),
        inequalities=[
            (vector([1]), Fraction(0)),
            (vector([-1]), Fraction(-1)),
        ],
    )
    assert result.status is LinearProgramStatus.INFEASIBLE
    assert not result.feasible


def test_unbounded() -> None:
    """Test that an unbounded program returns a ray of increase."""
    result = maximize(vector([1]), inequalities=[(vector([-1]), Fraction(0))])
    assert result.status is LinearProgramStatus.UNBOUNDED
    assert result.feasible
    assert result.ray is not None and result.ray[0] > 0
