"""Tests for the oracle module."""

from fractions import Fraction
from typing import Callable, List

import numpy as np
import pytest

from subjetlab.dimension_lab import covering_test_points, graph_union
from subjetlab.kinds import SubdiffKind
from subjetlab.oracle import compare_with_exact, oracle_subdiff
from subjetlab.piecewise_model import PiecewiseFunction
from subjetlab.rational import Vector, vector
from subjetlab.subdifferential import NotLipschitzError, subdiff

Loader = Callable[[str], PiecewiseFunction]


@pytest.mark.parametrize(
    "name,point,kind",
    [
        ("abs", [0], SubdiffKind.FRECHET),
        ("abs", [0], SubdiffKind.LIMITING),
        ("abs", [0], SubdiffKind.CLARKE),
        ("abs", [1], SubdiffKind.LIMITING),
        ("neg_abs", [0], SubdiffKind.LIMITING),
        ("neg_abs", [0], SubdiffKind.CLARKE),
        ("indicator_orthant", [0, 0], SubdiffKind.FRECHET),
    ],
)
def test_oracle_agrees_with_exact(
    corpus_function: Loader, name: str, point: list, kind: SubdiffKind
) -> None:
    """Test that the oracle agrees with the exact engine."""
    f = corpus_function(name)
    result = oracle_subdiff(f, point, kind)
    assert compare_with_exact(result, subdiff(f, point, kind)) == []


def sample_points(f: PiecewiseFunction, count: int = 25) -> List[Vector]:
    """Covering points of the limiting graph, completed with seeded
    points on the grid of step 1/8 in ``[-2, 2]^n``.
    """
    U = graph_union(f, SubdiffKind.LIMITING)
    points = list(
        dict.fromkeys(p[: f.ambient_dim] for p in covering_test_points(U))
    )[:count]
    rng = np.random.default_rng(9)
    while len(points) < count:
        x = vector(
            Fraction(int(rng.integers(-16, 16, endpoint=True)), 8)
            for _ in range(f.ambient_dim)
        )
        if x not in points:
            points.append(x)
    return points


@pytest.mark.parametrize(
    "name",
    [
        "abs",
        "neg_abs",
        "indicator_box",
        pytest.param("min_kink", marks=pytest.mark.slow),
        pytest.param("indicator_orthant", marks=pytest.mark.slow),
        pytest.param("pullback_sum", marks=pytest.mark.slow),
    ],
)
@pytest.mark.parametrize("kind", list(SubdiffKind))
def test_oracle_agrees_on_corpus(
    corpus_function: Loader, name: str, kind: SubdiffKind
) -> None:
    """Test the oracle against the exact engine at 25 points of every
    one and two dimensional affine fixture.

    The Clarke set is only compared where ``f`` is locally Lipschitz.
    """
    f = corpus_function(name)
    compared = 0
    for x in sample_points(f):
        try:
            exact = subdiff(f, x, kind)
        except NotLipschitzError:
            assert kind is SubdiffKind.CLARKE
            continue
        result = oracle_subdiff(f, x, kind)
        assert compare_with_exact(result, exact) == [], x
        compared += 1
    assert compared > 0


def test_oracle_frechet_abs(corpus_function: Loader) -> None:
    """Test the accepted grid points of |x| at 0."""
    result = oracle_subdiff(corpus_function("abs"), [0], SubdiffKind.FRECHET)
    accepted = result.accepted_points()
    assert min(accepted) == vector([-1])
    assert max(accepted) == vector([1])
    assert len(accepted) == 17


def test_oracle_limiting_neg_abs(corpus_function: Loader) -> None:
    """Test that -|x| at 0 accepts exactly the two slopes."""
    result = oracle_subdiff(
        corpus_function("neg_abs"), [0], SubdiffKind.LIMITING
    )
    assert result.accepted_points() == [vector([-1]), vector([1])]
    assert sorted(result.gradients) == [vector([-1]), vector([1])]


def test_oracle_frechet_outside_domain(corpus_function: Loader) -> None:
    """Test that nothing is accepted where f is infinite."""
    f = corpus_function("indicator_box")
    result = oracle_subdiff(f, [Fraction(5)], SubdiffKind.FRECHET)
    assert result.accepted_points() == []


def test_oracle_rejects_large_dimension(corpus_function: Loader) -> None:
    """Test that the Fréchet oracle refuses n = 3."""
    with pytest.raises(ValueError):
        oracle_subdiff(
            corpus_function("clarke3d"), [0, 0, 0], SubdiffKind.FRECHET
        )


def test_compare_reports_disagreement(corpus_function: Loader) -> None:
    """Test that comparing with the wrong exact set reports problems."""
    result = oracle_subdiff(corpus_function("abs"), [0], SubdiffKind.FRECHET)
    wrong = subdiff(corpus_function("neg_abs"), [0], SubdiffKind.FRECHET)
    problems = compare_with_exact(result, wrong)
    assert problems
    assert all("far outside" in problem for problem in problems)
