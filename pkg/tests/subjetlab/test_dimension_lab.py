"""Tests for the dimension_lab module."""

from fractions import Fraction
from typing import Callable

import numpy as np
import pytest

from subjetlab.dimension_lab import (
    InsufficientSamplesError,
    OutsideUnionError,
    covering_test_points,
    dim_identity_suite,
    estimate_local_dim_numeric,
    global_dim,
    graph_union,
    local_dim,
    sample_piece_union,
    verify_local_dim_theorem,
)
from subjetlab.exact_geometry import HPolyhedron
from subjetlab.fixtures import Fixture
from subjetlab.harness import composite_union
from subjetlab.kinds import SubdiffKind
from subjetlab.piecewise_model import PiecewiseFunction
from subjetlab.rational import vector

HALF = Fraction(1, 2)


def test_local_dim_neg_abs(
    corpus_function: Callable[[str], PiecewiseFunction]
) -> None:
    """Test the local dimension of the graph of -|x| at (0, 1)."""
    U = graph_union(corpus_function("neg_abs"), SubdiffKind.LIMITING)
    report = local_dim(U, [0, 1])
    assert report.local_dim == 1
    assert [dim for _, dim in report.certificate] == [1]
    assert report.to_dict()["point"] == ["0", "1"]


def test_local_dim_outside(
    corpus_function: Callable[[str], PiecewiseFunction]
) -> None:
    """Test that a point off every closure is refused."""
    U = graph_union(corpus_function("neg_abs"), SubdiffKind.LIMITING)
    with pytest.raises(OutsideUnionError):
        local_dim(U, [0, 5])


def test_local_dim_composite(
    corpus_entry: Callable[[str], Fixture]
) -> None:
    """Test the composite graph of the pullback fixture at the origin."""
    U = composite_union(corpus_entry("pullback_sum"))
    assert local_dim(U, [0, 0]).local_dim == 0
    assert global_dim(U) == 1


def test_local_dim_clarke_graph(
    corpus_function: Callable[[str], PiecewiseFunction]
) -> None:
    """Test the Clarke graph of the three dimensional fixture."""
    U = graph_union(corpus_function("clarke3d"), SubdiffKind.CLARKE)
    p = [0, 0, 0, HALF, -HALF, 0]
    assert local_dim(U, p).local_dim == 2
    assert global_dim(U) == 3


def test_local_dim_special_fixture(
    corpus_function: Callable[[str], PiecewiseFunction]
) -> None:
    """Test the special fixture at a point of its boundary ray."""
    U = graph_union(corpus_function("disc_plus_point"), SubdiffKind.LIMITING)
    assert local_dim(U, [1, 0, 1, 0]).local_dim == 1
    assert local_dim(U, [1, 0, 0, 0]).local_dim == 2


@pytest.mark.parametrize(
    "name,expected", [("neg_abs", 1), ("abs", 1), ("indicator_orthant", 2)]
)
def test_global_dim(
    corpus_function: Callable[[str], PiecewiseFunction],
    name: str,
    expected: int,
) -> None:
    """Test the global dimension of limiting graphs."""
    U = graph_union(corpus_function(name), SubdiffKind.LIMITING)
    assert global_dim(U) == expected


def test_covering_test_points(
    corpus_function: Callable[[str], PiecewiseFunction]
) -> None:
    """Test that the test points of |x| include the graph kinks."""
    U = graph_union(corpus_function("abs"), SubdiffKind.LIMITING)
    points = covering_test_points(U)
    assert vector([0, 1]) in points
    assert vector([0, -1]) in points
    assert len(points) == len(set(points))


def test_verify_passes(
    corpus_function: Callable[[str], PiecewiseFunction]
) -> None:
    """Test the local dimension theorem on -|x|."""
    report = verify_local_dim_theorem(
        corpus_function("neg_abs"), SubdiffKind.LIMITING
    )
    assert report.passed
    assert report.semi_linear
    assert set(report.dims) == {1}
    assert "runtime" not in report.to_dict()
    assert "runtime" in report.to_dict(timing=True)


def test_verify_reports_violations(
    corpus_function: Callable[[str], PiecewiseFunction]
) -> None:
    """Test that the special fixture violates full local dimension."""
    report = verify_local_dim_theorem(
        corpus_function("disc_plus_point"), SubdiffKind.LIMITING
    )
    assert not report.passed
    assert not report.semi_linear
    for violation in report.violations:
        assert violation.local_dim == 1
        assert violation.point[:2] == vector([1, 0])


def test_dim_identity_suite() -> None:
    """Test the dimension identities on a few polyhedra."""
    square = HPolyhedron.box(vector([0, 0]), vector([1, 1]))
    edge = HPolyhedron.box(vector([0, 0]), vector([1, 0]))
    corner = HPolyhedron.point(vector([0, 0]))
    interval = HPolyhedron.box(vector([0]), vector([1]))
    report = dim_identity_suite(
        [square, edge, corner], maps=[(interval, square)]
    )
    assert report.passed
    kinds = {check.identity for check in report.checks}
    assert kinds == {"product", "union", "monotone", "graph"}
    graph = [c for c in report.checks if c.identity == "graph"]
    assert graph[0].computed == 3


def test_estimate_line(
    corpus_function: Callable[[str], PiecewiseFunction]
) -> None:
    """Test the numeric estimate on samples of the graph of -|x|."""
    U = graph_union(corpus_function("neg_abs"), SubdiffKind.LIMITING)
    samples = sample_piece_union(U, [0, 1], radius=0.5, spacing=1e-3)
    estimate = estimate_local_dim_numeric(
        samples, [0, 1], radii=[0.05, 0.1, 0.2, 0.4]
    )
    assert estimate.estimate == 1
    assert estimate.pca_rank == 1
    assert not estimate.disagreement


def test_estimate_plane() -> None:
    """Test the numeric estimate on a uniform cloud in the square."""
    rng = np.random.default_rng(3)
    samples = rng.uniform(-1, 1, size=(20000, 2))
    estimate = estimate_local_dim_numeric(
        samples, [0, 0], radii=[0.1, 0.2, 0.4, 0.8]
    )
    assert estimate.estimate == 2
    assert estimate.pca_rank == 2


def test_estimate_insufficient() -> None:
    """Test the refusals of the numeric estimator."""
    rng = np.random.default_rng(3)
    samples = rng.uniform(-1, 1, size=(50, 2))
    with pytest.raises(InsufficientSamplesError):
        estimate_local_dim_numeric(samples, [0, 0], radii=[0.1, 0.2, 0.4])
    with pytest.raises(InsufficientSamplesError):
        estimate_local_dim_numeric(
            samples, [0, 0], radii=[0.1, 0.2, 0.4, 0.8]
        )
