"""Tests for the subdifferential module."""

from fractions import Fraction
from typing import Callable, List, Set, Tuple

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subjetlab import exact_geometry as geo
from subjetlab.exact_geometry import HPolyhedron
from subjetlab.generator import FunctionGenerator
from subjetlab.kinds import SubdiffKind
from subjetlab.piecewise_model import (
    PiecewiseFunction,
    indicator,
    min_of_affine,
)
from subjetlab.rational import Vector, vector
from subjetlab.subdifferential import (
    NotLipschitzError,
    SubdiffSet,
    clarke_equals_hull,
    clarke_subdiff,
    frechet_subdiff,
    inclusion_chain,
    limiting_subdiff,
    pullback_graph,
    subdiff,
    subjet_pieces,
    sum_rule_check,
)

Loader = Callable[[str], PiecewiseFunction]

ORIGIN = vector([0])


def vertex_sets(result: SubdiffSet) -> Set[Tuple[Vector, ...]]:
    """The vertex tuples of the pieces of a subdifferential."""
    return {
        geo.v_representation(P).vertices for P in result.nonempty_pieces()
    }


def interval(low: int, high: int) -> HPolyhedron:
    return HPolyhedron.box(vector([low]), vector([high]))


def test_frechet_subdiff(corpus_function: Loader) -> None:
    """Test convex kinks, concave kinks and normal cones."""
    at_abs = frechet_subdiff(corpus_function("abs"), ORIGIN)
    assert geo.same_set(at_abs.pieces[0], interval(-1, 1))
    assert frechet_subdiff(corpus_function("neg_abs"), ORIGIN).is_empty
    at_box = frechet_subdiff(corpus_function("indicator_box"), ORIGIN)
    assert geo.same_set(at_box.pieces[0], HPolyhedron.orthant(1, sign=-1))


def test_frechet_outside_domain(corpus_function: Loader) -> None:
    """Test that the subdifferential is empty off the domain."""
    result = frechet_subdiff(corpus_function("indicator_box"), vector([2]))
    assert result.is_empty


def test_limiting_subdiff(corpus_function: Loader) -> None:
    """Test the limiting subdifferential at kinks."""
    neg_abs = limiting_subdiff(corpus_function("neg_abs"), ORIGIN)
    assert vertex_sets(neg_abs) == {(vector([-1]),), (vector([1]),)}
    assert neg_abs.contains(vector([1]))
    assert not neg_abs.contains(vector([0]))
    at_abs = limiting_subdiff(corpus_function("abs"), ORIGIN)
    assert vertex_sets(at_abs) == {(vector([-1]), vector([1]))}


def test_limiting_subdiff_of_tent() -> None:
    """Test min(x, 1 - x) at its kink."""
    tent = min_of_affine(
        [(vector([1]), Fraction(0)), (vector([-1]), Fraction(1))]
    )
    result = limiting_subdiff(tent, vector(["1/2"]))
    assert vertex_sets(result) == {(vector([-1]),), (vector([1]),)}


def test_clarke_subdiff(corpus_function: Loader) -> None:
    """Test Clarke subdifferentials of kinks in one dimension."""
    for name in ("neg_abs", "abs"):
        result = clarke_subdiff(corpus_function(name), ORIGIN)
        assert geo.same_set(result.pieces[0], interval(-1, 1))


def test_clarke_subdiff_of_clarke_fixture(corpus_function: Loader) -> None:
    """Test that the Clarke set at 0 is the hull of the gradients +-e1,
    +-e2.
    """
    result = clarke_subdiff(corpus_function("clarke3d"), vector([0, 0, 0]))
    (P,) = result.pieces
    assert geo.dim(P) == 2
    assert set(geo.v_representation(P).vertices) == {
        vector([1, 0, 0]),
        vector([-1, 0, 0]),
        vector([0, 1, 0]),
        vector([0, -1, 0]),
    }
    assert result.contains(vector([0, 0, 0]))
    assert result.contains(vector(["1/2", "-1/2", 0]))


def test_clarke_requires_lipschitz(corpus_function: Loader) -> None:
    """Test that the Clarke set is refused on a domain boundary."""
    with pytest.raises(NotLipschitzError):
        clarke_subdiff(corpus_function("indicator_box"), ORIGIN)


def test_subdiff_dispatch(corpus_function: Loader) -> None:
    """Test that every kind is dispatched."""
    f = corpus_function("abs")
    for kind in SubdiffKind:
        assert subdiff(f, ORIGIN, kind).kind is kind


def test_special_fixture(corpus_function: Loader) -> None:
    """Test the hand-coded disc with an extra point."""
    f = corpus_function("disc_plus_point")
    corner = limiting_subdiff(f, vector([1, 0]))
    assert corner.contains(vector([3, 0]))
    assert not corner.contains(vector([0, 1]))
    inside = frechet_subdiff(f, vector(["1/2", 0]))
    assert vertex_sets(inside) == {(vector([0, 0]),)}
    assert frechet_subdiff(f, vector([0, 1])).is_empty


def graph_signature(
    f: PiecewiseFunction, kind: SubdiffKind
) -> List[Tuple[int, int]]:
    """Sorted (base dimension, subgradient dimension) of graph pieces."""
    return sorted(
        (geo.dim(p.base), geo.dim(p.subgrad)) for p in subjet_pieces(f, kind)
    )


def test_subjet_pieces(corpus_function: Loader) -> None:
    """Test the limiting graphs of -|x|, |x| and the quadrant indicator."""
    neg_abs = subjet_pieces(corpus_function("neg_abs"), SubdiffKind.LIMITING)
    assert len(neg_abs) == 2
    for piece in neg_abs:
        assert piece.dimension == 1
        assert piece.contains(vector([0]), vector([-1])) or piece.contains(
            vector([0]), vector([1])
        )
    assert graph_signature(corpus_function("abs"), SubdiffKind.LIMITING) == [
        (0, 1),
        (1, 0),
        (1, 0),
    ]
    quadrant = graph_signature(
        corpus_function("indicator_orthant"), SubdiffKind.LIMITING
    )
    assert quadrant == [(0, 2), (1, 1), (1, 1), (2, 0)]


def test_pullback_graph(corpus_function: Loader) -> None:
    """Test the graph of x -> df(x) + df(x) for f = -|x|."""
    g = corpus_function("pullback_sum")
    pieces = pullback_graph(g, [vector([1]), vector([1])])
    signature = sorted(
        (
            geo.dim(p.base),
            geo.v_representation(p.subgrad).vertices,
        )
        for p in pieces
    )
    assert signature == [
        (0, (vector([0]),)),
        (1, (vector([-2]),)),
        (1, (vector([2]),)),
    ]
    isolated = next(p for p in pieces if geo.dim(p.base) == 0)
    assert geo.contains(isolated.base, vector([0]))


def test_pullback_identity(corpus_function: Loader) -> None:
    """Test that the identity pulls back the limiting graph itself."""
    f = corpus_function("neg_abs")
    pieces = pullback_graph(f, [vector([1])])
    expected = subjet_pieces(f, SubdiffKind.LIMITING)
    assert len(pieces) == len(expected)


def test_pullback_scaling(corpus_function: Loader) -> None:
    """Test x -> 2 d|.|(2x)."""
    pieces = pullback_graph(corpus_function("abs"), [vector([2])])
    segment = next(p for p in pieces if geo.dim(p.base) == 0)
    assert geo.same_set(segment.subgrad, interval(-2, 2))


def test_sum_rule(corpus_function: Loader) -> None:
    """Test the sum rule with a Lipschitz first summand."""
    abs_ = corpus_function("abs")
    box = indicator(interval(0, 1))
    assert sum_rule_check(abs_, box, ORIGIN)
    assert sum_rule_check(corpus_function("neg_abs"), abs_, ORIGIN)
    with pytest.raises(NotLipschitzError):
        sum_rule_check(box, abs_, ORIGIN)


def test_inclusion_chain(corpus_function: Loader) -> None:
    """Test Frechet in limiting in Clarke and the hull identity."""
    for name in ("abs", "neg_abs", "min_kink"):
        f = corpus_function(name)
        x = tuple(Fraction(0) for _ in range(f.ambient_dim))
        chain = inclusion_chain(f, x)
        assert chain == {
            "frechet_in_limiting": True,
            "limiting_in_clarke": True,
        }
        assert clarke_equals_hull(f, x)
    chain = inclusion_chain(corpus_function("indicator_box"), ORIGIN)
    assert chain == {"frechet_in_limiting": True}


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 10_000), other=st.integers(0, 10_000))
def test_sum_rule_on_random_pairs(seed: int, other: int) -> None:
    """Test the sum rule on generated continuous functions."""
    f1 = FunctionGenerator(seed, 1, 2).generate()
    f2 = FunctionGenerator(other, 1, 2).generate()
    for t in (-2, 0, 1):
        assert sum_rule_check(f1, f2, vector([t]))
