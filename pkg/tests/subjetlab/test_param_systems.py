"""Tests for the param_systems module."""

from fractions import Fraction
from typing import Any, Callable, Dict

import numpy as np
import pytest

from subjetlab.dimension_lab import graph_union
from subjetlab.exact_geometry import HPolyhedron
from subjetlab.kinds import SubdiffKind
from subjetlab.minty_maps import MintyMap, preimage, random_matrix
from subjetlab.param_systems import (
    AccessError,
    AnchorError,
    HypothesisViolatedError,
    ParamSystem,
    access_point,
    accessibility_hypothesis,
    local_dim_monotonicity_check,
    minimize_quadratic,
    sensitivity_experiment,
    solve,
)
from subjetlab.piecewise_model import PiecewiseFunction, TierError
from subjetlab.rational import DimensionMismatchError, vector

Loader = Callable[[str], PiecewiseFunction]

HALF = Fraction(1, 2)
TENTH = Fraction(1, 10)
ORIGIN = [HPolyhedron.point(vector([0]))]


def system(f: PiecewiseFunction, a: int, b: Fraction) -> ParamSystem:
    """The one dimensional system ``a x + v = b``."""
    return ParamSystem(f, MintyMap.of([[a]]), vector([b]))


@pytest.mark.parametrize(
    "name,b,expected",
    [
        ("abs", Fraction(2), [vector([1, 1])]),
        ("abs", HALF, [vector([0, HALF])]),
        ("neg_abs", Fraction(0), [vector([-1, 1]), vector([1, -1])]),
    ],
)
def test_solve(
    corpus_function: Loader, name: str, b: Fraction, expected: list
) -> None:
    """Test exact solutions of x + v = b."""
    solutions = solve(system(corpus_function(name), 1, b))
    assert solutions.finite
    assert solutions.points == expected
    assert solutions.to_dict()["finite"] is True


def test_solve_infinite(corpus_function: Loader) -> None:
    """Test that 0 x + v = 1 has a whole ray of solutions on -|x|."""
    solutions = solve(system(corpus_function("neg_abs"), 0, Fraction(1)))
    assert not solutions.finite
    assert solutions.contains(vector([-5, 1]))
    assert not solutions.contains(vector([5, 1]))


def test_solve_frechet(corpus_function: Loader) -> None:
    """Test that -|x| has no Fréchet solutions at its kink."""
    f = corpus_function("neg_abs")
    solutions = solve(system(f, 1, Fraction(0)), SubdiffKind.FRECHET)
    assert vector([-1, 1]) in solutions.points
    assert all(p[0] != 0 for p in solutions.points)


def test_solve_matches_preimage(corpus_function: Loader) -> None:
    """Test that solving agrees with the Minty preimage on seeded random
    systems, and that every solution maps onto ``b``.
    """
    rng = np.random.default_rng(2024)
    names = [
        "abs",
        "neg_abs",
        "indicator_box",
        "min_kink",
        "indicator_orthant",
        "pullback_sum",
    ]
    for k in range(50):
        f = corpus_function(names[k % len(names)])
        n = f.ambient_dim
        A = random_matrix(n, rng, numerator_bound=5, denominator_bound=3)
        b = vector(
            Fraction(int(rng.integers(-6, 6, endpoint=True)), 2)
            for _ in range(n)
        )
        solutions = solve(ParamSystem(f, A, b))
        expected = preimage(A, graph_union(f, SubdiffKind.LIMITING), b)
        assert solutions.finite == expected.finite, (f.name, A, b)
        if not solutions.finite:
            continue
        assert solutions.points == expected.points, (f.name, A, b)
        for point in solutions.points:
            assert A.apply(point) == b


def test_system_checks(corpus_function: Loader) -> None:
    """Test the dimension and tier checks of a system."""
    with pytest.raises(DimensionMismatchError):
        ParamSystem(
            corpus_function("abs"),
            MintyMap.of([[1, 0], [0, 1]]),
            vector([0, 0]),
        )
    with pytest.raises(TierError):
        solve(
            ParamSystem(
                corpus_function("disc_plus_point"),
                MintyMap.of([[1, 0], [0, 1]]),
                vector([0, 0]),
            )
        )


@pytest.mark.slow
def test_sensitivity_degenerate(corpus_function: Loader) -> None:
    """Test that about half of the perturbations of 0 x + v = 1 keep a
    nearby solution on -|x| when b moves much less than A.
    """
    result = sensitivity_experiment(
        corpus_function("neg_abs"),
        MintyMap.of([[0]]),
        [1],
        anchor=[0, 1],
        eps=TENTH,
        delta=TENTH,
        trials=10000,
        seed=11,
        gamma=Fraction(1, 10000),
    )
    assert 0.45 <= result.fraction <= 0.55
    assert result.radius_matrix == TENTH
    assert result.radius_rhs == Fraction(1, 10000)


@pytest.mark.slow
def test_sensitivity_degenerate_joint_ball(corpus_function: Loader) -> None:
    """Test the joint ball on 0 x + v = 1 over -|x|.

    A draw succeeds when ``|b - 1| <= eps |a|`` with opposite signs, so
    the expected fraction is ``eps / 4``.
    """
    f = corpus_function("neg_abs")
    kwargs: Dict[str, Any] = dict(anchor=[0, 1], eps=TENTH, seed=11)
    result = sensitivity_experiment(
        f, MintyMap.of([[0]]), [1], delta=TENTH, trials=10000, **kwargs
    )
    assert result.radius_matrix == result.radius_rhs == Fraction(1, 20)
    assert 0.015 <= result.fraction <= 0.035
    shrunk = sensitivity_experiment(
        f, MintyMap.of([[0]]), [1], delta=TENTH / 10, trials=2000, **kwargs
    )
    assert shrunk.fraction > 0.01


@pytest.mark.slow
def test_sensitivity_seed_blocks(corpus_function: Loader) -> None:
    """Test that disjoint seed blocks give consistent fractions."""
    f = corpus_function("neg_abs")
    fractions = [
        sensitivity_experiment(
            f,
            MintyMap.of([[0]]),
            [1],
            anchor=[0, 1],
            eps=TENTH,
            delta=TENTH,
            trials=10000,
            seed=seed,
            gamma=Fraction(1, 10000),
        ).fraction
        for seed in (101, 202)
    ]
    assert abs(fractions[0] - fractions[1]) < 0.05


def test_sensitivity_stable(corpus_function: Loader) -> None:
    """Test that x + v = 1/2 on |x| is stable under perturbation."""
    kwargs: Dict[str, Any] = dict(
        anchor=[0, HALF], eps=TENTH, delta=TENTH, trials=50, seed=3
    )
    f = corpus_function("abs")
    result = sensitivity_experiment(f, MintyMap.of([[1]]), [HALF], **kwargs)
    assert result.fraction == 1.0
    assert result.infinite == 0
    assert result.radius_matrix == Fraction(1, 20)
    again = sensitivity_experiment(f, MintyMap.of([[1]]), [HALF], **kwargs)
    assert again.to_dict() == result.to_dict()


def test_sensitivity_bad_anchor(corpus_function: Loader) -> None:
    """Test that the anchor must solve the system."""
    with pytest.raises(AnchorError):
        sensitivity_experiment(
            corpus_function("neg_abs"),
            MintyMap.of([[0]]),
            [1],
            anchor=[1, 1],
            eps=TENTH,
            delta=TENTH,
            trials=10,
            seed=1,
        )


def test_access_abs(corpus_function: Loader) -> None:
    """Test Fréchet subjet points of |x| converging to (0, 0, 1)."""
    witness = access_point(corpus_function("abs"), ORIGIN, [0], [1])
    assert witness.converged
    assert witness.penalties == [1, 2, 4, 8, 16]
    for triple in witness.triples:
        assert triple.x[0] > 0
        assert triple.v == vector([1])
    assert witness.to_dict()["converged"] is True


def test_access_neg_abs(corpus_function: Loader) -> None:
    """Test that the limiting subgradient 1 of -|x| is reached from the
    left.
    """
    witness = access_point(corpus_function("neg_abs"), ORIGIN, [0], [1])
    assert witness.hypothesis.localized
    assert witness.converged
    assert all(triple.x[0] < 0 for triple in witness.triples)


def test_access_refusal(corpus_function: Loader) -> None:
    """Test the refusal when the anchor is interior for every penalty."""
    with pytest.raises(HypothesisViolatedError) as excinfo:
        access_point(corpus_function("abs"), ORIGIN, [0], [0])
    certificate = excinfo.value.certificate
    assert not certificate.boundary_holds
    assert set(certificate.statuses.values()) == {"interior"}


def test_access_errors(corpus_function: Loader) -> None:
    """Test the refusals of the accessibility construction."""
    f = corpus_function("abs")
    with pytest.raises(AccessError):
        access_point(f, [HPolyhedron.point(vector([1]))], [0], [1])
    with pytest.raises(AccessError):
        access_point(f, ORIGIN, [0], [2])
    with pytest.raises(AccessError):
        access_point(f, ORIGIN, [0], [1], schedule=[1, 0])


def test_accessibility_hypothesis(corpus_function: Loader) -> None:
    """Test the boundary status of the anchor subgradient of |x|."""
    hypothesis = accessibility_hypothesis(
        corpus_function("abs"), ORIGIN, [0], [1], schedule=[1, 2]
    )
    assert hypothesis.statuses == {1: "boundary", 2: "boundary"}
    assert hypothesis.boundary_holds
    assert not hypothesis.localized


def test_minimize_quadratic() -> None:
    """Test z^2 - 2 z on [0, 1/2]."""
    interval = HPolyhedron.box(vector([0]), vector([HALF]))
    value, point = minimize_quadratic(
        [[Fraction(2)]], [Fraction(-2)], interval
    )
    assert point == vector([HALF])
    assert value == Fraction(-3, 4)


def test_monotonicity(corpus_function: Loader) -> None:
    """Test local dimensions under x + v and the notice for A = 0."""
    U = graph_union(corpus_function("neg_abs"), SubdiffKind.LIMITING)
    report = local_dim_monotonicity_check(MintyMap.of([[1]]), U)
    assert report.passed
    assert report.preserved == [True, True]
    skipped = local_dim_monotonicity_check(MintyMap.of([[0]]), U)
    assert skipped.skipped
    assert not skipped.passed
    assert "[0, 1]" in skipped.notice
