"""Brute-force subdifferential oracle.

The definitions are applied literally on a rational grid of candidate
subgradients: ``v`` is accepted at ``x`` when ``v . u`` does not exceed
the difference quotient ``(f(x + r u) - f(x)) / r`` (plus a tolerance)
for every sampled direction ``u``. Function values are exact; only the
acceptance test runs in floating point with numpy. The oracle is an
independent check of the polyhedral engine and is used by the test
suite only.
"""

__all__ = ["OracleResult", "oracle_subdiff", "compare_with_exact"]

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from subjetlab import exact_geometry as geo
from subjetlab.config import Configuration
from subjetlab.kinds import SubdiffKind
from subjetlab.piecewise_model import PiecewiseFunction, evaluate
from subjetlab.rational import Vector, add, scale, sub, to_floats, vector
from subjetlab.subdifferential import SubdiffSet

logger = logging.getLogger("subjetlab")

STEP = Fraction(1, 2**20)
"""Step of the difference quotients."""

SPHERE = Fraction(1, 2**10)
"""Radius of the sphere on which nearby points are sampled."""


@dataclass
class OracleResult:
    """Grid points accepted by the oracle and sampled gradient limits."""

    kind: SubdiffKind
    point: Vector
    resolution: Fraction
    candidates: List[Vector]
    accepted: np.ndarray
    gradients: List[Vector] = field(default_factory=list)

    def accepted_points(self) -> List[Vector]:
        """The accepted grid points."""
        return [v for v, ok in zip(self.candidates, self.accepted) if ok]


def _directions(n: int, count: int) -> List[Vector]:
    """Rational unit directions: the axes and points of the rational
    parametrization of the circle.
    """
    if n == 1:
        return [vector([1]), vector([-1])]
    if n != 2:
        raise ValueError("The Fréchet oracle supports n <= 2.")
    directions = {
        vector([1, 0]),
        vector([-1, 0]),
        vector([0, 1]),
        vector([0, -1]),
    }
    for k in range(count):
        # s = tan(theta / 2) on an angular grid, rounded to a rational
        theta = -math.pi + 2 * math.pi * (k + 0.5) / count
        s = Fraction(math.tan(theta / 2)).limit_denominator(10**6)
        d = 1 + s * s
        directions.add(((1 - s * s) / d, 2 * s / d))
    return sorted(directions)


def _grid(n: int, radius: Fraction, resolution: Fraction) -> List[Vector]:
    k = int(radius / resolution)
    axis = [j * resolution for j in range(-k, k + 1)]
    points: List[Vector] = [()]
    for _ in range(n):
        points = [p + (q,) for p in points for q in axis]
    return points


def _quotients(
    f: PiecewiseFunction, x: Vector, directions: Sequence[Vector]
) -> np.ndarray:
    fx = evaluate(f, x)
    quotients = []
    for u in directions:
        value = evaluate(f, add(x, scale(STEP, u)))
        quotients.append(
            math.inf if value == math.inf else float((value - fx) / STEP)
        )
    return np.array(quotients)


def _frechet_mask(
    f: PiecewiseFunction,
    x: Vector,
    candidates: np.ndarray,
    directions: Sequence[Vector],
    tolerance: float,
) -> np.ndarray:
    if evaluate(f, x) == math.inf:
        return np.zeros(len(candidates), dtype=bool)
    bounds = _quotients(f, x, directions)
    u = np.array([to_floats(d) for d in directions])
    products = candidates @ u.T
    return np.all(products <= bounds + tolerance, axis=1)


def _gradient(f: PiecewiseFunction, y: Vector) -> Optional[Vector]:
    """Central difference gradient, or `None` at kinks and off the domain.

    Exact where ``f`` is affine near ``y``.
    """
    n = len(y)
    fy = evaluate(f, y)
    if fy == math.inf:
        return None
    gradient = []
    for i in range(n):
        e = tuple(STEP if j == i else Fraction(0) for j in range(n))
        high, low = evaluate(f, add(y, e)), evaluate(f, sub(y, e))
        if math.inf in (high, low):
            return None
        forward, backward = (high - fy) / STEP, (fy - low) / STEP
        if abs(forward - backward) > SPHERE:
            return None
        gradient.append((high - low) / (2 * STEP))
    return tuple(gradient)


def _sphere(x: Vector, directions: Sequence[Vector]) -> List[Vector]:
    return [add(x, scale(SPHERE, u)) for u in directions]


def _kinks(
    f: PiecewiseFunction, x: Vector, count: int, depth: int = 30
) -> List[Vector]:
    """Points where the gradient changes on a small circle around ``x``.

    Adjacent angles with different gradients are bisected.
    """
    if len(x) != 2:
        return []

    def at(theta: float) -> Vector:
        u = (
            Fraction(math.cos(theta)).limit_denominator(10**9),
            Fraction(math.sin(theta)).limit_denominator(10**9),
        )
        return add(x, scale(SPHERE, u))

    angles = [2 * math.pi * k / count for k in range(count + 1)]
    kinks = []
    for a, b in zip(angles, angles[1:]):
        ga, gb = _gradient(f, at(a)), _gradient(f, at(b))
        if ga == gb:
            continue
        for _ in range(depth):
            middle = (a + b) / 2
            if _gradient(f, at(middle)) == ga:
                a = middle
            else:
                b = middle
        kinks.append(at((a + b) / 2))
    return kinks


def oracle_subdiff(
    f: PiecewiseFunction,
    x: Sequence[Fraction],
    kind: SubdiffKind,
    resolution: Fraction = Fraction(1, 8),
    radius: Fraction = Fraction(2),
    directions: int = 256,
    tolerance: Optional[float] = None,
) -> OracleResult:
    """Approximate a subdifferential from its definition.

    Fréchet: grid points passing every difference quotient test (n <= 2).
    Limiting: the Fréchet test at ``x`` and at kink points near ``x``
    together with gradients sampled on a small sphere (gradients only
    for n = 3). Clarke: grid points in the hull of the sampled gradients.
    """
    x = vector(x)
    n = len(x)
    if n > 3 or (kind is SubdiffKind.FRECHET and n > 2):
        raise ValueError(f"The oracle does not support n = {n} for {kind}.")
    if tolerance is None:
        tolerance = Configuration().oracle_tolerance
    candidates = _grid(n, radius, resolution)
    grid = np.array([to_floats(v) for v in candidates])
    accepted = np.zeros(len(candidates), dtype=bool)
    gradients: List[Vector] = []
    if kind is not SubdiffKind.FRECHET:
        if n <= 2:
            sphere_directions = _directions(n, directions)
        else:
            sphere_directions = [
                vector([a, b, c])
                for a in (-1, 0, 1)
                for b in (-1, 0, 1)
                for c in (-1, 0, 1)
                if (a, b, c) != (0, 0, 0)
            ]
        for y in _sphere(x, sphere_directions):
            g = _gradient(f, y)
            if g is not None and g not in gradients:
                gradients.append(g)
    if kind is SubdiffKind.CLARKE:
        if gradients:
            hull = geo.convex_hull(gradients)
            accepted = np.array([geo.contains(hull, v) for v in candidates])
    elif n <= 2:
        quotient_directions = _directions(n, directions)
        points = [x]
        if kind is SubdiffKind.LIMITING:
            points += _kinks(f, x, directions)
        for y in points:
            accepted |= _frechet_mask(
                f, y, grid, quotient_directions, tolerance
            )
        if kind is SubdiffKind.LIMITING:
            for g in gradients:
                gap = grid - np.array(to_floats(g))
                accepted |= np.linalg.norm(gap, axis=1) <= tolerance
    logger.debug(
        f"Oracle {kind.value} at {[str(q) for q in x]}: "
        f"{int(accepted.sum())} of {len(candidates)} grid points, "
        f"{len(gradients)} gradients."
    )
    return OracleResult(kind, x, resolution, candidates, accepted, gradients)


def compare_with_exact(result: OracleResult, exact: SubdiffSet) -> List[str]:
    """Return disagreements between the oracle and an exact set.

    Grid points inside the exact set must be accepted, accepted grid
    points must lie within the resolution of it, and sampled gradients
    must belong to it (limiting and Clarke).
    """
    problems = []
    pieces = exact.nonempty_pieces()
    limit = result.resolution**2
    for v, ok in zip(result.candidates, result.accepted):
        inside = exact.contains(v)
        if inside and not ok:
            problems.append(f"rejected {[str(q) for q in v]} inside the set")
        elif ok and not inside:
            if not pieces or geo.project_union(v, pieces).distance_sq >= limit:
                problems.append(f"accepted {[str(q) for q in v]} far outside")
    if result.kind is not SubdiffKind.FRECHET:
        for g in result.gradients:
            if exact.contains(g):
                continue
            if not pieces or geo.project_union(g, pieces).distance_sq >= limit:
                problems.append(f"gradient {[str(q) for q in g]} missing")
    return problems
