"""Generate random piecewise-affine fixtures.

A generated function is ``a0 . x + b0 + sum_j c_j max(0, a_j . x - b_j)``
over the arrangement of the hyperplanes ``a_j . x = b_j``: it is affine on
every chamber, continuous and finite everywhere. Optionally its domain is
restricted to a box, which makes it a lower semicontinuous function with
a proper domain.
"""

__all__ = ["FunctionGenerator", "random_corpus", "MAX_HYPERPLANES"]

import logging
from fractions import Fraction
from typing import List, Optional

import numpy as np

from subjetlab import exact_geometry as geo
from subjetlab.exact_geometry import Constraint, HPolyhedron
from subjetlab.kinds import Tier
from subjetlab.piecewise_model import Cell, PiecewiseFunction, Polynomial
from subjetlab.rational import Vector, add, is_zero, neg, scale

logger = logging.getLogger("subjetlab")

MAX_HYPERPLANES = 6
"""Largest arrangement the generator builds."""

MAX_DIMENSION = 3
"""Largest ambient dimension the generator builds."""


class FunctionGenerator:
    """Draw random piecewise-affine functions from a seeded stream.

    Parameters
    ----------
    seed : `int`
        Seed of the numpy generator.
    n : `int`
        Ambient dimension, at most 3.
    hyperplanes : `int`
        Number of hyperplanes of the arrangement, at most 6.
    box : `int`, optional
        When given, the domain is restricted to ``[-box, box]^n``.
    """

    logger = logger

    def __init__(
        self, seed: int, n: int, hyperplanes: int, box: Optional[int] = None
    ) -> None:
        if not 1 <= n <= MAX_DIMENSION:
            raise ValueError(
                f"Invalid dimension {n}. "
                f"Allowed values are 1 to {MAX_DIMENSION}."
            )
        if not 0 <= hyperplanes <= MAX_HYPERPLANES:
            raise ValueError(
                f"Invalid number of hyperplanes {hyperplanes}. "
                f"Allowed values are 0 to {MAX_HYPERPLANES}."
            )
        self._seed = seed
        self._n = n
        self._hyperplanes = hyperplanes
        self._box = box
        self._rng = np.random.default_rng(seed)

    def _integer(self, low: int, high: int) -> Fraction:
        return Fraction(int(self._rng.integers(low, high, endpoint=True)))

    def _normal(self) -> Vector:
        while True:
            a = tuple(self._integer(-2, 2) for _ in range(self._n))
            if not is_zero(a):
                return a

    def _arrangement(self) -> List[Constraint]:
        """Distinct hyperplanes ``a . x = b`` (no two equal up to scaling)."""
        planes: List[Constraint] = []
        for _ in range(1000):
            if len(planes) == self._hyperplanes:
                return planes
            a, b = self._normal(), self._integer(-2, 2)
            duplicate = any(
                geo.same_set(
                    HPolyhedron(self._n, (), ((a, b),)),
                    HPolyhedron(self._n, (), ((c, d),)),
                )
                for c, d in planes
            )
            if not duplicate:
                planes.append((a, b))
        if len(planes) < self._hyperplanes:
            raise ValueError(
                f"Cannot draw {self._hyperplanes} distinct hyperplanes in "
                f"R^{self._n}."
            )
        return planes

    def generate(self, name: Optional[str] = None) -> PiecewiseFunction:
        """Draw one function."""
        n = self._n
        planes = self._arrangement()
        base = tuple(self._integer(-2, 2) for _ in range(n))
        offset = self._integer(-2, 2)
        weights = [
            self._integer(1, 3) * (1 if self._rng.integers(0, 2) else -1)
            for _ in planes
        ]
        domain = HPolyhedron.whole_space(n)
        if self._box is not None:
            bound = Fraction(self._box)
            domain = HPolyhedron.box((-bound,) * n, (bound,) * n)
        cells = []
        for signs, _ in geo.chambers(planes, domain):
            rows = list(domain.inequalities)
            a0, b0 = base, offset
            for (a, b), s, c in zip(planes, signs, weights):
                if s > 0:
                    rows.append((neg(a), -b))
                    a0 = add(a0, scale(c, a))
                    b0 = b0 - c * b
                else:
                    rows.append((a, b))
            cells.append(
                Cell(HPolyhedron(n, tuple(rows)), Polynomial.affine(a0, b0))
            )
        name = name or f"random-n{n}-h{self._hyperplanes}-s{self._seed}"
        logger.debug(f"Generated '{name}' with {len(cells)} cells.")
        return PiecewiseFunction(name, n, Tier.AFFINE, tuple(cells))


def random_corpus(
    count: int, seed: int, hyperplanes: int = 3
) -> List[PiecewiseFunction]:
    """Return ``count`` seeded random functions cycling through n = 1, 2, 3.

    Every fourth function has a box domain.
    """
    functions = []
    for k in range(count):
        n = 1 + k % MAX_DIMENSION
        box = 2 if k % 4 == 3 else None
        generator = FunctionGenerator(
            seed + k, n, min(hyperplanes, MAX_HYPERPLANES), box
        )
        functions.append(generator.generate(f"random-{seed}-{k}"))
    return functions
