"""Hand-coded fixtures that bypass the polyhedral engine.

The only special fixture is ``disc_plus_point``: the indicator of the set
``S = {|x| < 1} U {(1, 0)}`` in the plane. ``S`` is not closed, so its
indicator is not lower semicontinuous, and the graph of its limiting
normal cone has a one-dimensional branch at ``(1, 0)``.
"""

__all__ = [
    "SpecialOracle",
    "DiscPlusPoint",
    "SPECIAL_ORACLES",
    "special_oracle",
]

import math
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple, Union

from subjetlab.exact_geometry import HPolyhedron, product
from subjetlab.kinds import SubdiffKind
from subjetlab.pieces import ParameterizedPiece, Piece, PolyhedralPiece
from subjetlab.rational import Vector, check_dim, norm_sq, vector, zeros

ExtendedValue = Union[Fraction, float]


class SpecialOracle(ABC):
    """Closed-form answers for a fixture the engine cannot represent."""

    name: str
    ambient_dim: int

    @abstractmethod
    def evaluate(self, x: Sequence[Fraction]) -> ExtendedValue:
        """Return the function value (``math.inf`` off the domain)."""

    @abstractmethod
    def subdifferential(
        self, x: Sequence[Fraction], kind: SubdiffKind
    ) -> List[HPolyhedron]:
        """Return the subdifferential at ``x`` as a union of polyhedra."""

    @abstractmethod
    def graph_pieces(self, kind: SubdiffKind) -> List[Piece]:
        """Return the pieces of the subdifferential graph."""

    @abstractmethod
    def is_domain_interior(self, x: Sequence[Fraction]) -> bool:
        """Whether ``x`` is an interior point of the domain."""

    @abstractmethod
    def lsc_violations(self) -> List[Tuple[str, Vector]]:
        """Return ``(message, witness)`` pairs for lsc failures."""


class DiscPlusPoint(SpecialOracle):
    """The indicator of the open unit disc with ``(1, 0)`` added."""

    name = "disc_plus_point"
    ambient_dim = 2

    corner: Vector = vector([1, 0])
    """The isolated boundary point added to the open disc."""

    def _in_disc(self, x: Sequence[Fraction]) -> bool:
        return norm_sq(x) < 1

    def evaluate(self, x: Sequence[Fraction]) -> ExtendedValue:
        check_dim(x, self.ambient_dim, "point")
        if self._in_disc(x) or tuple(x) == self.corner:
            return Fraction(0)
        return math.inf

    def is_domain_interior(self, x: Sequence[Fraction]) -> bool:
        check_dim(x, self.ambient_dim, "point")
        return self._in_disc(x)

    def _corner_ray(self) -> HPolyhedron:
        # R+ (1, 0): v1 >= 0, v2 = 0
        return HPolyhedron(
            2,
            ((vector([-1, 0]), Fraction(0)),),
            ((vector([0, 1]), Fraction(0)),),
        )

    def subdifferential(
        self, x: Sequence[Fraction], kind: SubdiffKind
    ) -> List[HPolyhedron]:
        check_dim(x, self.ambient_dim, "point")
        if kind is SubdiffKind.CLARKE:
            raise ValueError("The indicator of S is not Lipschitz.")
        if self._in_disc(x):
            return [HPolyhedron.point(zeros(2))]
        if tuple(x) == self.corner:
            return [self._corner_ray()]
        return []

    def graph_pieces(self, kind: SubdiffKind) -> List[Piece]:
        if kind is SubdiffKind.CLARKE:
            raise ValueError("The indicator of S is not Lipschitz.")

        def disc_closure(point: Sequence[Fraction]) -> bool:
            x, v = point[:2], point[2:]
            return norm_sq(x) <= 1 and all(q == 0 for q in v)

        half = Fraction(1, 2)
        disc = ParameterizedPiece(
            ambient_dim=4,
            certified_dimension=2,
            membership=disc_closure,
            label="disc x {0}",
            samples=[
                vector([0, 0, 0, 0]),
                vector([half, 0, 0, 0]),
                vector([1, 0, 0, 0]),
            ],
        )
        ray = PolyhedralPiece(
            product(HPolyhedron.point(self.corner), self._corner_ray()),
            label="{(1,0)} x R+(1,0)",
        )
        return [disc, ray]

    def lsc_violations(self) -> List[Tuple[str, Vector]]:
        witness = vector([0, 1])
        return [
            (
                "value +inf at a boundary point of the disc approached by "
                "points with value 0",
                witness,
            )
        ]


SPECIAL_ORACLES: Dict[str, SpecialOracle] = {
    DiscPlusPoint.name: DiscPlusPoint()
}


def special_oracle(name: str) -> SpecialOracle:
    """Return the special oracle registered as ``name``."""
    if name not in SPECIAL_ORACLES:
        raise ValueError(
            f"Invalid special oracle '{name}'. "
            f"Allowed values are: {', '.join(SPECIAL_ORACLES)}."
        )
    return SPECIAL_ORACLES[name]
