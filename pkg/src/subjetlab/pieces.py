"""Piece decompositions of subsets of a Euclidean space.

A `PieceUnion` is a finite union of pieces, each carrying a certified
dimension and a closure membership test. Polyhedral pieces answer both
exactly; parameterized pieces (polynomial tier and hand-coded oracles)
carry a dimension certified elsewhere and answer closure membership only
where their construction allows it.
"""

__all__ = [
    "Piece",
    "PolyhedralPiece",
    "ParameterizedPiece",
    "PieceUnion",
    "UndeclaredPointError",
]

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

from subjetlab.exact_geometry import (
    HPolyhedron,
    contains,
    dim,
    feasible,
    relative_interior_point,
    v_representation,
)
from subjetlab.rational import Vector, check_dim


class UndeclaredPointError(ValueError):
    """Raised when a parameterized piece is queried at a point where its
    closure is not known exactly.
    """


class Piece(ABC):
    """A piece of a decomposition with a certified dimension."""

    label: str
    """Human readable identifier used in reports."""

    ambient_dim: int
    """Dimension of the ambient space."""

    @property
    @abstractmethod
    def dimension(self) -> int:
        """The certified dimension of the piece."""

    @abstractmethod
    def closure_contains(self, point: Sequence[Fraction]) -> bool:
        """Whether ``point`` lies in the closure of the piece."""

    def test_points(self) -> List[Vector]:
        """Points of the piece's closure used by covering test sets."""
        return []

    @property
    def polyhedron(self) -> Optional[HPolyhedron]:
        """The piece's closure as a polyhedron, when it is one."""
        return None


@dataclass
class PolyhedralPiece(Piece):
    """A polyhedron (its own closure)."""

    closure: HPolyhedron
    label: str = ""

    def __post_init__(self) -> None:
        self.ambient_dim = self.closure.ambient_dim
        self._dimension: Optional[int] = None

    @property
    def dimension(self) -> int:
        if self._dimension is None:
            self._dimension = dim(self.closure)
        return self._dimension

    def closure_contains(self, point: Sequence[Fraction]) -> bool:
        check_dim(point, self.ambient_dim, "point")
        return contains(self.closure, point)

    def test_points(self) -> List[Vector]:
        if not feasible(self.closure):
            return []
        generators = v_representation(self.closure)
        return list(generators.vertices) + [
            relative_interior_point(self.closure)
        ]

    @property
    def polyhedron(self) -> Optional[HPolyhedron]:
        return self.closure


@dataclass
class ParameterizedPiece(Piece):
    """A piece known through a membership oracle and a certified dimension.

    ``membership`` answers closure membership; it raises
    `UndeclaredPointError` where the closure is not known exactly.
    """

    ambient_dim: int
    certified_dimension: int
    membership: Callable[[Sequence[Fraction]], bool]
    label: str = ""
    samples: List[Vector] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return self.certified_dimension

    def closure_contains(self, point: Sequence[Fraction]) -> bool:
        check_dim(point, self.ambient_dim, "point")
        return self.membership(point)

    def test_points(self) -> List[Vector]:
        return list(self.samples)


@dataclass
class PieceUnion:
    """A finite union of pieces in ``R^ambient_dim``."""

    ambient_dim: int
    pieces: List[Piece] = field(default_factory=list)

    def __iter__(self) -> Iterator[Piece]:
        return iter(self.pieces)

    def __len__(self) -> int:
        return len(self.pieces)

    def add(self, piece: Piece) -> None:
        """Append a piece, checking its ambient dimension."""
        if piece.ambient_dim != self.ambient_dim:
            raise ValueError(
                f"Piece '{piece.label}' lives in R^{piece.ambient_dim}, "
                f"expected R^{self.ambient_dim}."
            )
        self.pieces.append(piece)

    def labelled(self) -> List[Tuple[int, Piece]]:
        """Return ``(index, piece)`` pairs."""
        return list(enumerate(self.pieces))
