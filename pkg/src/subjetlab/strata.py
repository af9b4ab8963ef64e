"""Local normal data and strata near declared points.

On the polynomial tier a point ``p`` with declared adjacency is examined
through its *local patterns*: the set of cells containing a nearby point
together with the linear constraints and sign conditions tight there.
Patterns are discovered along monomial witness curves
``p + (u_1 t^a_1, ..., u_n t^a_n)`` and along rays toward declared
witnesses; every pattern seen constantly along a curve is a stratum.

Subdifferentials over a stratum are computed exactly at the rational
witness points. Their limits at ``p`` are obtained by evaluating the
gradients of the formulas and of the tight sign conditions at ``p``.
"""

__all__ = [
    "DegenerateConstraintError",
    "LocalPattern",
    "Stratum",
    "StratumPiece",
    "normal_cone_at",
    "frechet_set",
    "clarke_set",
    "local_pattern",
    "witness_curves",
    "strata_at",
    "stratum_pieces",
]

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import FrozenSet, List, Optional, Sequence, Tuple

from subjetlab import exact_geometry as geo
from subjetlab.exact_geometry import HPolyhedron
from subjetlab.kinds import SubdiffKind
from subjetlab.pieces import (
    ParameterizedPiece,
    Piece,
    PolyhedralPiece,
    UndeclaredPointError,
)
from subjetlab.piecewise_model import Cell, PiecewiseFunction
from subjetlab.rational import (
    Vector,
    add,
    dot,
    is_zero,
    rank,
    scale,
    sub,
)

logger = logging.getLogger("subjetlab")

WitnessCurve = Tuple[Vector, ...]


class DegenerateConstraintError(ValueError):
    """Raised when a tight sign condition has a vanishing gradient, so its
    normal cone is not given by linearization.
    """


def _normal_generators(
    cell: Cell, x: Sequence[Fraction], gradient_point: Sequence[Fraction]
) -> Tuple[List[Vector], List[Vector]]:
    rays = [a for a, b in cell.region.inequalities if dot(a, x) == b]
    for q in cell.sign:
        if q.evaluate(x) == 0:
            g = q.gradient(gradient_point)
            if is_zero(g):
                raise DegenerateConstraintError(
                    "Sign condition with zero gradient at "
                    f"{[str(c) for c in gradient_point]}."
                )
            rays.append(g)
    lines = [a for a, _ in cell.region.equalities]
    return rays, lines


def normal_cone_at(
    cell: Cell,
    x: Sequence[Fraction],
    gradient_point: Optional[Sequence[Fraction]] = None,
) -> HPolyhedron:
    """Return the normal cone of a cell at ``x``.

    The cone is generated by the constraints tight at ``x``; gradients of
    sign conditions are taken at ``gradient_point`` (default ``x``).
    """
    point = x if gradient_point is None else gradient_point
    rays, lines = _normal_generators(cell, x, point)
    return geo.cone_from_generators(cell.ambient_dim, rays, lines)


def frechet_set(
    cells: Sequence[Cell],
    x: Sequence[Fraction],
    gradient_point: Optional[Sequence[Fraction]] = None,
) -> HPolyhedron:
    """Return ``intersection over cells of grad f_C + N_C(x)``.

    With ``gradient_point`` the tight constraints are read at ``x`` and
    every gradient is evaluated at ``gradient_point``.
    """
    n = len(x)
    if not cells:
        return HPolyhedron.empty(n)
    point = x if gradient_point is None else gradient_point
    result = HPolyhedron.whole_space(n)
    for cell in cells:
        translated = geo.minkowski_translate(
            cell.formula.gradient(point), normal_cone_at(cell, x, point)
        )
        result = geo.intersect(result, translated)
    return result


def clarke_set(cells: Sequence[Cell], x: Sequence[Fraction]) -> HPolyhedron:
    """Return the convex hull of the cell gradients at ``x``."""
    if not cells:
        return HPolyhedron.empty(len(x))
    gradients = sorted({cell.formula.gradient(x) for cell in cells})
    return geo.convex_hull(gradients)


@dataclass(frozen=True)
class LocalPattern:
    """Active cells at a point and the constraints tight there."""

    cells: Tuple[int, ...]
    linear: Tuple[FrozenSet[int], ...]
    sign: Tuple[FrozenSet[int], ...]


def local_pattern(
    f: PiecewiseFunction, x: Sequence[Fraction]
) -> LocalPattern:
    """Return the local pattern of ``f`` at ``x``."""
    cells = tuple(f.cells_containing(x))
    linear = []
    sign = []
    for i in cells:
        cell = f.cells[i]
        linear.append(
            frozenset(
                k
                for k, (a, b) in enumerate(cell.region.inequalities)
                if dot(a, x) == b
            )
        )
        sign.append(
            frozenset(k for k, q in enumerate(cell.sign) if q.evaluate(x) == 0)
        )
    return LocalPattern(cells, tuple(linear), tuple(sign))


@dataclass(frozen=True)
class Stratum:
    """A local pattern realized along a witness curve converging to
    ``anchor``.
    """

    anchor: Vector
    pattern: LocalPattern
    samples: WitnessCurve
    dimension: int

    @property
    def witness(self) -> Vector:
        """The middle sample of the witness curve."""
        return self.samples[len(self.samples) // 2]

    def cells(self, f: PiecewiseFunction) -> List[Cell]:
        """The active cells of the pattern."""
        return [f.cells[i] for i in self.pattern.cells]


def _stratum_dimension(
    f: PiecewiseFunction, pattern: LocalPattern, q: Vector
) -> int:
    rows: List[Vector] = []
    for i, linear, sign in zip(pattern.cells, pattern.linear, pattern.sign):
        cell = f.cells[i]
        rows.extend(cell.region.inequalities[k][0] for k in linear)
        rows.extend(a for a, _ in cell.region.equalities)
        rows.extend(cell.sign[k].gradient(q) for k in sign)
    return f.ambient_dim - rank(rows, f.ambient_dim)


def witness_curves(
    f: PiecewiseFunction,
    p: Sequence[Fraction],
    depth: int = 8,
    exponents: Sequence[int] = (1, 2, 3),
) -> List[WitnessCurve]:
    """Return sampled curves converging to ``p``.

    Each curve is sampled at ``t = 2**-k`` for three consecutive levels
    starting at ``depth``.
    """
    n = f.ambient_dim
    levels = [Fraction(1, 2**k) for k in range(depth, depth + 3)]
    curves: List[WitnessCurve] = []
    seen = set()
    for signs in itertools.product((-1, 0, 1), repeat=n):
        if not any(signs):
            continue
        for powers in itertools.product(exponents, repeat=n):
            key = tuple(e if s else 0 for s, e in zip(signs, powers))
            if (signs, key) in seen:
                continue
            seen.add((signs, key))
            curves.append(
                tuple(
                    tuple(
                        p[i] + s * t**e
                        for i, (s, e) in enumerate(zip(signs, powers))
                    )
                    for t in levels
                )
            )
    directions = []
    for cell in f.cells:
        declaration = cell.adjacency_at(p)
        if declaration is not None:
            directions.extend(sub(w, p) for w in declaration.witness_seq)
        if geo.feasible(cell.region):
            directions.append(sub(geo.relative_interior_point(cell.region), p))
    for d in directions:
        if not is_zero(d):
            curves.append(tuple(add(p, scale(t, d)) for t in levels))
    return curves


@lru_cache(maxsize=64)
def _strata_at(
    f: PiecewiseFunction,
    p: Vector,
    depth: int,
    exponents: Tuple[int, ...],
) -> Tuple[Stratum, ...]:
    strata: List[Stratum] = []
    seen = set()
    for curve in witness_curves(f, p, depth, exponents):
        patterns = {local_pattern(f, q) for q in curve}
        if len(patterns) != 1:
            continue
        pattern = patterns.pop()
        if not pattern.cells or pattern in seen:
            continue
        seen.add(pattern)
        middle = curve[len(curve) // 2]
        strata.append(
            Stratum(p, pattern, curve, _stratum_dimension(f, pattern, middle))
        )
    logger.debug(
        f"Found {len(strata)} strata of '{f.name}' at "
        f"{[str(c) for c in p]}."
    )
    return tuple(strata)


def strata_at(
    f: PiecewiseFunction,
    p: Sequence[Fraction],
    depth: int = 8,
    exponents: Sequence[int] = (1, 2, 3),
) -> List[Stratum]:
    """Return the strata of ``f`` discovered near ``p``."""
    return list(_strata_at(f, tuple(p), depth, tuple(exponents)))


@dataclass
class StratumPiece:
    """A piece of a subdifferential graph near a declared point.

    Over a stratum the fiber is known exactly at the witness samples and
    ``limit`` is the set attached at the anchor by closure. With no
    stratum the piece is ``{anchor} x fiber``.
    """

    kind: SubdiffKind
    anchor: Vector
    stratum: Optional[Stratum]
    fibers: Tuple[HPolyhedron, ...]
    limit: Optional[HPolyhedron]
    closure_flag: bool

    def __post_init__(self) -> None:
        self.base_dim = 0 if self.stratum is None else self.stratum.dimension
        middle = self.fibers[len(self.fibers) // 2]
        self.fiber_dim = geo.dim(middle)

    @property
    def dimension(self) -> int:
        """Dimension of the piece: stratum plus fiber."""
        return self.base_dim + self.fiber_dim

    @property
    def is_empty(self) -> bool:
        """Whether the fibers are empty."""
        return self.fiber_dim == geo.EMPTY_DIMENSION

    def closure_contains(
        self, x: Sequence[Fraction], v: Sequence[Fraction]
    ) -> bool:
        """Whether ``(x, v)`` lies in the closure of the piece.

        Raises
        ------
        UndeclaredPointError
            Raised for base points other than the anchor and the witness
            samples, or at the anchor when the limit is degenerate.
        """
        x = tuple(x)
        if self.stratum is None:
            if x != self.anchor:
                raise UndeclaredPointError(
                    f"No exact data at {[str(c) for c in x]}."
                )
            return geo.contains(self.fibers[0], v)
        if x == self.anchor:
            if self.limit is None:
                raise UndeclaredPointError(
                    "Degenerate limit at the anchor point."
                )
            return geo.contains(self.limit, v)
        if x in self.stratum.samples:
            fiber = self.fibers[self.stratum.samples.index(x)]
            return geo.contains(fiber, v)
        raise UndeclaredPointError(f"No exact data at {[str(c) for c in x]}.")

    def anchor_set(self) -> Optional[HPolyhedron]:
        """The set this piece contributes over the anchor."""
        return self.fibers[0] if self.stratum is None else self.limit

    def test_points(self) -> List[Vector]:
        """Graph points over the anchor: vertices and face interiors."""
        if self.stratum is not None and not self.closure_flag:
            return []
        fiber = self.anchor_set()
        if fiber is None or not geo.feasible(fiber):
            return []
        points = list(geo.v_representation(fiber).vertices)
        points.extend(
            geo.relative_interior_point(face) for face in geo.faces(fiber)
        )
        return [self.anchor + v for v in dict.fromkeys(points)]

    def to_piece(self, label: str = "") -> Piece:
        """Return the piece as a member of a `PieceUnion`.

        The piece over the anchor itself is polyhedral.
        """
        n = len(self.anchor)
        if self.stratum is None:
            base = HPolyhedron.point(self.anchor)
            return PolyhedralPiece(geo.product(base, self.fibers[0]), label)

        def membership(point: Sequence[Fraction]) -> bool:
            return self.closure_contains(point[:n], point[n:])

        return ParameterizedPiece(
            ambient_dim=2 * n,
            certified_dimension=self.dimension,
            membership=membership,
            label=label,
            samples=self.test_points(),
        )


def _fiber(
    kind: SubdiffKind,
    cells: Sequence[Cell],
    x: Sequence[Fraction],
) -> HPolyhedron:
    if kind is SubdiffKind.CLARKE:
        return clarke_set(cells, x)
    return frechet_set(cells, x)


def stratum_pieces(
    f: PiecewiseFunction,
    p: Sequence[Fraction],
    kind: SubdiffKind,
    depth: int = 8,
    exponents: Sequence[int] = (1, 2, 3),
) -> List[StratumPiece]:
    """Return the graph pieces of ``kind`` near the declared point ``p``.

    The first piece lies over ``p`` itself; the others lie over the
    strata of ``p``. Pieces with empty fibers are dropped.
    """
    p = tuple(p)
    closure_flag = kind is not SubdiffKind.FRECHET
    point_cells = [f.cells[i] for i in f.cells_containing(p)]
    pieces = [
        StratumPiece(
            kind, p, None, (_fiber(kind, point_cells, p),), None, closure_flag
        )
    ]
    for stratum in strata_at(f, p, depth, exponents):
        cells = stratum.cells(f)
        try:
            fibers = tuple(_fiber(kind, cells, q) for q in stratum.samples)
        except DegenerateConstraintError as e:
            logger.warning(f"Skipping a stratum of '{f.name}': {e}")
            continue
        limit: Optional[HPolyhedron]
        try:
            if kind is SubdiffKind.CLARKE:
                limit = clarke_set(cells, p)
            else:
                limit = frechet_set(cells, stratum.witness, p)
        except DegenerateConstraintError as e:
            logger.warning(
                f"Skipping the limit of a stratum of '{f.name}': {e}"
            )
            limit = None
        piece = StratumPiece(kind, p, stratum, fibers, limit, closure_flag)
        if not piece.is_empty:
            pieces.append(piece)
    return [piece for piece in pieces if not piece.is_empty]
