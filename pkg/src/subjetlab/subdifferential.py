"""Fréchet, limiting and Clarke subdifferentials and their graphs.

On the affine tier everything is exact. The function is refined to a
face-to-face complex; over the relative interior of each face ``F`` the
Fréchet subdifferential is the constant polyhedron

    P_F = intersection over cells C containing F of (grad f_C + N_C(F))

and the graphs are finite unions of products ``F x P_F``. On the
polynomial tier the same formulas are applied at declared points through
`subjetlab.strata`.
"""

__all__ = [
    "NotLipschitzError",
    "SubdiffSet",
    "SubjetPiece",
    "Face",
    "CellComplex",
    "cell_complex",
    "frechet_subdiff",
    "limiting_subdiff",
    "clarke_subdiff",
    "subdiff",
    "subjet_pieces",
    "pullback_graph",
    "sum_rule_check",
    "inclusion_chain",
    "clarke_equals_hull",
    "restrict_subjet",
]

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from subjetlab import exact_geometry as geo
from subjetlab.config import Configuration
from subjetlab.exact_geometry import HPolyhedron
from subjetlab.kinds import SubdiffKind, Tier
from subjetlab.pieces import PolyhedralPiece, UndeclaredPointError
from subjetlab.piecewise_model import (
    PiecewiseFunction,
    Polynomial,
    TierError,
    evaluate,
    function_sum,
    refine,
)
from subjetlab.rational import (
    DimensionMismatchError,
    Vector,
    check_dim,
    dot,
    format_vector,
    transpose,
    vector,
    zeros,
)
from subjetlab.special import special_oracle
from subjetlab.strata import (
    StratumPiece,
    clarke_set,
    frechet_set,
    stratum_pieces,
)

logger = logging.getLogger("subjetlab")

GraphPiece = Union["SubjetPiece", StratumPiece]


class NotLipschitzError(ValueError):
    """Raised when the Clarke subdifferential is requested where the
    function is not locally Lipschitz.
    """


@dataclass(frozen=True)
class SubdiffSet:
    """A subdifferential at a point as a finite union of polyhedra.

    Fréchet sets have exactly one polyhedron (possibly empty), Clarke sets
    one polytope, limiting sets any number of polyhedra.
    """

    kind: SubdiffKind
    point: Vector
    pieces: Tuple[HPolyhedron, ...]

    @property
    def ambient_dim(self) -> int:
        """Dimension of the space of subgradients."""
        return len(self.point)

    @property
    def is_empty(self) -> bool:
        """Whether the set is empty."""
        return not self.nonempty_pieces()

    def nonempty_pieces(self) -> List[HPolyhedron]:
        """The nonempty polyhedra of the union."""
        return [P for P in self.pieces if geo.feasible(P)]

    def contains(self, v: Sequence[Fraction]) -> bool:
        """Whether ``v`` belongs to the set."""
        check_dim(v, self.ambient_dim, "subgradient")
        return any(geo.contains(P, v) for P in self.nonempty_pieces())

    @property
    def dimension(self) -> int:
        """The largest dimension of a piece."""
        return max(
            (geo.dim(P) for P in self.pieces), default=geo.EMPTY_DIMENSION
        )

    def hull(self) -> HPolyhedron:
        """The closed convex hull of the union."""
        generators = [geo.v_representation(P) for P in self.nonempty_pieces()]
        return geo.from_generators(
            self.ambient_dim,
            [v for g in generators for v in g.vertices],
            [r for g in generators for r in g.rays],
            [v for g in generators for v in g.lines],
        )

    def to_dict(self) -> Dict[str, Any]:
        """Report form: H- and V-representations of every piece."""
        pieces = []
        for P in self.pieces:
            entry: Dict[str, Any] = {
                "dim": geo.dim(P),
                "ineqs": [
                    {"a": format_vector(a), "b": str(b)}
                    for a, b in P.inequalities
                ],
                "eqs": [
                    {"a": format_vector(a), "b": str(b)}
                    for a, b in P.equalities
                ],
            }
            if geo.feasible(P):
                generators = geo.v_representation(P)
                entry["vertices"] = [
                    format_vector(v) for v in generators.vertices
                ]
                entry["rays"] = [format_vector(r) for r in generators.rays]
                entry["lines"] = [format_vector(v) for v in generators.lines]
            pieces.append(entry)
        return {
            "kind": self.kind.value,
            "point": format_vector(self.point),
            "empty": self.is_empty,
            "pieces": pieces,
        }


@dataclass(frozen=True)
class SubjetPiece:
    """A piece ``base x subgrad`` of a subdifferential graph.

    With ``closure_flag`` the piece is ``cl F x P_F``; otherwise it is
    ``rel int F x P_F``.
    """

    base: HPolyhedron
    value: Polynomial
    subgrad: HPolyhedron
    closure_flag: bool

    @property
    def dimension(self) -> int:
        """``dim base + dim subgrad``."""
        return geo.dim(self.base) + geo.dim(self.subgrad)

    def graph_polyhedron(self) -> HPolyhedron:
        """The closure of the piece in ``R^n x R^n``."""
        return geo.product(self.base, self.subgrad)

    def contains(self, x: Sequence[Fraction], v: Sequence[Fraction]) -> bool:
        """Whether ``(x, v)`` belongs to the piece."""
        if not geo.contains(self.base, x) or not geo.contains(self.subgrad, v):
            return False
        if self.closure_flag:
            return True
        implicit = geo.implicit_equalities(self.base)
        return all(
            dot(a, x) < b
            for i, (a, b) in enumerate(self.base.inequalities)
            if i not in implicit
        )

    def to_piece(self, label: str = "") -> PolyhedralPiece:
        """Return the closure of the piece as a member of a `PieceUnion`."""
        return PolyhedralPiece(self.graph_polyhedron(), label)


@dataclass(frozen=True)
class Face:
    """A face of a refined cell complex."""

    polyhedron: HPolyhedron
    relint: Vector
    dimension: int
    cells: Tuple[int, ...]
    """Indices of the refined cells containing the face."""


class CellComplex:
    """The face-to-face refinement of an affine-tier function and its
    faces.
    """

    def __init__(self, f: PiecewiseFunction) -> None:
        self.function = refine(f)
        self.faces = self._collect()
        logger.debug(
            f"Complex of '{f.name}': {len(self.function.cells)} cells, "
            f"{len(self.faces)} faces."
        )

    def _collect(self) -> List[Face]:
        collected: List[Face] = []
        for cell in self.function.cells:
            for face in geo.faces(cell.region):
                d = geo.dim(face)
                if any(
                    F.dimension == d and geo.same_set(F.polyhedron, face)
                    for F in collected
                ):
                    continue
                relint = geo.relative_interior_point(face)
                cells = tuple(
                    i
                    for i, c in enumerate(self.function.cells)
                    if geo.contains(c.region, relint)
                )
                collected.append(Face(face, relint, d, cells))
        return collected

    def faces_containing(self, x: Sequence[Fraction]) -> List[Face]:
        """Faces whose closure contains ``x``."""
        return [F for F in self.faces if geo.contains(F.polyhedron, x)]

    def face_subgradients(self, face: Face) -> HPolyhedron:
        """The Fréchet subdifferential on the relative interior of a face."""
        cells = [self.function.cells[i] for i in face.cells]
        return frechet_set(cells, face.relint)

    def face_clarke(self, face: Face) -> HPolyhedron:
        """Convex hull of the gradients of full-dimensional cells at a face."""
        n = self.function.ambient_dim
        cells = [
            self.function.cells[i]
            for i in face.cells
            if geo.dim(self.function.cells[i].region) == n
        ]
        return clarke_set(cells, face.relint)

    def value_on(self, face: Face) -> Polynomial:
        """The formula of the first cell containing a face."""
        return self.function.cells[face.cells[0]].formula


@lru_cache(maxsize=32)
def cell_complex(f: PiecewiseFunction) -> CellComplex:
    """Return the (cached) cell complex of an affine-tier function."""
    return CellComplex(f)


def _prune(polyhedra: Sequence[HPolyhedron]) -> Tuple[HPolyhedron, ...]:
    """Drop empty polyhedra and those contained in another one."""
    nonempty = [P for P in polyhedra if geo.feasible(P)]
    kept = []
    for i, P in enumerate(nonempty):
        redundant = any(
            geo.includes(Q, P) and (not geo.includes(P, Q) or j < i)
            for j, Q in enumerate(nonempty)
            if j != i
        )
        if not redundant:
            kept.append(P)
    return tuple(kept)


def _check_query(f: PiecewiseFunction, x: Sequence[Fraction]) -> Vector:
    check_dim(x, f.ambient_dim, "point")
    x = vector(x)
    if (
        f.tier is Tier.POLYNOMIAL
        and not f.special_oracle
        and x not in f.declared_points()
    ):
        raise UndeclaredPointError(
            f"'{f.name}' declares no adjacency at {format_vector(x)}."
        )
    return x


def _strata_settings() -> Tuple[int, Tuple[int, ...]]:
    config = Configuration()
    return config.curve_depth, tuple(config.curve_exponents)


def frechet_subdiff(
    f: PiecewiseFunction, x: Sequence[Fraction]
) -> SubdiffSet:
    """Return the Fréchet subdifferential of ``f`` at ``x``.

    Outside the domain the result is the empty polyhedron.

    Raises
    ------
    UndeclaredPointError
        Raised on the polynomial tier at points without declared adjacency.
    """
    x = _check_query(f, x)
    if f.special_oracle:
        pieces = special_oracle(f.special_oracle).subdifferential(
            x, SubdiffKind.FRECHET
        )
        return SubdiffSet(
            SubdiffKind.FRECHET,
            x,
            tuple(pieces) or (HPolyhedron.empty(f.ambient_dim),),
        )
    cells = [f.cells[i] for i in f.cells_containing(x)]
    return SubdiffSet(SubdiffKind.FRECHET, x, (frechet_set(cells, x),))


def limiting_subdiff(
    f: PiecewiseFunction, x: Sequence[Fraction]
) -> SubdiffSet:
    """Return the limiting subdifferential of ``f`` at ``x``.

    On the affine tier it is the union of ``P_F`` over the faces ``F``
    whose closure contains ``x``. Pieces contained in another piece are
    dropped.
    """
    x = _check_query(f, x)
    if f.special_oracle:
        pieces = special_oracle(f.special_oracle).subdifferential(
            x, SubdiffKind.LIMITING
        )
        return SubdiffSet(SubdiffKind.LIMITING, x, tuple(pieces))
    if evaluate(f, x) == math.inf:
        return SubdiffSet(SubdiffKind.LIMITING, x, ())
    if f.tier is Tier.AFFINE:
        complex_ = cell_complex(f)
        polyhedra = [
            complex_.face_subgradients(F) for F in complex_.faces_containing(x)
        ]
    else:
        depth, exponents = _strata_settings()
        polyhedra = []
        for piece in stratum_pieces(
            f, x, SubdiffKind.LIMITING, depth, exponents
        ):
            anchor_set = piece.anchor_set()
            if anchor_set is not None:
                polyhedra.append(anchor_set)
    return SubdiffSet(SubdiffKind.LIMITING, x, _prune(polyhedra))


def _require_lipschitz(f: PiecewiseFunction, x: Vector) -> None:
    if f.special_oracle:
        raise NotLipschitzError(f"'{f.name}' is not locally Lipschitz.")
    if not geo.is_interior_point(x, f.regions):
        raise NotLipschitzError(
            f"'{f.name}' is not locally Lipschitz at {format_vector(x)}: "
            "the point is not interior to the domain."
        )


def clarke_subdiff(
    f: PiecewiseFunction, x: Sequence[Fraction]
) -> SubdiffSet:
    """Return the Clarke subdifferential of ``f`` at ``x``.

    It is the convex hull of the gradients of the full-dimensional cells
    containing ``x``.

    Raises
    ------
    NotLipschitzError
        Raised when ``x`` is not interior to the domain of ``f``.
    """
    x = _check_query(f, x)
    _require_lipschitz(f, x)
    n = f.ambient_dim
    cells = [
        f.cells[i]
        for i in f.cells_containing(x)
        if f.tier is Tier.POLYNOMIAL or geo.dim(f.cells[i].region) == n
    ]
    return SubdiffSet(SubdiffKind.CLARKE, x, (clarke_set(cells, x),))


def subdiff(
    f: PiecewiseFunction, x: Sequence[Fraction], kind: SubdiffKind
) -> SubdiffSet:
    """Dispatch to the subdifferential of the given kind."""
    if kind is SubdiffKind.FRECHET:
        return frechet_subdiff(f, x)
    if kind is SubdiffKind.LIMITING:
        return limiting_subdiff(f, x)
    return clarke_subdiff(f, x)


def _affine_subjet(
    f: PiecewiseFunction, kind: SubdiffKind
) -> List[SubjetPiece]:
    complex_ = cell_complex(f)
    if kind is SubdiffKind.CLARKE and not geo.covered_by(
        HPolyhedron.whole_space(f.ambient_dim), f.regions
    ):
        raise NotLipschitzError(
            f"'{f.name}' has a proper domain; its Clarke graph is not "
            "defined everywhere."
        )
    pieces = []
    for face in complex_.faces:
        if kind is SubdiffKind.CLARKE:
            subgrad = complex_.face_clarke(face)
        else:
            subgrad = complex_.face_subgradients(face)
        if not geo.feasible(subgrad):
            continue
        pieces.append(
            SubjetPiece(
                face.polyhedron,
                complex_.value_on(face),
                subgrad,
                kind is not SubdiffKind.FRECHET,
            )
        )
    if kind is SubdiffKind.FRECHET:
        return pieces
    return _prune_pieces(pieces)


def _prune_pieces(pieces: Sequence[SubjetPiece]) -> List[SubjetPiece]:
    graphs = [p.graph_polyhedron() for p in pieces]
    kept = _prune(graphs)
    return [p for p, G in zip(pieces, graphs) if any(G is K for K in kept)]


def subjet_pieces(
    f: PiecewiseFunction, kind: SubdiffKind
) -> List[GraphPiece]:
    """Return finitely many pieces whose union is the graph of ``kind``.

    Affine tier: products of faces and constant subgradient polyhedra;
    limiting and Clarke pieces are closed and pruned. Polynomial tier:
    stratum pieces around every declared point.

    Raises
    ------
    TierError
        Raised for hand-coded fixtures, whose graphs come from their oracle.
    """
    if f.special_oracle:
        raise TierError(
            f"'{f.name}' is hand-coded; use its oracle's graph pieces."
        )
    if f.tier is Tier.AFFINE:
        pieces: List[GraphPiece] = list(_affine_subjet(f, kind))
    else:
        depth, exponents = _strata_settings()
        pieces = []
        for p in f.declared_points():
            if kind is SubdiffKind.CLARKE:
                _require_lipschitz(f, p)
            pieces.extend(stratum_pieces(f, p, kind, depth, exponents))
    logger.info(
        f"Graph of the {kind.value} subdifferential of '{f.name}': "
        f"{len(pieces)} pieces."
    )
    return pieces


def pullback_graph(
    g: PiecewiseFunction,
    matrix: Sequence[Sequence[Fraction]],
    offset: Optional[Sequence[Fraction]] = None,
) -> List[SubjetPiece]:
    """Return pieces of the graph of ``x -> A^T dg(A x + c)``.

    Each limiting piece ``F x P`` of ``g`` is pulled back to
    ``A^-1(F - c) x A^T P``; empty and redundant pieces are dropped.

    Raises
    ------
    DimensionMismatchError
        Raised when the shapes of ``A`` and ``c`` do not match ``g``.
    """
    m = g.ambient_dim
    if len(matrix) != m:
        raise DimensionMismatchError(
            f"Matrix has {len(matrix)} rows, expected {m}."
        )
    n = len(matrix[0]) if matrix else 0
    for row in matrix:
        check_dim(row, n, "matrix row")
    c = vector(offset) if offset is not None else zeros(m)
    check_dim(c, m, "offset")
    if g.tier is not Tier.AFFINE or g.special_oracle:
        raise TierError("pullback_graph supports the affine tier only.")
    at = transpose(matrix, n)
    pieces = []
    for piece in _affine_subjet(g, SubdiffKind.LIMITING):
        base = geo.preimage(piece.base, matrix, c)
        if not geo.feasible(base):
            continue
        pieces.append(
            SubjetPiece(
                base,
                piece.value.compose_affine(matrix, c),
                geo.linear_image(piece.subgrad, at),
                True,
            )
        )
    return _prune_pieces(pieces)


def _minkowski_cover(
    target: SubdiffSet, left: SubdiffSet, right: SubdiffSet
) -> bool:
    sums = [
        geo.minkowski_sum(P, Q)
        for P in left.nonempty_pieces()
        for Q in right.nonempty_pieces()
    ]
    return all(geo.covered_by(P, sums) for P in target.nonempty_pieces())


def sum_rule_check(
    f1: PiecewiseFunction, f2: PiecewiseFunction, x: Sequence[Fraction]
) -> bool:
    """Check ``d(f1 + f2)(x)`` is included in ``df1(x) + df2(x)``.

    ``f1`` must be locally Lipschitz at ``x``.
    """
    x = vector(x)
    _require_lipschitz(f1, x)
    total = limiting_subdiff(function_sum(f1, f2), x)
    result = _minkowski_cover(
        total, limiting_subdiff(f1, x), limiting_subdiff(f2, x)
    )
    logger.debug(
        f"Sum rule for '{f1.name}' + '{f2.name}' at {format_vector(x)}: "
        f"{result}."
    )
    return result


def inclusion_chain(
    f: PiecewiseFunction, x: Sequence[Fraction]
) -> Dict[str, bool]:
    """Check the inclusions Fréchet in limiting in Clarke at ``x``.

    The Clarke inclusion is only checked where ``f`` is locally
    Lipschitz.
    """
    frechet = frechet_subdiff(f, x)
    limiting = limiting_subdiff(f, x)
    limiting_pieces = limiting.nonempty_pieces()
    result = {
        "frechet_in_limiting": all(
            geo.covered_by(P, limiting_pieces)
            for P in frechet.nonempty_pieces()
        )
    }
    try:
        clarke = clarke_subdiff(f, x)
    except NotLipschitzError:
        return result
    (hull,) = clarke.pieces
    result["limiting_in_clarke"] = all(
        geo.includes(hull, P) for P in limiting_pieces
    )
    return result


def clarke_equals_hull(f: PiecewiseFunction, x: Sequence[Fraction]) -> bool:
    """Whether the Clarke set equals the convex hull of the limiting set."""
    (clarke,) = clarke_subdiff(f, x).pieces
    return geo.same_set(clarke, limiting_subdiff(f, x).hull())


def restrict_subjet(
    pieces: Sequence[SubjetPiece], M: HPolyhedron
) -> List[SubjetPiece]:
    """Return the pieces with their bases intersected with ``M``."""
    restricted = []
    for piece in pieces:
        base = geo.intersect(piece.base, M)
        if geo.feasible(base):
            restricted.append(
                SubjetPiece(
                    base, piece.value, piece.subgrad, piece.closure_flag
                )
            )
    return restricted

