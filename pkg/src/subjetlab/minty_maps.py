"""The map ``(x, v) -> A x + v`` on subdifferential graphs.

For a piecewise-affine function the graph is a finite union of
polyhedra in ``R^n x R^n`` and the map is linear, so injectivity on a
piece, preimages of a target and the local diffeomorphism property are
all decided by exact rank computations and linear programs.
"""

__all__ = [
    "MintyMap",
    "PieceRank",
    "PieceOutcome",
    "Preimage",
    "MintyCertificate",
    "GenericSample",
    "injective_on_piece",
    "finite_to_one",
    "piece_preimage",
    "preimage",
    "dense_local_diffeo",
    "dimension_preserved",
    "hypothesis_failures",
    "graph_polyhedra",
    "random_matrix",
    "sample_generic",
]

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from subjetlab import exact_geometry as geo
from subjetlab.config import Configuration
from subjetlab.dimension_lab import covering_test_points, local_dim
from subjetlab.exact_geometry import HPolyhedron
from subjetlab.piecewise_model import TierError
from subjetlab.pieces import Piece, PieceUnion
from subjetlab.rational import (
    DimensionMismatchError,
    Matrix,
    Vector,
    add,
    check_dim,
    format_vector,
    mat_vec,
    rank,
    unit,
    vector,
)

logger = logging.getLogger("subjetlab")

PieceLike = Union[Piece, HPolyhedron]


@dataclass(frozen=True)
class MintyMap:
    """The linear map ``(x, v) -> A x + v`` for a square matrix ``A``."""

    matrix: Matrix

    def __post_init__(self) -> None:
        n = len(self.matrix)
        for row in self.matrix:
            check_dim(row, n, "matrix row")

    @classmethod
    def of(cls, rows: Sequence[Sequence[Fraction]]) -> "MintyMap":
        """Build the map from any nested sequence of rationals."""
        return cls(tuple(vector(row) for row in rows))

    @property
    def n(self) -> int:
        """Size n of the square matrix."""
        return len(self.matrix)

    @property
    def block(self) -> Matrix:
        """The rows of ``[A I]``."""
        return tuple(
            row + unit(self.n, i) for i, row in enumerate(self.matrix)
        )

    def apply(self, point: Sequence[Fraction]) -> Vector:
        """Return ``A x + v`` for ``point = (x, v)``."""
        check_dim(point, 2 * self.n, "graph point")
        return add(mat_vec(self.matrix, point[: self.n]), point[self.n :])

    def image(self, P: HPolyhedron) -> HPolyhedron:
        """Return the image of a polyhedron of ``R^n x R^n``."""
        return geo.linear_image(P, self.block)

    def to_list(self) -> List[List[str]]:
        """Return the matrix rows as rational strings."""
        return [format_vector(row) for row in self.matrix]


def _polyhedron(piece: PieceLike) -> HPolyhedron:
    if isinstance(piece, HPolyhedron):
        return piece
    if piece.polyhedron is None:
        raise TierError(
            f"Piece '{piece.label}' is not polyhedral; the Minty analysis "
            "needs the affine tier."
        )
    return piece.polyhedron


def _check_space(A: MintyMap, P: HPolyhedron) -> None:
    if P.ambient_dim != 2 * A.n:
        raise DimensionMismatchError(
            f"A {A.n}x{A.n} matrix acts on R^{2 * A.n}, "
            f"the piece lives in R^{P.ambient_dim}."
        )


def _image_rank(A: MintyMap, P: HPolyhedron) -> int:
    directions = geo.direction_basis(P)
    images = [mat_vec(A.block, d) for d in directions]
    return rank(images, A.n)


def injective_on_piece(A: MintyMap, piece: PieceLike) -> bool:
    """Whether ``ker [A I]`` meets the direction space of the piece only
    in zero.
    """
    P = _polyhedron(piece)
    _check_space(A, P)
    if not geo.feasible(P):
        return True
    return _image_rank(A, P) == geo.dim(P)


def dimension_preserved(A: MintyMap, piece: PieceLike) -> bool:
    """Whether the image of the piece has the piece's dimension."""
    P = _polyhedron(piece)
    _check_space(A, P)
    return geo.dim(A.image(P)) == geo.dim(P)


@dataclass(frozen=True)
class PieceRank:
    """Rank data of the map restricted to one piece."""

    piece: int
    dimension: int
    image_rank: int

    @property
    def kernel_dim(self) -> int:
        """Dimension of ``ker [A I]`` intersected with the piece's
        direction space.
        """
        return max(self.dimension, 0) - self.image_rank


@dataclass
class MintyCertificate:
    """Finite-to-one and local diffeomorphism certificate of a map."""

    matrix: Matrix
    ranks: List[PieceRank]
    dense_set: List[int] = field(default_factory=list)
    dense: Optional[bool] = None
    """`None` until `dense_local_diffeo` has run."""

    hypothesis_failures: List[Vector] = field(default_factory=list)
    samples: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def finite_to_one(self) -> bool:
        """Whether the map is injective on every piece."""
        return all(r.kernel_dim == 0 for r in self.ranks)

    @property
    def preimage_bound(self) -> int:
        """Every preimage has at most one point per piece."""
        return sum(1 for r in self.ranks if r.dimension >= 0)

    @property
    def failures(self) -> List[int]:
        """Pieces on which the map is not injective."""
        return [r.piece for r in self.ranks if r.kernel_dim > 0]

    @property
    def passed(self) -> bool:
        """Whether the map is finite-to-one, the dense local diffeomorphism
        check did not fail and no hypothesis failure was found.
        """
        return (
            self.finite_to_one
            and self.dense is not False
            and not self.hypothesis_failures
        )

    def to_dict(self) -> Dict[str, Any]:
        """Return the certificate as a JSON-compatible dictionary."""
        return {
            "matrix": [format_vector(row) for row in self.matrix],
            "pieces": [
                {
                    "piece": r.piece,
                    "dimension": r.dimension,
                    "image_rank": r.image_rank,
                    "kernel_dim": r.kernel_dim,
                }
                for r in self.ranks
            ],
            "finite_to_one": self.finite_to_one,
            "preimage_bound": self.preimage_bound,
            "failures": self.failures,
            "dense_set": self.dense_set,
            "dense": self.dense,
            "hypothesis_failures": [
                format_vector(p) for p in self.hypothesis_failures
            ],
            "passed": self.passed,
            "samples": self.samples,
        }


def graph_polyhedra(
    U: Union[PieceUnion, Sequence[PieceLike]]
) -> List[HPolyhedron]:
    """Return the polyhedral closures of the pieces."""
    return [_polyhedron(piece) for piece in U]


def _ranks(A: MintyMap, polyhedra: Sequence[HPolyhedron]) -> List[PieceRank]:
    ranks = []
    for i, P in enumerate(polyhedra):
        _check_space(A, P)
        if not geo.feasible(P):
            ranks.append(PieceRank(i, geo.EMPTY_DIMENSION, 0))
            continue
        ranks.append(PieceRank(i, geo.dim(P), _image_rank(A, P)))
    return ranks


def finite_to_one(
    A: MintyMap, U: Union[PieceUnion, Sequence[PieceLike]]
) -> MintyCertificate:
    """Certify that every preimage under ``A`` is finite.

    The map is finite-to-one on the union iff it is injective on every
    piece; a preimage then has at most one point per piece.
    """
    certificate = MintyCertificate(A.matrix, _ranks(A, graph_polyhedra(U)))
    logger.debug(
        f"Finite-to-one for {A.to_list()}: {certificate.finite_to_one}, "
        f"failures {certificate.failures}."
    )
    return certificate


@dataclass(frozen=True)
class PieceOutcome:
    """Solutions of ``A x + v = b`` inside one piece."""

    piece: int
    solutions: HPolyhedron
    dimension: int

    @property
    def status(self) -> str:
        """One of "empty", "point" or "polyhedron"."""
        if self.dimension < 0:
            return "empty"
        if self.dimension == 0:
            return "point"
        return "polyhedron"

    @property
    def point(self) -> Optional[Vector]:
        """The solution when it is isolated, else `None`."""
        if self.dimension != 0:
            return None
        return geo.relative_interior_point(self.solutions)

    def to_dict(self) -> Dict[str, Any]:
        """Return the outcome as a JSON-compatible dictionary."""
        data: Dict[str, Any] = {
            "piece": self.piece,
            "status": self.status,
            "dimension": self.dimension,
        }
        if self.point is not None:
            data["point"] = format_vector(self.point)
        return data


@dataclass
class Preimage:
    """Exhaustive per-piece preimage of a target."""

    target: Vector
    outcomes: List[PieceOutcome]

    @property
    def finite(self) -> bool:
        """Whether every nonempty outcome is a single point."""
        return all(o.dimension <= 0 for o in self.outcomes)

    @property
    def points(self) -> List[Vector]:
        """Distinct isolated solutions, sorted."""
        return sorted(
            {o.point for o in self.outcomes if o.point is not None}
        )


def piece_preimage(
    A: MintyMap, P: HPolyhedron, b: Sequence[Fraction], index: int = 0
) -> PieceOutcome:
    """Return ``P`` intersected with ``{(x, v) : A x + v = b}``."""
    _check_space(A, P)
    check_dim(b, A.n, "target")
    solutions = P.constrain(equalities=list(zip(A.block, vector(b))))
    return PieceOutcome(index, solutions, geo.dim(solutions))


def preimage(
    A: MintyMap,
    U: Union[PieceUnion, Sequence[PieceLike]],
    b: Sequence[Fraction],
) -> Preimage:
    """Solve ``A x + v = b`` on every piece of ``U``."""
    outcomes = [
        piece_preimage(A, P, b, i)
        for i, P in enumerate(graph_polyhedra(U))
    ]
    return Preimage(vector(b), outcomes)


def hypothesis_failures(U: PieceUnion) -> List[Vector]:
    """Covering test points at which ``U`` has local dimension below half
    its ambient dimension.
    """
    n = U.ambient_dim // 2
    return [
        p
        for p in covering_test_points(U)
        if local_dim(U, p).local_dim < n
    ]


def dense_local_diffeo(
    A: MintyMap,
    U: PieceUnion,
    failures: Optional[Sequence[Vector]] = None,
) -> MintyCertificate:
    """Certify a dense set on which ``A x + v`` is a local diffeomorphism.

    The set consists of the ``n``-dimensional pieces on which the map is
    injective (the map has rank ``n`` there, so it is an affine bijection
    onto an open set). It is dense when the closures of those pieces
    cover every piece. Points where ``U`` has local dimension below
    ``n`` are reported in the certificate; pass ``failures`` to reuse a
    previous computation.
    """
    polyhedra = graph_polyhedra(U)
    certificate = MintyCertificate(A.matrix, _ranks(A, polyhedra))
    certificate.dense_set = [
        r.piece
        for r in certificate.ranks
        if r.dimension == A.n and r.kernel_dim == 0
    ]
    certificate.dense = _covered(
        tuple(certificate.dense_set), polyhedra
    )
    certificate.hypothesis_failures = list(
        hypothesis_failures(U) if failures is None else failures
    )
    if certificate.hypothesis_failures:
        logger.warning(
            f"The graph has local dimension below {A.n} at "
            f"{len(certificate.hypothesis_failures)} test points."
        )
    return certificate


def _covered(
    dense_set: Sequence[int], polyhedra: Sequence[HPolyhedron]
) -> bool:
    closures = [polyhedra[i] for i in dense_set]
    if not closures:
        return not any(geo.feasible(P) for P in polyhedra)
    return all(geo.covered_by(P, closures) for P in polyhedra)


@dataclass
class GenericSample:
    """Outcome of `sample_generic`."""

    trials: int
    seed: int
    passes: int
    failed_matrices: List[Matrix] = field(default_factory=list)

    @property
    def fraction(self) -> float:
        """Fraction of the sampled matrices that passed."""
        return self.passes / self.trials if self.trials else 0.0

    def to_dict(self) -> Dict[str, Any]:
        """Return the sample as a JSON-compatible dictionary."""
        return {
            "trials": self.trials,
            "seed": self.seed,
            "passes": self.passes,
            "fraction": self.fraction,
            "failed_matrices": [
                [format_vector(row) for row in matrix]
                for matrix in self.failed_matrices
            ],
        }


def _random_entry(
    rng: np.random.Generator, numerator_bound: int, denominator_bound: int
) -> Fraction:
    numerator = int(rng.integers(1, numerator_bound, endpoint=True))
    if rng.integers(0, 2):
        numerator = -numerator
    denominator = int(rng.integers(1, denominator_bound, endpoint=True))
    return Fraction(numerator, denominator)


def random_matrix(
    n: int,
    rng: np.random.Generator,
    numerator_bound: int,
    denominator_bound: int,
) -> MintyMap:
    """Draw a matrix with nonzero uniform rational entries."""
    return MintyMap(
        tuple(
            tuple(
                _random_entry(rng, numerator_bound, denominator_bound)
                for _ in range(n)
            )
            for _ in range(n)
        )
    )


def sample_generic(
    U: PieceUnion,
    trials: int,
    seed: int,
    numerator_bound: Optional[int] = None,
    denominator_bound: Optional[int] = None,
) -> GenericSample:
    """Return the fraction of random matrices that certify both
    finite-to-one and the dense local diffeomorphism property.

    Every trial draws from its own stream spawned from ``seed``, so the
    outcome depends only on ``(seed, trials)``.
    """
    config = Configuration()
    if numerator_bound is None:
        numerator_bound = config.generic_numerator_bound
    if denominator_bound is None:
        denominator_bound = config.generic_denominator_bound
    n = U.ambient_dim // 2
    polyhedra = graph_polyhedra(U)
    failures = hypothesis_failures(U)
    coverage: Dict[tuple, bool] = {}
    sample = GenericSample(trials, seed, 0)
    for stream in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(stream)
        A = random_matrix(n, rng, numerator_bound, denominator_bound)
        ranks = _ranks(A, polyhedra)
        dense_set = tuple(
            r.piece
            for r in ranks
            if r.dimension == n and r.kernel_dim == 0
        )
        if dense_set not in coverage:
            coverage[dense_set] = _covered(dense_set, polyhedra)
        certificate = MintyCertificate(
            A.matrix,
            ranks,
            list(dense_set),
            coverage[dense_set],
            list(failures),
        )
        if certificate.passed:
            sample.passes += 1
        else:
            sample.failed_matrices.append(A.matrix)
    logger.info(
        f"Generic matrices: {sample.passes} of {trials} certified "
        f"(seed {seed})."
    )
    return sample
