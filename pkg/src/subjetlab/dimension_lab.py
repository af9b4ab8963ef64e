"""Local and global dimension of finite unions of pieces.

The local dimension of a union at ``p`` is the largest dimension of a
piece whose closure contains ``p``; the global dimension is the largest
piece dimension. Both are exact whenever closure membership is.
A numeric estimator based on point clouds is provided as an independent
cross-check.
"""

__all__ = [
    "OutsideUnionError",
    "InsufficientSamplesError",
    "LocalDimReport",
    "VerificationReport",
    "IdentityCheck",
    "DimIdentityReport",
    "NumericDimEstimate",
    "graph_union",
    "local_dim",
    "global_dim",
    "covering_test_points",
    "verify_local_dim_theorem",
    "dim_identity_suite",
    "estimate_local_dim_numeric",
    "sample_polyhedron",
    "sample_piece_union",
]

import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from subjetlab import exact_geometry as geo
from subjetlab.config import Configuration
from subjetlab.exact_geometry import HPolyhedron
from subjetlab.kinds import SubdiffKind, Tier
from subjetlab.pieces import PieceUnion, PolyhedralPiece
from subjetlab.piecewise_model import PiecewiseFunction
from subjetlab.rational import Vector, format_vector, to_floats, vector
from subjetlab.special import special_oracle
from subjetlab.subdifferential import subjet_pieces

logger = logging.getLogger("subjetlab")


class OutsideUnionError(ValueError):
    """Raised when a point is outside the closure of every piece."""


class InsufficientSamplesError(ValueError):
    """Raised when a point cloud is too sparse for the numeric estimator."""


@dataclass(frozen=True)
class LocalDimReport:
    """Local dimension at a point with its certificate.

    The certificate lists ``(piece index, piece dimension)`` for every
    piece whose closure contains the point.
    """

    point: Vector
    local_dim: int
    witness: int
    certificate: Tuple[Tuple[int, int], ...]

    def to_dict(self) -> Dict[str, Any]:
        """Report form."""
        return {
            "point": format_vector(self.point),
            "local_dim": self.local_dim,
            "witness": self.witness,
            "certificate": [list(c) for c in self.certificate],
        }


def graph_union(f: PiecewiseFunction, kind: SubdiffKind) -> PieceUnion:
    """Return the graph of a subdifferential of ``f`` as a `PieceUnion`."""
    union = PieceUnion(2 * f.ambient_dim)
    if f.special_oracle:
        for piece in special_oracle(f.special_oracle).graph_pieces(kind):
            union.add(piece)
        return union
    for i, piece in enumerate(subjet_pieces(f, kind)):
        union.add(piece.to_piece(f"{kind.value}[{i}]"))
    return union


def local_dim(U: PieceUnion, p: Sequence[Fraction]) -> LocalDimReport:
    """Return the local dimension of ``U`` at ``p``.

    Raises
    ------
    OutsideUnionError
        Raised if no piece closure contains ``p``.
    UndeclaredPointError
        Raised if a parameterized piece cannot decide membership at ``p``.
    """
    p = vector(p)
    certificate = tuple(
        (i, piece.dimension)
        for i, piece in U.labelled()
        if piece.closure_contains(p)
    )
    if not certificate:
        raise OutsideUnionError(
            f"{format_vector(p)} is outside the closure of every piece."
        )
    witness, dimension = max(certificate, key=lambda c: (c[1], -c[0]))
    return LocalDimReport(p, dimension, witness, certificate)


def global_dim(U: PieceUnion) -> int:
    """Return the dimension of ``U`` (``-1`` when empty)."""
    return max(
        (piece.dimension for piece in U), default=geo.EMPTY_DIMENSION
    )


def covering_test_points(U: PieceUnion) -> List[Vector]:
    """Return the finite test set on which local dimension is verified.

    It holds the sample points of every piece, the relative interior
    points of every face of polyhedral pieces, and one relative interior
    point of every pairwise intersection of polyhedral piece closures.
    """
    points: List[Vector] = []
    polyhedra = []
    for piece in U:
        points.extend(piece.test_points())
        P = piece.polyhedron
        if P is not None and geo.feasible(P):
            polyhedra.append(P)
            points.extend(geo.relative_interior_point(F) for F in geo.faces(P))
    for i, P in enumerate(polyhedra):
        for Q in polyhedra[i + 1 :]:
            common = geo.intersect(P, Q)
            if geo.feasible(common):
                points.append(geo.relative_interior_point(common))
    return list(dict.fromkeys(points))


@dataclass
class VerificationReport:
    """Outcome of `verify_local_dim_theorem`."""

    fixture: str
    kind: SubdiffKind
    ambient_dim: int
    semi_linear: bool
    points: List[Vector] = field(default_factory=list)
    dims: List[int] = field(default_factory=list)
    violations: List[LocalDimReport] = field(default_factory=list)
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        """Whether every test point has full local dimension."""
        return not self.violations

    def to_dict(self, timing: bool = False) -> Dict[str, Any]:
        """Report form; the runtime is included only with ``timing``."""
        data: Dict[str, Any] = {
            "fixture": self.fixture,
            "kind": self.kind.value,
            "n": self.ambient_dim,
            "semi_linear": self.semi_linear,
            "passed": self.passed,
            "points": [format_vector(p) for p in self.points],
            "local_dims": self.dims,
            "violations": [v.to_dict() for v in self.violations],
        }
        if timing:
            data["runtime"] = self.runtime
        return data


def verify_local_dim_theorem(
    f: PiecewiseFunction, kind: SubdiffKind
) -> VerificationReport:
    """Check that the graph of ``kind`` has local dimension ``n`` at every
    covering test point.

    Every point with a smaller local dimension is reported as a violation
    with its certificate.
    """
    start = time.perf_counter()
    n = f.ambient_dim
    report = VerificationReport(
        f.name, kind, n, f.tier is Tier.AFFINE and not f.special_oracle
    )
    U = graph_union(f, kind)
    for p in covering_test_points(U):
        local = local_dim(U, p)
        report.points.append(p)
        report.dims.append(local.local_dim)
        if local.local_dim != n:
            report.violations.append(local)
    report.runtime = time.perf_counter() - start
    logger.info(
        f"Local dimension of the {kind.value} graph of '{f.name}': "
        f"{len(report.points)} points, {len(report.violations)} violations."
    )
    return report


@dataclass(frozen=True)
class IdentityCheck:
    """One checked dimension identity."""

    identity: str
    operands: Tuple[int, ...]
    expected: int
    computed: int

    @property
    def holds(self) -> bool:
        """Whether the identity holds."""
        return self.expected == self.computed


@dataclass
class DimIdentityReport:
    """Outcome of `dim_identity_suite`."""

    checks: List[IdentityCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """Whether every identity holds."""
        return all(check.holds for check in self.checks)


def dim_identity_suite(
    pieces: Sequence[HPolyhedron],
    maps: Sequence[Tuple[HPolyhedron, HPolyhedron]] = (),
) -> DimIdentityReport:
    """Check the dimension identities on polyhedra.

    For every pair: ``dim(A u B) = max``, ``dim(A x B) = sum`` and
    monotonicity under inclusion. For a piece-constant set-valued map
    given as ``(domain, fiber)`` pairs: ``dim gph = dim dom + dim fiber``.
    """
    report = DimIdentityReport()
    dims = [geo.dim(P) for P in pieces]
    for i, A in enumerate(pieces):
        for j in range(i, len(pieces)):
            B = pieces[j]
            if geo.feasible(A) and geo.feasible(B):
                report.checks.append(
                    IdentityCheck(
                        "product",
                        (i, j),
                        dims[i] + dims[j],
                        geo.dim(geo.product(A, B)),
                    )
                )
            if A.ambient_dim != B.ambient_dim:
                continue
            union = PieceUnion(A.ambient_dim)
            for P in (A, B):
                union.add(PolyhedralPiece(P))
            computed = max(
                (
                    local_dim(union, p).local_dim
                    for p in covering_test_points(union)
                ),
                default=geo.EMPTY_DIMENSION,
            )
            report.checks.append(
                IdentityCheck("union", (i, j), max(dims[i], dims[j]), computed)
            )
            for small, large in ((i, j), (j, i)):
                if geo.includes(pieces[large], pieces[small]):
                    report.checks.append(
                        IdentityCheck(
                            "monotone",
                            (small, large),
                            dims[small],
                            min(dims[small], dims[large]),
                        )
                    )
    for k, (domain, fiber) in enumerate(maps):
        if not geo.feasible(domain) or not geo.feasible(fiber):
            continue
        report.checks.append(
            IdentityCheck(
                "graph",
                (k,),
                geo.dim(domain) + geo.dim(fiber),
                geo.dim(geo.product(domain, fiber)),
            )
        )
    return report


@dataclass(frozen=True)
class NumericDimEstimate:
    """Numeric local dimension: log-log slope and local PCA rank."""

    slope: float
    estimate: int
    pca_rank: int
    counts: Tuple[int, ...]

    @property
    def disagreement(self) -> bool:
        """Whether the slope estimate and the PCA rank differ."""
        return self.estimate != self.pca_rank


def estimate_local_dim_numeric(
    samples: Any,
    p: Sequence[float],
    radii: Sequence[float],
    cutoff: Optional[float] = None,
    min_samples: int = 200,
) -> NumericDimEstimate:
    """Estimate the local dimension of a point cloud around ``p``.

    The estimate is the slope of log-count against log-radius, rounded;
    the PCA rank counts singular values above ``cutoff`` (relative) of
    the points within the smallest radius.

    Raises
    ------
    InsufficientSamplesError
        Raised with fewer than ``min_samples`` points within the largest
        radius, fewer than four radii, or no point within the smallest.
    """
    if cutoff is None:
        cutoff = Configuration().pca_cutoff
    cloud = np.asarray(samples, dtype=float)
    center = np.asarray([float(q) for q in p])
    radii_array = np.sort(np.asarray(radii, dtype=float))
    if len(radii_array) < 4:
        raise InsufficientSamplesError("At least four radii are required.")
    if cloud.ndim != 2 or cloud.shape[1] != center.shape[0]:
        raise InsufficientSamplesError("Samples must be an (m, d) array.")
    distances = np.linalg.norm(cloud - center, axis=1)
    counts = tuple(int((distances <= r).sum()) for r in radii_array)
    if counts[-1] < min_samples:
        raise InsufficientSamplesError(
            f"Only {counts[-1]} samples within radius {radii_array[-1]}, "
            f"{min_samples} required."
        )
    if counts[0] == 0:
        raise InsufficientSamplesError(
            f"No sample within the smallest radius {radii_array[0]}."
        )
    slope = float(np.polyfit(np.log(radii_array), np.log(counts), 1)[0])
    near = cloud[distances <= radii_array[0]]
    centered = near - near.mean(axis=0)
    singular = np.linalg.svd(centered, compute_uv=False)
    if singular.size == 0 or singular[0] == 0:
        pca_rank = 0
    else:
        pca_rank = int((singular > cutoff * singular[0]).sum())
    estimate = NumericDimEstimate(slope, int(round(slope)), pca_rank, counts)
    if estimate.disagreement:
        logger.warning(
            f"Numeric local dimension disagrees: slope {slope:.3f}, "
            f"PCA rank {pca_rank}."
        )
    return estimate


def sample_polyhedron(
    P: HPolyhedron,
    center: Sequence[float],
    radius: float,
    spacing: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Sample ``P`` near ``center`` with density ``spacing**-dim P``.

    Points are drawn uniformly in a box of the affine hull of ``P`` and
    kept when they lie in ``P`` and within ``radius`` of ``center``.
    """
    n = P.ambient_dim
    d = geo.dim(P)
    if d < 0:
        return np.empty((0, n))
    c = np.asarray(center, dtype=float)
    origin = np.asarray(to_floats(geo.relative_interior_point(P)))
    basis = geo.direction_basis(P)
    if d == 0:
        draws = origin[np.newaxis, :]
    else:
        q, _ = np.linalg.qr(np.array([to_floats(v) for v in basis]).T)
        foot = origin + q @ (q.T @ (c - origin))
        count = int(math.ceil((2 * radius / spacing) ** d))
        offsets = rng.uniform(-radius, radius, size=(count, d))
        draws = foot + offsets @ q.T
    keep = np.linalg.norm(draws - c, axis=1) <= radius
    for a, b in P.inequalities:
        keep &= draws @ np.asarray(to_floats(a)) <= float(b) + 1e-9
    for a, b in P.equalities:
        keep &= np.abs(draws @ np.asarray(to_floats(a)) - float(b)) <= 1e-9
    return draws[keep]


def sample_piece_union(
    U: PieceUnion,
    center: Sequence[Fraction],
    radius: float,
    spacing: float,
    seed: int = 0,
) -> np.ndarray:
    """Sample the polyhedral pieces of ``U`` near ``center``.

    Pieces without a polyhedral closure are skipped.
    """
    rng = np.random.default_rng(seed)
    c = to_floats(center)
    clouds = [
        sample_polyhedron(piece.polyhedron, c, radius, spacing, rng)
        for piece in U
        if piece.polyhedron is not None
    ]
    if not clouds:
        return np.empty((0, U.ambient_dim))
    return np.vstack(clouds)
