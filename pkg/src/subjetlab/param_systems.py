"""Parametric systems ``v in df(x), A x + v = b`` on the affine tier.

`solve` enumerates the solutions of one system exactly.
`sensitivity_experiment` estimates how often small perturbations of a
system keep finitely many solutions near a given one, and `access_point`
builds sequences of Fréchet subjet points outside a set ``M`` converging
to a prescribed subjet point of ``M``.
"""

__all__ = [
    "AnchorError",
    "HypothesisViolatedError",
    "AccessError",
    "ParamSystem",
    "SolutionSet",
    "SensitivityResult",
    "AccessHypothesis",
    "AccessWitness",
    "MonotonicityEntry",
    "MonotonicityReport",
    "solve",
    "sensitivity_experiment",
    "accessibility_hypothesis",
    "access_point",
    "local_dim_monotonicity_check",
    "minimize_quadratic",
]

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from subjetlab import exact_geometry as geo
from subjetlab.config import Configuration
from subjetlab.dimension_lab import covering_test_points, local_dim
from subjetlab.exact_geometry import HPolyhedron
from subjetlab.kinds import SubdiffKind, Tier
from subjetlab.minty_maps import (
    MintyCertificate,
    MintyMap,
    PieceOutcome,
    dimension_preserved,
    finite_to_one,
    graph_polyhedra,
    piece_preimage,
)
from subjetlab.pieces import PieceUnion, PolyhedralPiece
from subjetlab.piecewise_model import (
    Cell,
    GraphPoint,
    PiecewiseFunction,
    Polynomial,
    TierError,
    affine_precompose,
    evaluate,
)
from subjetlab.rational import (
    DimensionMismatchError,
    Vector,
    add,
    check_dim,
    dot,
    format_rational,
    format_vector,
    max_norm,
    norm_sq,
    scale,
    solve_linear,
    sub,
    unit,
    vector,
    zeros,
)
from subjetlab.subdifferential import (
    cell_complex,
    frechet_subdiff,
    limiting_subdiff,
    restrict_subjet,
    subjet_pieces,
)

logger = logging.getLogger("subjetlab")


class AnchorError(ValueError):
    """Raised when the anchor of a sensitivity experiment does not solve
    the unperturbed system.
    """


class HypothesisViolatedError(ValueError):
    """Raised when the boundary hypothesis of the accessibility
    construction fails for every penalty parameter.

    The refusal certificate is available as ``certificate``.
    """

    def __init__(self, msg: str, certificate: "AccessHypothesis") -> None:
        super().__init__(msg)
        self.certificate = certificate


class AccessError(ValueError):
    """Raised when the accessibility construction cannot start."""


def _check_affine(f: PiecewiseFunction) -> None:
    if f.special_oracle or f.tier is not Tier.AFFINE:
        msg = f"'{f.name}' is not an affine-tier fixture."
        raise TierError(msg)


@dataclass(frozen=True)
class ParamSystem:
    """The system ``v in df(x), A x + v = b``."""

    f: PiecewiseFunction
    A: MintyMap
    b: Vector

    def __post_init__(self) -> None:
        if self.A.n != self.f.ambient_dim:
            msg = (
                f"A is {self.A.n}x{self.A.n}, the function lives in "
                f"R^{self.f.ambient_dim}."
            )
            raise DimensionMismatchError(msg)
        check_dim(self.b, self.A.n, "right-hand side")


@dataclass
class SolutionSet:
    """Per-piece solutions of a `ParamSystem`."""

    kind: SubdiffKind
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

    def contains(self, point: Sequence[Fraction]) -> bool:
        """Whether a graph point ``(x, v)`` solves the system."""
        return any(
            o.dimension >= 0 and geo.contains(o.solutions, point)
            for o in self.outcomes
        )

    def to_dict(self) -> Dict[str, Any]:
        """Return the solutions as a JSON-compatible dictionary."""
        return {
            "kind": self.kind.value,
            "finite": self.finite,
            "points": [format_vector(p) for p in self.points],
            "pieces": [o.to_dict() for o in self.outcomes],
        }


def solve(
    system: ParamSystem, kind: SubdiffKind = SubdiffKind.LIMITING
) -> SolutionSet:
    """Solve the system exactly on every piece of the graph of ``kind``.

    Fréchet pieces over relative interiors keep an isolated solution only
    when it lies in the piece itself.
    """
    _check_affine(system.f)
    n = system.A.n
    outcomes = []
    for i, piece in enumerate(subjet_pieces(system.f, kind)):
        outcome = piece_preimage(
            system.A, piece.graph_polyhedron(), system.b, i
        )
        point = outcome.point
        if point is not None and not piece.closure_flag:
            if not piece.contains(point[:n], point[n:]):
                outcome = PieceOutcome(
                    i, HPolyhedron.empty(2 * n), geo.EMPTY_DIMENSION
                )
        outcomes.append(outcome)
    solutions = SolutionSet(kind, outcomes)
    logger.debug(
        f"Solved '{system.f.name}' with A={system.A.to_list()}, "
        f"b={format_vector(system.b)}: {len(solutions.points)} points, "
        f"finite {solutions.finite}."
    )
    return solutions


@dataclass
class SensitivityResult:
    """Outcome of `sensitivity_experiment`."""

    trials: int
    seed: int
    successes: int
    infinite: int
    radius_matrix: Fraction
    radius_rhs: Fraction

    @property
    def fraction(self) -> float:
        """Fraction of perturbed systems with finitely many solutions and
        one of them near the anchor.
        """
        return self.successes / self.trials if self.trials else 0.0

    @property
    def infinite_fraction(self) -> float:
        """Fraction of perturbed systems with infinitely many solutions."""
        return self.infinite / self.trials if self.trials else 0.0

    def to_dict(self) -> Dict[str, Any]:
        """Return the result as a JSON-compatible dictionary."""
        return {
            "trials": self.trials,
            "seed": self.seed,
            "successes": self.successes,
            "fraction": self.fraction,
            "infinite": self.infinite,
            "infinite_fraction": self.infinite_fraction,
            "half_width_A": format_rational(self.radius_matrix),
            "half_width_b": format_rational(self.radius_rhs),
        }


def _ceil_sqrt(k: int) -> int:
    return math.isqrt(k - 1) + 1 if k > 0 else 0


def _jitter(
    center: Fraction, half_width: Fraction, grid: int, rng: np.random.Generator
) -> Fraction:
    k = int(rng.integers(-grid, grid, endpoint=True))
    return center + half_width * Fraction(k, grid)


def sensitivity_experiment(
    f: PiecewiseFunction,
    A: MintyMap,
    b: Sequence[Fraction],
    anchor: Sequence[Fraction],
    eps: Fraction,
    delta: Fraction,
    trials: int,
    seed: int,
    gamma: Optional[Fraction] = None,
    grid: Optional[int] = None,
) -> SensitivityResult:
    """Perturb ``(A, b)`` at random and count systems whose solution set is
    finite and meets the ``eps`` ball around ``anchor``.

    Perturbations are drawn on a rational grid in the max-norm box
    inscribed in the ball of radius ``delta`` around ``(A, b)``. With
    ``gamma`` the box is inscribed in the product of the ``delta`` ball
    around ``A`` and the ``gamma`` ball around ``b``.

    Raises
    ------
    AnchorError
        Raised if ``anchor`` does not solve the unperturbed system.
    """
    system = ParamSystem(f, A, vector(b))
    anchor = vector(anchor)
    check_dim(anchor, 2 * A.n, "anchor")
    if not solve(system).contains(anchor):
        msg = (
            f"Anchor {format_vector(anchor)} does not solve the system "
            f"A={A.to_list()}, b={format_vector(system.b)}."
        )
        raise AnchorError(msg)
    if grid is None:
        grid = Configuration().sampler_grid
    n = A.n
    if gamma is None:
        radius_matrix = radius_rhs = delta / _ceil_sqrt(n * n + n)
    else:
        radius_matrix = delta / _ceil_sqrt(n * n)
        radius_rhs = gamma / _ceil_sqrt(n)
    polyhedra = [
        piece.graph_polyhedron()
        for piece in subjet_pieces(f, SubdiffKind.LIMITING)
    ]
    result = SensitivityResult(trials, seed, 0, 0, radius_matrix, radius_rhs)
    bound = eps * eps
    for stream in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(stream)
        perturbed = MintyMap(
            tuple(
                tuple(_jitter(q, radius_matrix, grid, rng) for q in row)
                for row in A.matrix
            )
        )
        rhs = tuple(_jitter(q, radius_rhs, grid, rng) for q in system.b)
        solutions = SolutionSet(
            SubdiffKind.LIMITING,
            [
                piece_preimage(perturbed, P, rhs, i)
                for i, P in enumerate(polyhedra)
            ],
        )
        if not solutions.finite:
            result.infinite += 1
            continue
        if any(norm_sq(sub(p, anchor)) <= bound for p in solutions.points):
            result.successes += 1
    logger.info(
        f"Sensitivity of '{f.name}' at {format_vector(anchor)}: "
        f"{result.successes} of {trials} trials (seed {seed}), "
        f"{result.infinite} with infinitely many solutions."
    )
    return result


@dataclass
class AccessHypothesis:
    """Per-penalty boundary status and the dimension test of the
    restricted subjet.

    A status is ``"boundary"``, ``"interior"`` or ``"outside"`` according
    to the position of the anchor subgradient relative to the union
    ``m (x - x0) + df(x)`` over ``x`` in ``M``.
    """

    statuses: Dict[int, str]
    restricted_dim: int
    ambient_dim: int
    localized: bool = False

    @property
    def boundary_holds(self) -> bool:
        """Whether some penalty leaves the anchor off the interior."""
        return any(s != "interior" for s in self.statuses.values())

    @property
    def dimension_holds(self) -> bool:
        """Whether the restricted subjet has dimension below n."""
        return self.restricted_dim < self.ambient_dim

    def to_dict(self) -> Dict[str, Any]:
        """Return the check as a JSON-compatible dictionary."""
        return {
            "statuses": {str(m): s for m, s in self.statuses.items()},
            "boundary_holds": self.boundary_holds,
            "restricted_dim": self.restricted_dim,
            "dimension_holds": self.dimension_holds,
            "localized": self.localized,
        }


@dataclass
class AccessWitness:
    """A sequence of Fréchet subjet points converging to ``target``."""

    target: GraphPoint
    tolerance: Fraction
    triples: List[GraphPoint] = field(default_factory=list)
    penalties: List[int] = field(default_factory=list)
    targets: List[Vector] = field(default_factory=list)
    """The auxiliary points ``y_i``, in the coordinates of ``v``."""

    distances: List[Fraction] = field(default_factory=list)
    """Squared distances of the triples to ``target``."""

    verified: List[bool] = field(default_factory=list)
    hypothesis: Optional[AccessHypothesis] = None

    @property
    def converged(self) -> bool:
        """Every triple is verified, distances strictly decrease and the
        last one is below the tolerance.
        """
        if not self.triples or not all(self.verified):
            return False
        pairs = zip(self.distances, self.distances[1:])
        decreasing = all(a > b for a, b in pairs)
        return decreasing and self.distances[-1] < self.tolerance**2

    def to_dict(self) -> Dict[str, Any]:
        """Return the witness as a JSON-compatible dictionary."""
        return {
            "target": _graph_point_dict(self.target),
            "tolerance": format_rational(self.tolerance),
            "triples": [
                dict(
                    _graph_point_dict(t),
                    m=m,
                    y=format_vector(y),
                    distance_sq=format_rational(d),
                    verified=ok,
                )
                for t, m, y, d, ok in zip(
                    self.triples,
                    self.penalties,
                    self.targets,
                    self.distances,
                    self.verified,
                )
            ],
            "converged": self.converged,
            "hypothesis": (
                self.hypothesis.to_dict() if self.hypothesis else None
            ),
        }


def _graph_point_dict(point: GraphPoint) -> Dict[str, Any]:
    return {
        "x": format_vector(point.x),
        "fx": str(point.fx),
        "v": format_vector(point.v),
    }


@dataclass
class _ShiftedProblem:
    """``g(x) = f(x + x0) - f(x0) - v0 . x`` and ``M - x0``."""

    g: PiecewiseFunction
    M: List[HPolyhedron]
    localized: bool


def _star(f: PiecewiseFunction, x0: Vector, v0: Vector) -> PiecewiseFunction:
    """Restrict ``f`` to the cells around the largest face at ``x0`` whose
    subgradient set contains ``v0``.
    """
    complex_ = cell_complex(f)
    faces = [
        F
        for F in complex_.faces_containing(x0)
        if geo.contains(complex_.face_subgradients(F), v0)
    ]
    if not faces:
        msg = (
            f"{format_vector(v0)} is not a limiting subgradient of "
            f"'{f.name}' at {format_vector(x0)}."
        )
        raise AccessError(msg)
    face = max(faces, key=lambda F: F.dimension)
    cells = tuple(complex_.function.cells[i] for i in face.cells)
    return PiecewiseFunction(
        f"star({f.name})", f.ambient_dim, Tier.AFFINE, cells
    )


def _prepare(
    f: PiecewiseFunction,
    M: Sequence[HPolyhedron],
    x0: Sequence[Fraction],
    v0: Sequence[Fraction],
) -> _ShiftedProblem:
    _check_affine(f)
    n = f.ambient_dim
    x0, v0 = vector(x0), vector(v0)
    check_dim(x0, n, "point")
    check_dim(v0, n, "subgradient")
    if not M:
        raise AccessError("The set M is empty.")
    for K in M:
        if K.ambient_dim != n:
            msg = f"M lives in R^{K.ambient_dim}, expected R^{n}."
            raise DimensionMismatchError(msg)
    if not any(geo.contains(K, x0) for K in M):
        msg = f"{format_vector(x0)} does not belong to M."
        raise AccessError(msg)
    fx0 = evaluate(f, x0)
    if fx0 == math.inf:
        msg = f"{format_vector(x0)} is outside the domain of '{f.name}'."
        raise AccessError(msg)
    localized = not frechet_subdiff(f, x0).contains(v0)
    base = _star(f, x0, v0) if localized else f
    identity = [unit(n, i) for i in range(n)]
    moved = affine_precompose(base, identity, x0)
    tilt = Polynomial.affine(v0, Fraction(fx0))
    g = replace(
        moved,
        name=f"shift({f.name})",
        cells=tuple(
            Cell(c.region, c.formula - tilt) for c in moved.cells
        ),
    )
    shifted = [geo.preimage(K, identity, x0) for K in M]
    if localized:
        logger.info(
            f"{format_vector(v0)} is not a Fréchet subgradient of "
            f"'{f.name}'; working on the star of its face."
        )
    return _ShiftedProblem(g, shifted, localized)


def _penalized_union(problem: _ShiftedProblem, m: int) -> List[HPolyhedron]:
    """The union ``m x + dg(x)`` over ``x`` in the shifted ``M``."""
    n = problem.g.ambient_dim
    stretch = [scale(Fraction(m), unit(n, i)) for i in range(n)]
    pieces = subjet_pieces(problem.g, SubdiffKind.LIMITING)
    union = []
    for K in problem.M:
        for piece in restrict_subjet(pieces, K):
            union.append(
                geo.minkowski_sum(
                    geo.linear_image(piece.base, stretch), piece.subgrad
                )
            )
    return union


def _status(union: Sequence[HPolyhedron]) -> str:
    if not union:
        return "outside"
    origin = zeros(union[0].ambient_dim)
    if not any(geo.contains(P, origin) for P in union):
        return "outside"
    if geo.is_interior_point(origin, union):
        return "interior"
    return "boundary"


def _restricted_dim(
    f: PiecewiseFunction, M: Sequence[HPolyhedron]
) -> int:
    pieces = subjet_pieces(f, SubdiffKind.LIMITING)
    return max(
        (
            piece.dimension
            for K in M
            for piece in restrict_subjet(pieces, K)
        ),
        default=geo.EMPTY_DIMENSION,
    )


def _hypothesis(
    f: PiecewiseFunction,
    M: Sequence[HPolyhedron],
    problem: _ShiftedProblem,
    schedule: Sequence[int],
) -> Tuple[AccessHypothesis, Dict[int, List[HPolyhedron]]]:
    unions = {m: _penalized_union(problem, m) for m in schedule}
    hypothesis = AccessHypothesis(
        {m: _status(unions[m]) for m in schedule},
        _restricted_dim(f, M),
        f.ambient_dim,
        problem.localized,
    )
    return hypothesis, unions


def _check_schedule(schedule: Sequence[int]) -> None:
    if not schedule:
        raise AccessError("The penalty schedule is empty.")
    for m in schedule:
        if m <= 0:
            msg = f"Invalid penalty {m}. Penalties must be positive."
            raise AccessError(msg)


def accessibility_hypothesis(
    f: PiecewiseFunction,
    M: Sequence[HPolyhedron],
    x0: Sequence[Fraction],
    v0: Sequence[Fraction],
    schedule: Sequence[int] = (1, 2, 4, 8, 16),
) -> AccessHypothesis:
    """Check the hypotheses of the accessibility construction.

    Reports, for every penalty ``m``, whether ``v0`` is a boundary point of
    ``m (x - x0) + df(x)`` over ``x`` in ``M``, and separately whether the
    limiting subjet restricted to ``M`` has dimension below ``n``.
    """
    _check_schedule(schedule)
    problem = _prepare(f, M, x0, v0)
    hypothesis, _ = _hypothesis(f, M, problem, schedule)
    return hypothesis


def _outside_target(
    union: Sequence[HPolyhedron], n: int, i: int
) -> Vector:
    """A point at max-norm distance at most ``1/i`` from the origin and
    outside the union.
    """
    origin = zeros(n)
    cones = [
        geo.tangent_cone(P, origin)
        for P in union
        if geo.contains(P, origin)
    ]
    d = geo.uncovered_direction(cones, n)
    if d is None:
        raise AccessError("The origin is interior to the penalized union.")
    t = Fraction(1, i) / max_norm(d)
    for _ in range(64):
        y = scale(t, d)
        if not any(geo.contains(P, y) for P in union):
            return y
        t /= 2
    raise AccessError("No auxiliary point outside the penalized union.")


def minimize_quadratic(
    hessian: Sequence[Sequence[Fraction]],
    linear: Sequence[Fraction],
    P: HPolyhedron,
) -> Optional[Tuple[Fraction, Vector]]:
    """Minimize ``z . H z / 2 + c . z`` over ``P`` for positive definite
    ``H``.

    Every face is tried: the minimizer over the affine hull of the face
    solves the KKT system and is kept when it lies in ``P``. Returns
    ``(value, point)`` or `None` when ``P`` is empty.
    """
    n = P.ambient_dim
    best: Optional[Tuple[Fraction, Vector]] = None
    for _, face in geo.face_lattice(P):
        hull = geo.affine_hull(face)
        k = len(hull)
        rows = [
            list(hessian[i]) + [a[i] for a, _ in hull] for i in range(n)
        ]
        rows += [list(a) + [Fraction(0)] * k for a, _ in hull]
        rhs = [-c for c in linear] + [b for _, b in hull]
        solution = solve_linear(rows, rhs, n + k)
        if solution is None:
            continue
        z = solution[:n]
        if not geo.contains(P, z):
            continue
        value = dot(z, [dot(row, z) for row in hessian]) / 2 + dot(linear, z)
        if best is None or (value, z) < best:
            best = (value, z)
    return best


def _penalty_hessian(n: int, m: Fraction) -> List[List[Fraction]]:
    """Hessian of ``m |x - w|^2 + m |x|^2`` in ``(x, w)``."""
    hessian = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        hessian[i][i] = 4 * m
        hessian[n + i][n + i] = 2 * m
        hessian[i][n + i] = hessian[n + i][i] = -2 * m
    return hessian


def _penalized_step(
    problem: _ShiftedProblem, y: Vector, m: int
) -> Tuple[Vector, Vector]:
    """Minimize ``-y . x + m (d_M(x)^2 + |x|^2) + g(x)``.

    Returns the minimizer and the Fréchet subgradient of ``g`` read off
    from the optimality condition.
    """
    n = problem.g.ambient_dim
    mm = Fraction(m)
    hessian = _penalty_hessian(n, mm)
    best: Optional[Tuple[Fraction, Vector]] = None
    for cell in problem.g.cells:
        a, b = cell.formula.affine_parts()
        linear = sub(a, y) + zeros(n)
        for K in problem.M:
            found = minimize_quadratic(
                hessian, linear, geo.product(cell.region, K)
            )
            if found is None:
                continue
            value, z = found
            value += b
            if best is None or (value, z) < best:
                best = (value, z)
    if best is None:
        raise AccessError("The penalized problem has no feasible point.")
    z = best[1]
    x, w = z[:n], z[n:]
    v = sub(sub(y, scale(2 * mm, sub(x, w))), scale(2 * mm, x))
    return x, v


def access_point(
    f: PiecewiseFunction,
    M: Sequence[HPolyhedron],
    x0: Sequence[Fraction],
    v0: Sequence[Fraction],
    tolerance: Optional[Fraction] = None,
    schedule: Sequence[int] = (1, 2, 4, 8, 16),
) -> AccessWitness:
    """Build Fréchet subjet points outside ``M`` converging to
    ``(x0, f(x0), v0)``.

    Step ``i`` uses the penalty ``m = schedule[i - 1]``, picks an auxiliary
    ``y_i`` outside ``m (x - x0) + df(x)`` (``x`` in ``M``) within ``1/i``
    of ``v0``, and minimizes ``-(y_i - v0) . x + m (d_M^2 + |x - x0|^2)``
    plus the tilted function exactly on every cell. When ``v0`` is only a
    limiting subgradient the construction runs on the cells around the
    face carrying it. Every produced triple is checked against the
    Fréchet subdifferential of ``f``.

    Raises
    ------
    HypothesisViolatedError
        Raised when ``v0`` is interior to the penalized union for every
        scheduled penalty.
    AccessError
        Raised when ``x0`` is not in ``M`` or ``v0`` is not a limiting
        subgradient at ``x0``.
    """
    _check_schedule(schedule)
    if tolerance is None:
        tolerance = Fraction(Configuration().access_tolerance)
    n = f.ambient_dim
    problem = _prepare(f, M, x0, v0)
    x0, v0 = vector(x0), vector(v0)
    if not limiting_subdiff(f, x0).contains(v0):
        msg = (
            f"{format_vector(v0)} is not a limiting subgradient of "
            f"'{f.name}' at {format_vector(x0)}."
        )
        raise AccessError(msg)
    hypothesis, unions = _hypothesis(f, M, problem, schedule)
    if not hypothesis.boundary_holds:
        msg = (
            f"{format_vector(v0)} is interior to the penalized union for "
            f"every penalty in {list(schedule)}."
        )
        logger.error(msg)
        raise HypothesisViolatedError(msg, hypothesis)
    target = GraphPoint(x0, evaluate(f, x0), v0)
    witness = AccessWitness(target, tolerance, hypothesis=hypothesis)
    for i, m in enumerate(schedule, start=1):
        if hypothesis.statuses[m] == "interior":
            logger.warning(f"Skipping penalty {m}: the anchor is interior.")
            continue
        y = _outside_target(unions[m], n, i)
        x, v = _penalized_step(problem, y, m)
        point = add(x, x0)
        subgradient = add(v, v0)
        triple = GraphPoint(point, evaluate(f, point), subgradient)
        verified = frechet_subdiff(f, point).contains(subgradient)
        verified = verified and not any(geo.contains(K, point) for K in M)
        distance = norm_sq(sub(point, x0)) + norm_sq(sub(subgradient, v0))
        distance += (Fraction(triple.fx) - Fraction(target.fx)) ** 2
        witness.triples.append(triple)
        witness.penalties.append(m)
        witness.targets.append(add(y, v0))
        witness.distances.append(distance)
        witness.verified.append(verified)
        logger.debug(
            f"Access step {i} (m={m}): x={format_vector(point)}, "
            f"v={format_vector(subgradient)}, verified {verified}."
        )
    logger.info(
        f"Access witness for '{f.name}' at {format_vector(x0)}: "
        f"{len(witness.triples)} triples, converged {witness.converged}."
    )
    return witness


@dataclass(frozen=True)
class MonotonicityEntry:
    """Local dimensions at a graph point and at its image."""

    point: Vector
    image: Vector
    source_dim: int
    image_dim: int

    @property
    def holds(self) -> bool:
        """Whether the local dimension does not decrease under the map."""
        return self.source_dim <= self.image_dim


@dataclass
class MonotonicityReport:
    """Outcome of `local_dim_monotonicity_check`."""

    certificate: MintyCertificate
    entries: List[MonotonicityEntry] = field(default_factory=list)
    preserved: List[bool] = field(default_factory=list)
    """Whether each piece keeps its dimension under the map."""

    notice: Optional[str] = None

    @property
    def skipped(self) -> bool:
        """Whether the check did not run, see `notice`."""
        return self.notice is not None

    @property
    def passed(self) -> bool:
        """Whether the check ran and every entry holds."""
        return not self.skipped and all(e.holds for e in self.entries)

    def to_dict(self) -> Dict[str, Any]:
        """Return the report as a JSON-compatible dictionary."""
        return {
            "skipped": self.skipped,
            "notice": self.notice,
            "passed": self.passed,
            "preserved": self.preserved,
            "entries": [
                {
                    "point": format_vector(e.point),
                    "image": format_vector(e.image),
                    "source_dim": e.source_dim,
                    "image_dim": e.image_dim,
                    "holds": e.holds,
                }
                for e in self.entries
            ],
        }


def local_dim_monotonicity_check(
    A: MintyMap,
    U: PieceUnion,
    points: Optional[Sequence[Vector]] = None,
    certificate: Optional[MintyCertificate] = None,
) -> MonotonicityReport:
    """Compare local dimensions of ``U`` and of its image under
    ``(x, v) -> A x + v``.

    The check runs only for finite-to-one maps; otherwise the report
    carries a notice naming the pieces where injectivity fails.
    """
    if certificate is None:
        certificate = finite_to_one(A, U)
    report = MonotonicityReport(certificate)
    if not certificate.finite_to_one:
        report.notice = (
            "The map is not finite-to-one: injectivity fails on pieces "
            f"{certificate.failures}."
        )
        logger.warning(report.notice)
        return report
    image = PieceUnion(A.n)
    for i, P in enumerate(graph_polyhedra(U)):
        if geo.feasible(P):
            image.add(PolyhedralPiece(A.image(P), f"image[{i}]"))
            report.preserved.append(dimension_preserved(A, P))
    if points is None:
        points = covering_test_points(U)
    for p in points:
        q = A.apply(p)
        report.entries.append(
            MonotonicityEntry(
                p, q, local_dim(U, p).local_dim, local_dim(image, q).local_dim
            )
        )
    return report
