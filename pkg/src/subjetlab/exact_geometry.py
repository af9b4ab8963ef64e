"""Exact rational polyhedral computation.

Polyhedra are kept in H-representation (`HPolyhedron`). Every question
asked about them (feasibility, dimension, faces, normal cones, nearest
points, set inclusion, covering by a union) is answered exactly with the
rational simplex method of `subjetlab.simplex` and the rational linear
algebra of `subjetlab.rational`. Conversions between H- and
V-representations (`v_representation`, `from_generators`) use the
double description method of pycddlib with its exact fraction arithmetic.
"""

__all__ = [
    "EMPTY_DIMENSION",
    "Constraint",
    "HPolyhedron",
    "PolyCone",
    "VRepresentation",
    "Projection",
    "EmptyPolyhedronError",
    "NotAFaceError",
    "feasible",
    "dim",
    "relative_interior_point",
    "implicit_equalities",
    "affine_hull",
    "direction_basis",
    "contains",
    "includes",
    "same_set",
    "intersects",
    "faces",
    "face_lattice",
    "is_face",
    "tight_set",
    "normal_cone",
    "tangent_cone",
    "cone_from_generators",
    "project",
    "project_union",
    "v_representation",
    "from_generators",
    "convex_hull",
    "minkowski_translate",
    "minkowski_sum",
    "intersect",
    "product",
    "linear_image",
    "preimage",
    "linear_program",
    "minimum",
    "maximum",
    "chambers",
    "uncovered_point",
    "uncovered_direction",
    "covered_by",
    "is_interior_point",
]

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import (
    FrozenSet,
    Iterable,
    List,
    Optional,
    Sequence,
    Tuple,
)

import cdd

from subjetlab.rational import (
    DimensionMismatchError,
    Vector,
    add,
    check_dim,
    dot,
    independent_rows,
    is_zero,
    mat_vec,
    neg,
    norm_sq,
    nullspace,
    primitive,
    rank,
    scale,
    solve_linear,
    sub,
    transpose,
    unit,
    vector,
    zeros,
)
from subjetlab.simplex import (
    LinearProgramResult,
    LinearProgramStatus,
    maximize,
)

EMPTY_DIMENSION = -1
"""Dimension reported for the empty set, standing in for minus infinity."""

Constraint = Tuple[Vector, Fraction]

_ONE, _NOUGHT = (Fraction(1),), (Fraction(0),)


class EmptyPolyhedronError(ValueError):
    """Raised when an operation requires a nonempty polyhedron."""


class NotAFaceError(ValueError):
    """Raised when a polyhedron is not a face of another."""


def _constraint(a: Iterable[Fraction], b: Fraction) -> Constraint:
    return (vector(a), Fraction(b))


@dataclass(frozen=True)
class HPolyhedron:
    """A closed convex polyhedron ``{x : A x <= b, E x = e}``.

    Instances are immutable and hashable, so derived data (relative
    interior, faces, V-representation) is cached per polyhedron.
    """

    ambient_dim: int
    """Dimension ``n`` of the ambient space."""

    inequalities: Tuple[Constraint, ...] = ()
    """Constraints ``(a, b)`` meaning ``a . x <= b``."""

    equalities: Tuple[Constraint, ...] = ()
    """Constraints ``(a, b)`` meaning ``a . x == b``."""

    def __post_init__(self) -> None:
        if self.ambient_dim < 0:
            raise DimensionMismatchError(
                f"Invalid ambient dimension {self.ambient_dim}."
            )
        for name in ("inequalities", "equalities"):
            rows = tuple(_constraint(a, b) for a, b in getattr(self, name))
            for a, _ in rows:
                check_dim(a, self.ambient_dim, "constraint")
            object.__setattr__(self, name, rows)

    @classmethod
    def whole_space(cls, n: int) -> "HPolyhedron":
        """Return ``R^n``."""
        return cls(n)

    @classmethod
    def empty(cls, n: int) -> "HPolyhedron":
        """Return the empty subset of ``R^n``."""
        return cls(n, ((zeros(n), Fraction(-1)),))

    @classmethod
    def point(cls, p: Sequence[Fraction]) -> "HPolyhedron":
        """Return the singleton ``{p}``."""
        n = len(p)
        return cls(n, (), tuple((unit(n, i), p[i]) for i in range(n)))

    @classmethod
    def box(
        cls, lower: Sequence[Fraction], upper: Sequence[Fraction]
    ) -> "HPolyhedron":
        """Return the box ``lower <= x <= upper``."""
        n = len(lower)
        check_dim(upper, n)
        rows: List[Constraint] = []
        for i in range(n):
            rows.append((unit(n, i), Fraction(upper[i])))
            rows.append((neg(unit(n, i)), -Fraction(lower[i])))
        return cls(n, tuple(rows))

    @classmethod
    def orthant(cls, n: int, sign: int = 1) -> "HPolyhedron":
        """Return the nonnegative (``sign=1``) or nonpositive orthant."""
        return cls(
            n,
            tuple(
                (scale(Fraction(-sign), unit(n, i)), Fraction(0))
                for i in range(n)
            ),
        )

    def constrain(
        self,
        inequalities: Iterable[Constraint] = (),
        equalities: Iterable[Constraint] = (),
    ) -> "HPolyhedron":
        """Return the polyhedron with extra constraints."""
        return HPolyhedron(
            self.ambient_dim,
            self.inequalities + tuple(inequalities),
            self.equalities + tuple(equalities),
        )

    @property
    def rows(self) -> List[Vector]:
        """Return every constraint normal (inequalities first)."""
        return [a for a, _ in self.inequalities] + [
            a for a, _ in self.equalities
        ]


class PolyCone(HPolyhedron):
    """A polyhedral cone: every right-hand side is zero."""

    def __post_init__(self) -> None:
        super().__post_init__()
        for _, b in self.inequalities + self.equalities:
            if b != 0:
                raise ValueError(
                    f"Invalid cone constraint with right-hand side {b}."
                )

    @classmethod
    def of(cls, P: HPolyhedron) -> "PolyCone":
        """Return ``P`` as a cone (raises if a right-hand side is nonzero)."""
        return cls(P.ambient_dim, P.inequalities, P.equalities)


@dataclass(frozen=True)
class VRepresentation:
    """Minimal generators: ``P = conv(vertices) + cone(rays) + span(lines)``.

    Vertices and rays are those of ``P`` intersected with the orthogonal
    complement of its lineality space.
    """

    vertices: Tuple[Vector, ...]
    rays: Tuple[Vector, ...]
    lines: Tuple[Vector, ...]


@dataclass(frozen=True)
class Projection:
    """Nearest points of a set to a query point."""

    points: Tuple[Vector, ...]
    distance_sq: Fraction


@dataclass(frozen=True)
class _Analysis:
    implicit: FrozenSet[int]
    relint: Vector
    hull: Tuple[Constraint, ...]


def _check_same_space(P: HPolyhedron, Q: HPolyhedron) -> None:
    if P.ambient_dim != Q.ambient_dim:
        raise DimensionMismatchError(
            f"Polyhedra live in R^{P.ambient_dim} and R^{Q.ambient_dim}."
        )


def linear_program(
    objective: Sequence[Fraction], P: HPolyhedron
) -> LinearProgramResult:
    """Maximize ``objective . x`` over ``P``."""
    check_dim(objective, P.ambient_dim, "objective")
    return maximize(objective, P.inequalities, P.equalities)


def maximum(a: Sequence[Fraction], P: HPolyhedron) -> Optional[Fraction]:
    """Return ``max a . x`` over nonempty ``P``; `None` when unbounded."""
    result = linear_program(a, P)
    if result.status is LinearProgramStatus.INFEASIBLE:
        raise EmptyPolyhedronError("Cannot optimize over an empty set.")
    return result.value


def minimum(a: Sequence[Fraction], P: HPolyhedron) -> Optional[Fraction]:
    """Return ``min a . x`` over nonempty ``P``; `None` when unbounded."""
    value = maximum(neg(a), P)
    return None if value is None else -value


@lru_cache(maxsize=None)
def _analyze(P: HPolyhedron) -> Optional[_Analysis]:
    """Find implicit equalities and a relative interior point.

    Repeatedly maximizes the total slack ``sum t_i`` (``0 <= t_i <= 1``)
    of the inequalities not yet known to be strict somewhere; the loop
    stops when no further inequality can be made strict.
    """
    n = P.ambient_dim
    m = len(P.inequalities)
    candidates = list(range(m))
    points: List[Vector] = []
    while True:
        k = len(candidates)
        position = {i: j for j, i in enumerate(candidates)}
        inequalities: List[Tuple[Vector, Fraction]] = []
        for i, (a, b) in enumerate(P.inequalities):
            slack = [Fraction(0)] * k
            if i in position:
                slack[position[i]] = Fraction(1)
            inequalities.append((a + tuple(slack), b))
        for j in range(k):
            inequalities.append((zeros(n) + unit(k, j), Fraction(1)))
            inequalities.append((zeros(n) + neg(unit(k, j)), Fraction(0)))
        equalities = [(a + zeros(k), b) for a, b in P.equalities]
        objective = zeros(n) + tuple(Fraction(1) for _ in range(k))
        result = maximize(objective, inequalities, equalities)
        if result.status is LinearProgramStatus.INFEASIBLE:
            return None
        assert result.point is not None
        points.append(result.point[:n])
        slacks = result.point[n:]
        strict = {candidates[j] for j in range(k) if slacks[j] > 0}
        if not strict:
            break
        candidates = [i for i in candidates if i not in strict]
        if not candidates:
            break
    count = Fraction(len(points))
    relint = tuple(
        sum((p[j] for p in points), Fraction(0)) / count for j in range(n)
    )
    implicit = frozenset(candidates)
    hull = tuple(P.equalities) + tuple(
        P.inequalities[i] for i in sorted(implicit)
    )
    return _Analysis(implicit, relint, hull)


def _analysis(P: HPolyhedron) -> _Analysis:
    analysis = _analyze(P)
    if analysis is None:
        raise EmptyPolyhedronError("The polyhedron is empty.")
    return analysis


def feasible(P: HPolyhedron) -> bool:
    """Return `True` iff ``P`` is nonempty.

    Examples
    --------
    >>> from fractions import Fraction as F
    >>> feasible(HPolyhedron(1, (((F(1),), F(1)), ((F(-1),), F(-2)))))
    False
    """
    return _analyze(P) is not None


def dim(P: HPolyhedron) -> int:
    """Return the dimension of the affine hull of ``P``.

    The empty set has dimension `EMPTY_DIMENSION`.
    """
    analysis = _analyze(P)
    if analysis is None:
        return EMPTY_DIMENSION
    rows = [a for a, _ in analysis.hull]
    return P.ambient_dim - rank(rows, P.ambient_dim)


def relative_interior_point(P: HPolyhedron) -> Vector:
    """Return a rational point of the relative interior of ``P``."""
    return _analysis(P).relint


def implicit_equalities(P: HPolyhedron) -> FrozenSet[int]:
    """Return indices of the inequalities that hold with equality on ``P``."""
    return _analysis(P).implicit


def affine_hull(P: HPolyhedron) -> Tuple[Constraint, ...]:
    """Return independent equations ``a . x = b`` of the affine hull."""
    hull = _analysis(P).hull
    keep = independent_rows([a for a, _ in hull], P.ambient_dim)
    return tuple(hull[i] for i in keep)


def direction_basis(P: HPolyhedron) -> List[Vector]:
    """Return a basis of the direction space of the affine hull of ``P``."""
    return nullspace([a for a, _ in affine_hull(P)], P.ambient_dim)


def contains(P: HPolyhedron, x: Sequence[Fraction]) -> bool:
    """Return `True` iff ``x`` lies in ``P`` (exact)."""
    check_dim(x, P.ambient_dim, "point")
    return all(dot(a, x) <= b for a, b in P.inequalities) and all(
        dot(a, x) == b for a, b in P.equalities
    )


def includes(P: HPolyhedron, Q: HPolyhedron) -> bool:
    """Return `True` iff ``Q`` is a subset of ``P``."""
    _check_same_space(P, Q)
    if not feasible(Q):
        return True
    for a, b in P.inequalities:
        value = maximum(a, Q)
        if value is None or value > b:
            return False
    for a, b in P.equalities:
        high = maximum(a, Q)
        low = minimum(a, Q)
        if high != b or low != b:
            return False
    return True


def same_set(P: HPolyhedron, Q: HPolyhedron) -> bool:
    """Return `True` iff ``P`` and ``Q`` represent the same set."""
    return includes(P, Q) and includes(Q, P)


def intersect(P: HPolyhedron, Q: HPolyhedron) -> HPolyhedron:
    """Return ``P`` intersected with ``Q``.

    Examples
    --------
    >>> from fractions import Fraction as F
    >>> P = HPolyhedron(1, (((F(-1),), F(1)),))
    >>> Q = HPolyhedron(1, (((F(1),), F(1)),))
    >>> dim(intersect(P, Q))
    1
    """
    _check_same_space(P, Q)
    return P.constrain(Q.inequalities, Q.equalities)


def intersects(P: HPolyhedron, Q: HPolyhedron) -> bool:
    """Return `True` iff ``P`` and ``Q`` have a common point."""
    return feasible(intersect(P, Q))


def _tight_system(P: HPolyhedron, tight: Iterable[int]) -> HPolyhedron:
    """Keep every inequality (stable indices) and add the tight ones as
    equalities.
    """
    return P.constrain(
        (), tuple(P.inequalities[i] for i in sorted(set(tight)))
    )


def _face_from_tight(P: HPolyhedron, tight: FrozenSet[int]) -> HPolyhedron:
    return HPolyhedron(
        P.ambient_dim,
        tuple(c for i, c in enumerate(P.inequalities) if i not in tight),
        P.equalities + tuple(P.inequalities[i] for i in sorted(tight)),
    )


@lru_cache(maxsize=None)
def face_lattice(
    P: HPolyhedron,
) -> Tuple[Tuple[FrozenSet[int], HPolyhedron], ...]:
    """Return every nonempty face of ``P`` with its (closed) tight set.

    Faces are enumerated breadth first by adding one tight inequality at a
    time; infeasible tight sets are pruned.
    """
    analysis = _analyze(P)
    if analysis is None:
        return ()
    start = analysis.implicit
    seen = {start}
    queue = deque([start])
    lattice: List[Tuple[FrozenSet[int], HPolyhedron]] = []
    while queue:
        tight = queue.popleft()
        lattice.append((tight, _face_from_tight(P, tight)))
        for i in range(len(P.inequalities)):
            if i in tight:
                continue
            sub_analysis = _analyze(_tight_system(P, tight | {i}))
            if sub_analysis is None:
                continue
            closed = sub_analysis.implicit
            if closed not in seen:
                seen.add(closed)
                queue.append(closed)
    return tuple(lattice)


def faces(P: HPolyhedron) -> List[HPolyhedron]:
    """Return all nonempty faces of ``P``, including ``P`` itself.

    Tight inequalities are converted to equalities in each face.
    """
    return [face for _, face in face_lattice(P)]


def tight_set(P: HPolyhedron, F: HPolyhedron) -> FrozenSet[int]:
    """Return indices of inequalities of ``P`` tight on all of ``F``."""
    _check_same_space(P, F)
    m = len(P.inequalities)
    joint = HPolyhedron(
        P.ambient_dim,
        P.inequalities + F.inequalities,
        P.equalities + F.equalities,
    )
    analysis = _analyze(joint)
    if analysis is None:
        raise EmptyPolyhedronError("The face is empty or outside P.")
    return frozenset(i for i in analysis.implicit if i < m)


def is_face(P: HPolyhedron, F: HPolyhedron) -> bool:
    """Return `True` iff ``F`` is a nonempty face of ``P``."""
    if not feasible(F) or not includes(P, F):
        return False
    smallest = _face_from_tight(P, tight_set(P, F))
    return includes(F, smallest)


def cone_from_generators(
    n: int, rays: Sequence[Vector], lines: Sequence[Vector] = ()
) -> PolyCone:
    """Return ``cone(rays) + span(lines)`` in H-representation."""
    P = from_generators(n, [zeros(n)], rays, lines)
    return PolyCone.of(P)


def normal_cone(P: HPolyhedron, F: HPolyhedron) -> PolyCone:
    """Return the normal cone of ``P`` at relative interior points of ``F``.

    It is generated by the outer normals of the inequalities tight on
    ``F`` together with the lines spanned by the equality normals.

    Raises
    ------
    NotAFaceError
        Raised if ``F`` is not a face of ``P``.
    """
    if not is_face(P, F):
        raise NotAFaceError("F is not a face of P.")
    tight = tight_set(P, F)
    rays = [P.inequalities[i][0] for i in sorted(tight)]
    lines = [a for a, _ in P.equalities]
    return cone_from_generators(P.ambient_dim, rays, lines)


def tangent_cone(P: HPolyhedron, x: Sequence[Fraction]) -> PolyCone:
    """Return the tangent cone of ``P`` at a point ``x`` of ``P``."""
    if not contains(P, x):
        raise ValueError("The point does not belong to the polyhedron.")
    return PolyCone(
        P.ambient_dim,
        tuple((a, Fraction(0)) for a, b in P.inequalities if dot(a, x) == b),
        tuple((a, Fraction(0)) for a, _ in P.equalities),
    )


def _affine_projection(
    x: Sequence[Fraction], hull: Sequence[Constraint], n: int
) -> Vector:
    """Project ``x`` onto ``{y : a . y = b}`` (independent rows)."""
    if not hull:
        return tuple(x)
    rows = [a for a, _ in hull]
    gram = [[dot(a, c) for c in rows] for a in rows]
    residual = [dot(a, x) - b for a, b in hull]
    weights = solve_linear(gram, residual, len(rows))
    assert weights is not None
    correction = mat_vec(transpose(rows, n), weights)
    return sub(x, correction)


def project(x: Sequence[Fraction], P: HPolyhedron) -> Projection:
    """Return the nearest point of ``P`` to ``x`` and the squared distance.

    Every face is tried: ``x`` is projected onto the affine hull of the
    face and the candidate is kept if it lies in the face.
    """
    check_dim(x, P.ambient_dim, "point")
    lattice = face_lattice(P)
    if not lattice:
        raise EmptyPolyhedronError("Cannot project onto an empty set.")
    best: Optional[Tuple[Fraction, Vector]] = None
    for _, face in lattice:
        y = _affine_projection(x, affine_hull(face), P.ambient_dim)
        if contains(face, y):
            d = norm_sq(sub(x, y))
            if best is None or d < best[0]:
                best = (d, y)
    assert best is not None
    return Projection((best[1],), best[0])


def project_union(
    x: Sequence[Fraction], pieces: Sequence[HPolyhedron]
) -> Projection:
    """Return the set-valued projection onto a union of polyhedra."""
    projections = [project(x, P) for P in pieces if feasible(P)]
    if not projections:
        raise EmptyPolyhedronError("Cannot project onto an empty union.")
    best = min(p.distance_sq for p in projections)
    points = sorted(
        {p.points[0] for p in projections if p.distance_sq == best}
    )
    return Projection(tuple(points), best)


def _canonical_line(v: Vector) -> Vector:
    v = primitive(v)
    first = next(q for q in v if q != 0)
    return neg(v) if first < 0 else v


def _cdd_matrix(
    rows: Sequence[Vector], linear: Sequence[Vector], rep_type: int
) -> "cdd.Matrix":
    """Return an exact cdd matrix with ``linear`` rows in its linearity set.

    ``rows`` must not be empty: it fixes the column count.
    """
    mat = cdd.Matrix([list(r) for r in rows], number_type="fraction")
    if linear:
        mat.extend([list(r) for r in linear], linear=True)
    mat.rep_type = rep_type
    return mat


def _cdd_rows(mat: "cdd.Matrix") -> Tuple[List[Vector], List[Vector]]:
    """Split the rows of a cdd matrix into ordinary and linearity rows."""
    rows = [tuple(Fraction(q) for q in mat[i]) for i in range(mat.row_size)]
    linear = mat.lin_set
    return (
        [row for i, row in enumerate(rows) if i not in linear],
        [row for i, row in enumerate(rows) if i in linear],
    )


@lru_cache(maxsize=None)
def v_representation(P: HPolyhedron) -> VRepresentation:
    """Return a minimal V-representation of nonempty ``P``.

    The lineality space is split off with exact linear algebra; the
    vertices and extreme rays of the pointed remainder come from the
    double description method of ``cdd`` in rational arithmetic.

    Raises
    ------
    EmptyPolyhedronError
        Raised if ``P`` is empty.
    """
    _analysis(P)
    n = P.ambient_dim
    if n == 0:
        return VRepresentation(((),), (), ())
    lines = [_canonical_line(v) for v in nullspace(P.rows, n)]
    pointed = P.constrain((), tuple((v, Fraction(0)) for v in lines))
    # cdd stores a . x <= b as the row (b, -a)
    mat = _cdd_matrix(
        [_ONE + zeros(n)]
        + [(b,) + neg(a) for a, b in pointed.inequalities],
        [(b,) + neg(a) for a, b in pointed.equalities],
        cdd.RepType.INEQUALITY,
    )
    generators, _ = _cdd_rows(cdd.Polyhedron(mat).get_generators())
    vertices = {scale(1 / g[0], g[1:]) for g in generators if g[0] != 0}
    rays = {
        primitive(g[1:])
        for g in generators
        if g[0] == 0 and not is_zero(g[1:])
    }
    return VRepresentation(
        tuple(sorted(vertices)), tuple(sorted(rays)), tuple(sorted(lines))
    )


def from_generators(
    n: int,
    vertices: Sequence[Vector],
    rays: Sequence[Vector] = (),
    lines: Sequence[Vector] = (),
) -> HPolyhedron:
    """Return ``conv(vertices) + cone(rays) + span(lines)`` as an
    H-polyhedron.

    No vertices means the empty set.
    """
    if not vertices:
        return HPolyhedron.empty(n)
    for g in list(vertices) + list(rays) + list(lines):
        check_dim(g, n, "generator")
    return _from_generators(
        n,
        tuple(sorted(set(vector(v) for v in vertices))),
        tuple(
            sorted(set(primitive(vector(r)) for r in rays if not is_zero(r)))
        ),
        tuple(sorted(set(vector(v) for v in lines if not is_zero(v)))),
    )


@lru_cache(maxsize=None)
def _from_generators(
    n: int,
    vertices: Tuple[Vector, ...],
    rays: Tuple[Vector, ...],
    lines: Tuple[Vector, ...],
) -> HPolyhedron:
    if n == 0:
        return HPolyhedron.whole_space(0)
    mat = _cdd_matrix(
        [_ONE + v for v in vertices] + [_NOUGHT + r for r in rays],
        [_NOUGHT + v for v in lines],
        cdd.RepType.GENERATOR,
    )
    inequalities, equalities = _cdd_rows(
        cdd.Polyhedron(mat).get_inequalities()
    )
    # rows with a zero normal are the trivial 0 <= b
    return HPolyhedron(
        n,
        tuple(
            (neg(row[1:]), row[0])
            for row in inequalities
            if not is_zero(row[1:])
        ),
        tuple(
            (neg(row[1:]), row[0])
            for row in equalities
            if not is_zero(row[1:])
        ),
    )


def convex_hull(points: Sequence[Vector]) -> HPolyhedron:
    """Return the convex hull of finitely many points."""
    if not points:
        raise EmptyPolyhedronError("The convex hull of nothing is empty.")
    return from_generators(len(points[0]), points)


def minkowski_translate(v: Sequence[Fraction], C: HPolyhedron) -> HPolyhedron:
    """Return ``v + C``."""
    check_dim(v, C.ambient_dim)
    return HPolyhedron(
        C.ambient_dim,
        tuple((a, b + dot(a, v)) for a, b in C.inequalities),
        tuple((a, b + dot(a, v)) for a, b in C.equalities),
    )


def product(P: HPolyhedron, Q: HPolyhedron) -> HPolyhedron:
    """Return the Cartesian product ``P x Q``."""
    n, m = P.ambient_dim, Q.ambient_dim
    return HPolyhedron(
        n + m,
        tuple((a + zeros(m), b) for a, b in P.inequalities)
        + tuple((zeros(n) + a, b) for a, b in Q.inequalities),
        tuple((a + zeros(m), b) for a, b in P.equalities)
        + tuple((zeros(n) + a, b) for a, b in Q.equalities),
    )


def minkowski_sum(P: HPolyhedron, Q: HPolyhedron) -> HPolyhedron:
    """Return ``P + Q``."""
    _check_same_space(P, Q)
    n = P.ambient_dim
    if not feasible(P) or not feasible(Q):
        return HPolyhedron.empty(n)
    vp, vq = v_representation(P), v_representation(Q)
    return from_generators(
        n,
        [add(u, w) for u in vp.vertices for w in vq.vertices],
        vp.rays + vq.rays,
        vp.lines + vq.lines,
    )


def linear_image(
    P: HPolyhedron,
    matrix: Sequence[Sequence[Fraction]],
    offset: Optional[Sequence[Fraction]] = None,
) -> HPolyhedron:
    """Return ``{M x + c : x in P}`` for an ``m x n`` matrix ``M``."""
    m = len(matrix)
    for row in matrix:
        check_dim(row, P.ambient_dim, "matrix row")
    c = vector(offset) if offset is not None else zeros(m)
    check_dim(c, m, "offset")
    if not feasible(P):
        return HPolyhedron.empty(m)
    generators = v_representation(P)
    return from_generators(
        m,
        [add(mat_vec(matrix, v), c) for v in generators.vertices],
        [mat_vec(matrix, r) for r in generators.rays],
        [mat_vec(matrix, v) for v in generators.lines],
    )


def preimage(
    P: HPolyhedron,
    matrix: Sequence[Sequence[Fraction]],
    offset: Optional[Sequence[Fraction]] = None,
) -> HPolyhedron:
    """Return ``{x : M x + c in P}`` for an ``m x n`` matrix ``M``."""
    m = P.ambient_dim
    if len(matrix) != m:
        raise DimensionMismatchError(
            f"Matrix has {len(matrix)} rows, expected {m}."
        )
    n = len(matrix[0]) if matrix else 0
    c = vector(offset) if offset is not None else zeros(m)
    mt = transpose(matrix, n)

    def pull(rows: Sequence[Constraint]) -> Tuple[Constraint, ...]:
        return tuple((mat_vec(mt, a), b - dot(a, c)) for a, b in rows)

    return HPolyhedron(n, pull(P.inequalities), pull(P.equalities))


def _strict_point(
    strict: Sequence[Constraint], region: HPolyhedron
) -> Optional[Vector]:
    """Return a point with ``a . x < b`` for every strict constraint and in
    ``region``, or `None`.
    """
    n = region.ambient_dim
    inequalities = [(a + (Fraction(1),), b) for a, b in strict]
    inequalities += [(a + (Fraction(0),), b) for a, b in region.inequalities]
    inequalities.append((zeros(n) + (Fraction(1),), Fraction(1)))
    equalities = [(a + (Fraction(0),), b) for a, b in region.equalities]
    objective = zeros(n) + (Fraction(1),)
    result = maximize(objective, inequalities, equalities)
    if result.status is not LinearProgramStatus.OPTIMAL:
        return None
    assert result.point is not None and result.value is not None
    if result.value <= 0:
        return None
    return result.point[:n]


def chambers(
    hyperplanes: Sequence[Constraint], region: HPolyhedron
) -> List[Tuple[Tuple[int, ...], Vector]]:
    """Enumerate the open chambers of an arrangement inside ``region``.

    Returns
    -------
    chambers : `list` of ``(signs, point)``
        ``signs[k]`` is ``-1`` when ``a_k . x < b_k`` on the chamber and
        ``+1`` when ``a_k . x > b_k``; ``point`` is an interior point.
    """
    cells: List[Tuple[Tuple[int, ...], List[Constraint]]] = [((), [])]
    for a, b in hyperplanes:
        split: List[Tuple[Tuple[int, ...], List[Constraint]]] = []
        for signs, strict in cells:
            for sign in (-1, 1):
                s = Fraction(-sign)
                candidate = strict + [(scale(s, a), s * b)]
                if _strict_point(candidate, region) is not None:
                    split.append((signs + (sign,), candidate))
        cells = split
    result = []
    for signs, strict in cells:
        point = _strict_point(strict, region)
        if point is not None:
            result.append((signs, point))
    return result


def _cuts(Q: HPolyhedron, a: Vector, b: Fraction) -> bool:
    """Whether ``a . x = b`` strictly separates two points of ``Q``."""
    if is_zero(a):
        return False
    high = maximum(a, Q)
    low = minimum(a, Q)
    return (high is None or high > b) and (low is None or low < b)


def uncovered_point(
    Q: HPolyhedron, pieces: Sequence[HPolyhedron]
) -> Optional[Vector]:
    """Return a point of ``Q`` outside every piece, or `None` if ``Q`` is
    covered by their union.

    ``Q`` is split along hyperplanes of the pieces that cut it until every
    part is either inside one piece or meets the pieces only in proper
    faces; the relative interior point of such a part is uncovered.
    """
    if not feasible(Q):
        return None
    touching = [P for P in pieces if intersects(P, Q)]
    if any(includes(P, Q) for P in touching):
        return None
    for P in touching:
        hyperplanes = list(P.inequalities) + list(P.equalities)
        for a, b in hyperplanes:
            if _cuts(Q, a, b):
                below = Q.constrain([(a, b)])
                above = Q.constrain([(neg(a), -b)])
                found = uncovered_point(below, touching)
                if found is not None:
                    return found
                return uncovered_point(above, touching)
    return relative_interior_point(Q)


def covered_by(Q: HPolyhedron, pieces: Sequence[HPolyhedron]) -> bool:
    """Return `True` iff ``Q`` is contained in the union of ``pieces``."""
    for P in pieces:
        _check_same_space(P, Q)
    return uncovered_point(Q, pieces) is None


def uncovered_direction(
    cones: Sequence[HPolyhedron], n: int
) -> Optional[Vector]:
    """Return a nonzero direction outside every cone, or `None` when the
    cones cover ``R^n``.
    """
    if not cones:
        return unit(n, 0) if n > 0 else None
    return uncovered_point(HPolyhedron.whole_space(n), cones)


def is_interior_point(
    x: Sequence[Fraction], pieces: Sequence[HPolyhedron]
) -> bool:
    """Return `True` iff ``x`` is an interior point of the union."""
    cones = [tangent_cone(P, x) for P in pieces if contains(P, x)]
    if not cones:
        return False
    return uncovered_direction(cones, len(x)) is None
