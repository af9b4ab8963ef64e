"""Piecewise-polynomial functions on explicit cell decompositions.

A `PiecewiseFunction` is a list of cells, each a polyhedral region
(optionally cut further by polynomial sign conditions ``q(x) <= 0``)
carrying a polynomial formula. The function is ``+inf`` off the union of
the cells. On the affine tier every formula has degree at most one and
every region is a polyhedron, so all questions are answered exactly.
"""

__all__ = [
    "Polynomial",
    "AdjacencyDeclaration",
    "Cell",
    "PiecewiseFunction",
    "GraphPoint",
    "Violation",
    "ValidationReport",
    "TierError",
    "InconsistentValueError",
    "OutsideCellError",
    "evaluate",
    "gradient_on_cell",
    "validate",
    "refine",
    "min_of_affine",
    "indicator",
    "negate",
    "function_sum",
    "affine_precompose",
    "is_interior_point",
]

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import sympy

from subjetlab import exact_geometry as geo
from subjetlab.exact_geometry import HPolyhedron
from subjetlab.kinds import Tier
from subjetlab.rational import (
    DimensionMismatchError,
    Vector,
    check_dim,
    dot,
    is_zero,
    neg,
    norm_sq,
    sub,
    vector,
    zeros,
)
from subjetlab.special import special_oracle

logger = logging.getLogger("subjetlab")

Exponents = Tuple[int, ...]
ExtendedValue = Union[Fraction, float]


class TierError(ValueError):
    """Raised when an operation does not support the function's tier."""


class InconsistentValueError(RuntimeError):
    """Raised when two cells containing a point disagree on its value."""


class OutsideCellError(ValueError):
    """Raised when a point is outside the closure of a cell."""


@dataclass(frozen=True)
class Polynomial:
    """A polynomial with exact rational coefficients.

    Monomials are stored canonically: merged, sorted by exponent vector,
    without zero coefficients.
    """

    ambient_dim: int
    monomials: Tuple[Tuple[Exponents, Fraction], ...] = ()

    def __post_init__(self) -> None:
        merged: Dict[Exponents, Fraction] = {}
        for exps, coef in self.monomials:
            exps = tuple(int(e) for e in exps)
            check_dim(exps, self.ambient_dim, "exponent vector")
            if any(e < 0 for e in exps):
                raise ValueError(f"Invalid negative exponent in {exps}.")
            merged[exps] = merged.get(exps, Fraction(0)) + Fraction(coef)
        object.__setattr__(
            self,
            "monomials",
            tuple(sorted((e, c) for e, c in merged.items() if c != 0)),
        )

    @classmethod
    def constant(cls, n: int, c: Fraction) -> "Polynomial":
        """Return the constant polynomial ``c``."""
        return cls(n, (((0,) * n, Fraction(c)),))

    @classmethod
    def affine(cls, a: Sequence[Fraction], b: Fraction) -> "Polynomial":
        """Return ``a . x + b``."""
        n = len(a)
        terms = [
            (tuple(1 if j == i else 0 for j in range(n)), Fraction(a[i]))
            for i in range(n)
        ]
        terms.append(((0,) * n, Fraction(b)))
        return cls(n, tuple(terms))

    @property
    def degree(self) -> int:
        """Total degree (zero for the zero polynomial)."""
        return max((sum(e) for e, _ in self.monomials), default=0)

    @property
    def is_affine(self) -> bool:
        """Whether the degree is at most one."""
        return self.degree <= 1

    def affine_parts(self) -> Tuple[Vector, Fraction]:
        """Return ``(a, b)`` with ``p(x) = a . x + b``.

        Raises
        ------
        TierError
            Raised if the polynomial is not affine.
        """
        if not self.is_affine:
            raise TierError(
                f"Polynomial of degree {self.degree} is not affine."
            )
        a = [Fraction(0)] * self.ambient_dim
        b = Fraction(0)
        for exps, coef in self.monomials:
            if sum(exps) == 0:
                b = coef
            else:
                a[exps.index(1)] = coef
        return tuple(a), b

    def evaluate(self, x: Sequence[Fraction]) -> Fraction:
        """Evaluate exactly at a rational point."""
        check_dim(x, self.ambient_dim, "point")
        total = Fraction(0)
        for exps, coef in self.monomials:
            term = coef
            for xi, e in zip(x, exps):
                if e:
                    term *= Fraction(xi) ** e
            total += term
        return total

    def partial(self, i: int) -> "Polynomial":
        """Return the partial derivative in the ``i``-th variable."""
        terms = []
        for exps, coef in self.monomials:
            if exps[i] > 0:
                lowered = exps[:i] + (exps[i] - 1,) + exps[i + 1 :]
                terms.append((lowered, coef * exps[i]))
        return Polynomial(self.ambient_dim, tuple(terms))

    def gradient(self, x: Sequence[Fraction]) -> Vector:
        """Return the exact gradient at ``x``."""
        return tuple(
            self.partial(i).evaluate(x) for i in range(self.ambient_dim)
        )

    def scale(self, t: Fraction) -> "Polynomial":
        """Return ``t * p``."""
        return Polynomial(
            self.ambient_dim, tuple((e, t * c) for e, c in self.monomials)
        )

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if other.ambient_dim != self.ambient_dim:
            raise DimensionMismatchError(
                "Polynomials live in different spaces."
            )
        return Polynomial(self.ambient_dim, self.monomials + other.monomials)

    def __neg__(self) -> "Polynomial":
        return self.scale(Fraction(-1))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def compose_affine(
        self, matrix: Sequence[Sequence[Fraction]], offset: Sequence[Fraction]
    ) -> "Polynomial":
        """Return ``x -> p(M x + c)`` for an ``m x n`` matrix ``M``."""
        if len(matrix) != self.ambient_dim:
            raise DimensionMismatchError(
                f"Matrix has {len(matrix)} rows, expected {self.ambient_dim}."
            )
        n = len(matrix[0]) if matrix else 0
        xs = sympy.symbols(f"x0:{n}") if n else ()
        image = [
            sum(
                (sympy.Rational(q.numerator, q.denominator) * xs[k])
                for k, q in enumerate(row)
            )
            + sympy.Rational(offset[j].numerator, offset[j].denominator)
            for j, row in enumerate(matrix)
        ]
        expr = sympy.Integer(0)
        for exps, coef in self.monomials:
            term = sympy.Rational(coef.numerator, coef.denominator)
            for y, e in zip(image, exps):
                term *= y**e
            expr += term
        expr = sympy.expand(expr)
        if n == 0:
            value = sympy.Rational(expr)
            return Polynomial.constant(0, Fraction(int(value.p), int(value.q)))
        poly = sympy.Poly(expr, *xs)
        terms = []
        for exps, coef in poly.terms():
            rational = sympy.Rational(coef)
            terms.append(
                (tuple(exps), Fraction(int(rational.p), int(rational.q)))
            )
        return Polynomial(n, tuple(terms))


@dataclass(frozen=True)
class AdjacencyDeclaration:
    """A declared sequence of cell points converging to a query point."""

    point: Vector
    witness_seq: Tuple[Vector, ...]


@dataclass(frozen=True)
class Cell:
    """A region carrying a polynomial formula.

    The region is the polyhedron ``region`` intersected with the sign
    conditions ``q(x) <= 0`` for ``q`` in ``sign`` (polynomial tier only).
    """

    region: HPolyhedron
    formula: Polynomial
    sign: Tuple[Polynomial, ...] = ()
    adjacency: Tuple[AdjacencyDeclaration, ...] = ()

    def __post_init__(self) -> None:
        n = self.region.ambient_dim
        for p in (self.formula,) + self.sign:
            if p.ambient_dim != n:
                raise DimensionMismatchError(
                    f"Cell polynomial lives in R^{p.ambient_dim}, "
                    f"expected R^{n}."
                )

    @property
    def ambient_dim(self) -> int:
        """Dimension of the ambient space."""
        return self.region.ambient_dim

    def contains(self, x: Sequence[Fraction]) -> bool:
        """Whether ``x`` lies in the (closed) cell."""
        return geo.contains(self.region, x) and all(
            q.evaluate(x) <= 0 for q in self.sign
        )

    def strictly_contains(self, x: Sequence[Fraction]) -> bool:
        """Whether every inequality of the cell is strict at ``x``."""
        return (
            all(dot(a, x) < b for a, b in self.region.inequalities)
            and all(dot(a, x) == b for a, b in self.region.equalities)
            and all(q.evaluate(x) < 0 for q in self.sign)
        )

    def adjacency_at(
        self, point: Sequence[Fraction]
    ) -> Optional[AdjacencyDeclaration]:
        """Return the adjacency declaration made at ``point``, if any."""
        for declaration in self.adjacency:
            if declaration.point == tuple(point):
                return declaration
        return None


@dataclass(frozen=True)
class PiecewiseFunction:
    """A piecewise-polynomial extended-real-valued function."""

    name: str
    ambient_dim: int
    tier: Tier
    cells: Tuple[Cell, ...]
    special_oracle: Optional[str] = None

    def __post_init__(self) -> None:
        for cell in self.cells:
            if cell.ambient_dim != self.ambient_dim:
                raise DimensionMismatchError(
                    f"Cell lives in R^{cell.ambient_dim}, "
                    f"expected R^{self.ambient_dim}."
                )
            if self.tier is Tier.AFFINE and (
                cell.sign or not cell.formula.is_affine
            ):
                raise TierError(
                    f"Affine-tier function '{self.name}' has a polynomial "
                    "cell."
                )

    @property
    def regions(self) -> List[HPolyhedron]:
        """The polyhedral parts of the cells."""
        return [cell.region for cell in self.cells]

    def cells_containing(self, x: Sequence[Fraction]) -> List[int]:
        """Indices of cells whose closure contains ``x``."""
        return [i for i, c in enumerate(self.cells) if c.contains(x)]

    def declared_points(self) -> List[Vector]:
        """Points at which adjacency is declared (polynomial tier)."""
        points: List[Vector] = []
        for cell in self.cells:
            for declaration in cell.adjacency:
                if declaration.point not in points:
                    points.append(declaration.point)
        return points


@dataclass(frozen=True)
class GraphPoint:
    """A triple ``(x, f(x), v)`` of a subjet."""

    x: Vector
    fx: ExtendedValue
    v: Vector

    @property
    def pair(self) -> Vector:
        """The graph point ``(x, v)``."""
        return self.x + self.v


def evaluate(f: PiecewiseFunction, x: Sequence[Fraction]) -> ExtendedValue:
    """Return ``f(x)``, or ``math.inf`` off the domain.

    Raises
    ------
    InconsistentValueError
        Raised if two cells containing ``x`` disagree.
    """
    check_dim(x, f.ambient_dim, "point")
    if f.special_oracle:
        return special_oracle(f.special_oracle).evaluate(x)
    values = {f.cells[i].formula.evaluate(x) for i in f.cells_containing(x)}
    if not values:
        return math.inf
    if len(values) > 1:
        raise InconsistentValueError(
            f"Cells of '{f.name}' disagree at {list(map(str, x))}: "
            f"{sorted(map(str, values))}."
        )
    return values.pop()


def gradient_on_cell(cell: Cell, x: Sequence[Fraction]) -> Vector:
    """Return the gradient of the cell formula at ``x`` in the cell."""
    if not cell.contains(x):
        raise OutsideCellError(
            f"Point {list(map(str, x))} is outside the cell closure."
        )
    return cell.formula.gradient(x)


@dataclass
class Violation:
    """One failed validation check."""

    check: str
    message: str
    witness: Optional[Vector] = None


@dataclass
class ValidationReport:
    """Outcome of `validate`."""

    name: str
    checks: Dict[str, bool] = field(default_factory=dict)
    violations: List[Violation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """Whether every check passed."""
        return all(self.checks.values())

    def record(self, check: str, violations: List[Violation]) -> None:
        """Record the outcome of one check."""
        self.checks[check] = not violations
        self.violations.extend(violations)


def _properness(f: PiecewiseFunction) -> List[Violation]:
    violations = [
        Violation("properness", f"cell {i} is empty")
        for i, cell in enumerate(f.cells)
        if not geo.feasible(cell.region)
    ]
    if not f.cells:
        violations.append(Violation("properness", "the domain is empty"))
    return violations


def _affine_disjointness(f: PiecewiseFunction) -> List[Violation]:
    n = f.ambient_dim
    full = [i for i, c in enumerate(f.cells) if geo.dim(c.region) == n]
    violations = []
    for k, i in enumerate(full):
        for j in full[k + 1 :]:
            common = geo.intersect(f.cells[i].region, f.cells[j].region)
            if geo.dim(common) == n:
                violations.append(
                    Violation(
                        "interior_disjointness",
                        f"cells {i} and {j} overlap",
                        geo.relative_interior_point(common),
                    )
                )
    return violations


def _affine_continuity(f: PiecewiseFunction) -> List[Violation]:
    violations = []
    cells = f.cells
    for i in range(len(cells)):
        for j in range(i + 1, len(cells)):
            common = geo.intersect(cells[i].region, cells[j].region)
            if not geo.feasible(common):
                continue
            a, b = (cells[i].formula - cells[j].formula).affine_parts()
            generators = geo.v_representation(common)
            bad_vertex = next(
                (v for v in generators.vertices if dot(a, v) + b != 0), None
            )
            bad_direction = any(
                dot(a, r) != 0 for r in generators.rays + generators.lines
            )
            if bad_vertex is not None or bad_direction:
                witness = bad_vertex or geo.relative_interior_point(common)
                violations.append(
                    Violation(
                        "continuity",
                        f"cells {i} and {j} disagree on their common face",
                        witness,
                    )
                )
    return violations


def _affine_lsc(f: PiecewiseFunction) -> List[Violation]:
    """Compare the value at every face generator with the cell limits."""
    violations = []
    for i, cell in enumerate(f.cells):
        if not geo.feasible(cell.region):
            continue
        generators = geo.v_representation(cell.region)
        points = list(generators.vertices) + [
            geo.relative_interior_point(face)
            for face in geo.faces(cell.region)
        ]
        for p in points:
            try:
                value = evaluate(f, p)
            except InconsistentValueError:
                violations.append(
                    Violation("lsc", f"no consistent value near cell {i}", p)
                )
                continue
            if value > cell.formula.evaluate(p):
                violations.append(
                    Violation(
                        "lsc", f"value jumps up at the boundary of {i}", p
                    )
                )
    return violations


def _declared_adjacency(
    f: PiecewiseFunction, tolerance: float
) -> List[Violation]:
    violations = []
    for i, cell in enumerate(f.cells):
        for declaration in cell.adjacency:
            p = declaration.point
            distances = [norm_sq(sub(q, p)) for q in declaration.witness_seq]
            outside = [
                q
                for q in declaration.witness_seq
                if not cell.strictly_contains(q)
            ]
            if outside:
                violations.append(
                    Violation(
                        "adjacency",
                        f"witness of cell {i} is not interior",
                        outside[0],
                    )
                )
            decreasing = all(
                later < earlier
                for earlier, later in zip(distances, distances[1:])
            )
            if (
                not distances
                or not decreasing
                or math.sqrt(distances[-1]) >= tolerance
            ):
                violations.append(
                    Violation(
                        "adjacency",
                        f"witness sequence of cell {i} does not converge",
                        p,
                    )
                )
    return violations


def _polynomial_disjointness(f: PiecewiseFunction) -> List[Violation]:
    violations = []
    for i, cell in enumerate(f.cells):
        for declaration in cell.adjacency:
            for q in declaration.witness_seq:
                for j, other in enumerate(f.cells):
                    if j != i and other.strictly_contains(q):
                        violations.append(
                            Violation(
                                "interior_disjointness",
                                f"cells {i} and {j} overlap",
                                q,
                            )
                        )
    return violations


def _polynomial_continuity(f: PiecewiseFunction) -> List[Violation]:
    violations = []
    points = list(f.declared_points())
    for cell in f.cells:
        for declaration in cell.adjacency:
            points.extend(declaration.witness_seq)
    for p in points:
        try:
            evaluate(f, p)
        except InconsistentValueError as e:
            violations.append(Violation("continuity", str(e), p))
    return violations


def validate(
    f: PiecewiseFunction, adjacency_tolerance: float = 1e-9
) -> ValidationReport:
    """Check properness, disjointness, continuity and lsc.

    Violations are returned as report entries with witness points.
    """
    report = ValidationReport(f.name)
    if f.special_oracle:
        oracle = special_oracle(f.special_oracle)
        report.record("properness", [])
        report.record(
            "lsc",
            [
                Violation("lsc", message, witness)
                for message, witness in oracle.lsc_violations()
            ],
        )
        return report
    report.record("properness", _properness(f))
    if f.tier is Tier.AFFINE:
        report.record("interior_disjointness", _affine_disjointness(f))
        report.record("continuity", _affine_continuity(f))
        report.record("lsc", _affine_lsc(f))
    else:
        report.record(
            "adjacency", _declared_adjacency(f, adjacency_tolerance)
        )
        report.record("interior_disjointness", _polynomial_disjointness(f))
        continuity = _polynomial_continuity(f)
        report.record("continuity", continuity)
        report.record(
            "lsc",
            [Violation("lsc", v.message, v.witness) for v in continuity],
        )
    logger.info(
        f"Validated '{f.name}': "
        f"{'pass' if report.passed else 'FAIL'} "
        f"({len(report.violations)} violations)."
    )
    return report


def _cutting_hyperplane(
    C: HPolyhedron, D: HPolyhedron
) -> Optional[Tuple[Vector, Fraction]]:
    """Return a hyperplane of ``D`` strictly separating points of ``C``."""
    for a, b in D.inequalities + D.equalities:
        if is_zero(a):
            continue
        high = geo.maximum(a, C)
        low = geo.minimum(a, C)
        if (high is None or high > b) and (low is None or low < b):
            return a, b
    return None


def _split_once(cells: List[Cell]) -> Optional[List[Cell]]:
    for i, C in enumerate(cells):
        for j, D in enumerate(cells):
            if i == j:
                continue
            common = geo.intersect(C.region, D.region)
            if not geo.feasible(common) or geo.is_face(C.region, common):
                continue
            cut = _cutting_hyperplane(C.region, D.region)
            if cut is None:
                continue
            a, b = cut
            halves = [
                replace(C, region=C.region.constrain([(a, b)])),
                replace(C, region=C.region.constrain([(neg(a), -b)])),
            ]
            return cells[:i] + halves + cells[i + 1 :]
    return None


def refine(f: PiecewiseFunction) -> PiecewiseFunction:
    """Return a face-to-face refinement of an affine-tier function.

    Cells are split along hyperplanes of their neighbours until every
    pairwise intersection is a face of both cells.

    Raises
    ------
    TierError
        Raised for polynomial-tier functions.
    """
    if f.tier is not Tier.AFFINE or f.special_oracle:
        raise TierError(f"Cannot refine '{f.name}': affine tier only.")
    cells = [c for c in f.cells if geo.feasible(c.region)]
    splits = 0
    while True:
        split = _split_once(cells)
        if split is None:
            break
        cells = split
        splits += 1
    if splits:
        logger.debug(f"Refined '{f.name}' with {splits} splits.")
    return replace(f, cells=tuple(cells))


def _drop_covered_cells(cells: List[Cell]) -> List[Cell]:
    """Drop nonempty cells contained in another kept cell."""
    cells = [c for c in cells if geo.feasible(c.region)]
    kept: List[Cell] = []
    for i, cell in enumerate(cells):
        covered = False
        for j, other in enumerate(cells):
            if i == j or not geo.includes(other.region, cell.region):
                continue
            # keep the first of two equal regions
            if not geo.includes(cell.region, other.region) or j < i:
                covered = True
                break
        if not covered:
            kept.append(cell)
    return kept


def min_of_affine(
    pieces: Sequence[Tuple[Sequence[Fraction], Fraction]], name: str = "min"
) -> PiecewiseFunction:
    """Return ``x -> min_k a_k . x + b_k`` on its linearity cells.

    Examples
    --------
    >>> from fractions import Fraction as F
    >>> f = min_of_affine([((F(1),), F(0)), ((F(-1),), F(0))])
    >>> evaluate(f, (F(-3),))
    Fraction(-3, 1)
    """
    if not pieces:
        raise ValueError("min_of_affine needs at least one affine function.")
    n = len(pieces[0][0])
    unique: List[Tuple[Vector, Fraction]] = []
    for a, b in pieces:
        check_dim(a, n)
        entry = (vector(a), Fraction(b))
        if entry not in unique:
            unique.append(entry)
    cells = []
    for i, (a, b) in enumerate(unique):
        rows = [
            (sub(a, c), d - b) for j, (c, d) in enumerate(unique) if j != i
        ]
        region = HPolyhedron(n, tuple(rows))
        if geo.dim(region) == n:
            cells.append(Cell(region, Polynomial.affine(a, b)))
    return PiecewiseFunction(name, n, Tier.AFFINE, tuple(cells))


def indicator(P: HPolyhedron, name: str = "indicator") -> PiecewiseFunction:
    """Return the indicator function of a polyhedron."""
    n = P.ambient_dim
    return PiecewiseFunction(
        name,
        n,
        Tier.AFFINE,
        (Cell(P, Polynomial.constant(n, Fraction(0))),),
    )


def negate(
    f: PiecewiseFunction, name: Optional[str] = None
) -> PiecewiseFunction:
    """Return ``-f`` on the domain of ``f`` (``+inf`` elsewhere)."""
    if f.special_oracle:
        raise TierError("Special fixtures cannot be negated.")
    cells = tuple(replace(c, formula=-c.formula) for c in f.cells)
    return replace(f, name=name or f"neg({f.name})", cells=cells)


def function_sum(
    f: PiecewiseFunction, g: PiecewiseFunction, name: Optional[str] = None
) -> PiecewiseFunction:
    """Return ``f + g`` on the common refinement of the two complexes."""
    if f.ambient_dim != g.ambient_dim:
        raise DimensionMismatchError(
            f"Cannot add functions on R^{f.ambient_dim} and R^{g.ambient_dim}."
        )
    if f.tier is not Tier.AFFINE or g.tier is not Tier.AFFINE:
        raise TierError("function_sum supports the affine tier only.")
    cells = [
        Cell(geo.intersect(c.region, d.region), c.formula + d.formula)
        for c in f.cells
        for d in g.cells
    ]
    return PiecewiseFunction(
        name or f"{f.name}+{g.name}",
        f.ambient_dim,
        Tier.AFFINE,
        tuple(_drop_covered_cells(cells)),
    )


def affine_precompose(
    g: PiecewiseFunction,
    matrix: Sequence[Sequence[Fraction]],
    offset: Optional[Sequence[Fraction]] = None,
    name: Optional[str] = None,
) -> PiecewiseFunction:
    """Return ``x -> g(M x + c)`` for an ``m x n`` matrix ``M``."""
    if len(matrix) != g.ambient_dim:
        raise DimensionMismatchError(
            f"Matrix has {len(matrix)} rows, expected {g.ambient_dim}."
        )
    if g.tier is not Tier.AFFINE or g.special_oracle:
        raise TierError("affine_precompose supports the affine tier only.")
    n = len(matrix[0]) if matrix else 0
    c = vector(offset) if offset is not None else zeros(g.ambient_dim)
    cells = [
        Cell(
            geo.preimage(cell.region, matrix, c),
            cell.formula.compose_affine(matrix, c),
        )
        for cell in g.cells
    ]
    return PiecewiseFunction(
        name or f"{g.name}(Ax+c)",
        n,
        Tier.AFFINE,
        tuple(_drop_covered_cells(cells)),
    )


def is_interior_point(f: PiecewiseFunction, x: Sequence[Fraction]) -> bool:
    """Whether ``x`` is an interior point of ``dom f`` (affine tier)."""
    if f.special_oracle:
        return special_oracle(f.special_oracle).is_domain_interior(x)
    if f.tier is not Tier.AFFINE:
        raise TierError("Domain interior is exact on the affine tier only.")
    return geo.is_interior_point(x, f.regions)
