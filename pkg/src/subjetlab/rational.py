"""Exact rational scalars, vectors and matrices.

Scalars are `fractions.Fraction` instances, always in canonical form.
Vectors are tuples of fractions so that they can be hashed and cached.
Linear algebra (rank, null space, reduced row echelon form) is delegated
to `sympy` matrices over the rationals.
"""

__all__ = [
    "Vector",
    "Matrix",
    "RationalFormatError",
    "DimensionMismatchError",
    "parse_rational",
    "format_rational",
    "parse_vector",
    "format_vector",
    "parse_matrix",
    "vector",
    "zeros",
    "unit",
    "dot",
    "add",
    "sub",
    "scale",
    "neg",
    "norm_sq",
    "max_norm",
    "is_zero",
    "mat_vec",
    "transpose",
    "check_dim",
    "rank",
    "nullspace",
    "independent_rows",
    "solve_linear",
    "primitive",
    "to_floats",
]

import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import sympy

Vector = Tuple[Fraction, ...]
Matrix = Tuple[Vector, ...]
RationalLike = Union[str, int, Fraction]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


class RationalFormatError(ValueError):
    """Raised when a rational number cannot be parsed."""


class DimensionMismatchError(ValueError):
    """Raised when vectors or matrices have incompatible shapes."""


def parse_rational(value: RationalLike) -> Fraction:
    """Parse a rational written as ``"p/q"`` or ``"p"``.

    Parameters
    ----------
    value : `str`, `int` or `fractions.Fraction`
        The value to parse. Integers and fractions are passed through.

    Returns
    -------
    q : `fractions.Fraction`
        The rational in canonical form.

    Raises
    ------
    RationalFormatError
        Raised if the string is malformed or has a zero denominator.

    Examples
    --------
    >>> parse_rational("-6/4")
    Fraction(-3, 2)
    """
    if isinstance(value, bool):
        raise RationalFormatError(f"Invalid rational '{value}'.")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if not isinstance(value, str):
        raise RationalFormatError(
            f"Invalid rational '{value}': expected a string 'p/q'."
        )
    match = _RATIONAL_RE.match(value)
    if not match:
        raise RationalFormatError(f"Invalid rational '{value}'.")
    numerator, denominator = match.groups()
    if denominator is not None and int(denominator) == 0:
        raise RationalFormatError(
            f"Invalid rational '{value}': zero denominator."
        )
    return Fraction(int(numerator), int(denominator or 1))


def format_rational(q: Fraction) -> str:
    """Format a rational as ``"p/q"``, or ``"p"`` when ``q == 1``."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_vector(text: Union[str, Sequence[RationalLike]]) -> Vector:
    """Parse a comma separated list of rationals (or a sequence of them)."""
    if isinstance(text, str):
        items: Sequence[RationalLike] = [
            t for t in text.replace(" ", "").split(",") if t != ""
        ]
    else:
        items = text
    return tuple(parse_rational(t) for t in items)


def format_vector(v: Iterable[Fraction]) -> List[str]:
    """Format a vector as a list of rational strings."""
    return [format_rational(q) for q in v]


def parse_matrix(text: str, rows: int, cols: int) -> Matrix:
    """Parse a row-major comma separated matrix of the given shape."""
    entries = parse_vector(text)
    if len(entries) != rows * cols:
        raise DimensionMismatchError(
            f"Expected {rows * cols} matrix entries, got {len(entries)}."
        )
    return tuple(
        tuple(entries[i * cols : (i + 1) * cols]) for i in range(rows)
    )


def vector(values: Iterable[RationalLike]) -> Vector:
    """Return ``values`` as an exact vector."""
    return tuple(parse_rational(v) for v in values)


def zeros(n: int) -> Vector:
    """Return the zero vector of length ``n``."""
    return tuple(Fraction(0) for _ in range(n))


def unit(n: int, i: int) -> Vector:
    """Return the ``i``-th unit vector of length ``n``."""
    return tuple(Fraction(1 if j == i else 0) for j in range(n))


def check_dim(v: Sequence[Fraction], n: int, what: str = "vector") -> None:
    """Raise `DimensionMismatchError` unless ``len(v) == n``."""
    if len(v) != n:
        raise DimensionMismatchError(
            f"Invalid {what} length {len(v)}, expected {n}."
        )


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    """Return the inner product of two vectors."""
    if len(a) != len(b):
        raise DimensionMismatchError(
            f"Cannot multiply vectors of lengths {len(a)} and {len(b)}."
        )
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def add(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vector:
    """Return ``a + b``."""
    check_dim(b, len(a))
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vector:
    """Return ``a - b``."""
    check_dim(b, len(a))
    return tuple(x - y for x, y in zip(a, b))


def scale(t: Fraction, a: Sequence[Fraction]) -> Vector:
    """Return ``t * a``."""
    return tuple(t * x for x in a)


def neg(a: Sequence[Fraction]) -> Vector:
    """Return ``-a``."""
    return tuple(-x for x in a)


def norm_sq(a: Sequence[Fraction]) -> Fraction:
    """Return the squared Euclidean norm."""
    return dot(a, a)


def max_norm(a: Sequence[Fraction]) -> Fraction:
    """Return the max-norm (zero for the empty vector)."""
    return max((abs(x) for x in a), default=Fraction(0))


def is_zero(a: Sequence[Fraction]) -> bool:
    """Return `True` if every entry is zero."""
    return all(x == 0 for x in a)


def mat_vec(
    rows: Sequence[Sequence[Fraction]], x: Sequence[Fraction]
) -> Vector:
    """Return the matrix-vector product."""
    return tuple(dot(row, x) for row in rows)


def transpose(rows: Sequence[Sequence[Fraction]], ncols: int) -> Matrix:
    """Return the transpose of a matrix with ``ncols`` columns."""
    return tuple(
        tuple(Fraction(row[j]) for row in rows) for j in range(ncols)
    )


def to_floats(v: Iterable[Fraction]) -> List[float]:
    """Convert a vector to floats (reports and the numeric oracle only)."""
    return [float(q) for q in v]


def _to_sympy(rows: Sequence[Sequence[Fraction]], ncols: int) -> sympy.Matrix:
    if not rows:
        return sympy.zeros(0, ncols)
    return sympy.Matrix(
        [
            [sympy.Rational(q.numerator, q.denominator) for q in row]
            for row in rows
        ]
    )


def _from_sympy(value: sympy.Expr) -> Fraction:
    rational = sympy.Rational(value)
    return Fraction(int(rational.p), int(rational.q))


def _freeze(rows: Sequence[Sequence[Fraction]]) -> Matrix:
    return tuple(tuple(Fraction(q) for q in row) for row in rows)


def rank(rows: Sequence[Sequence[Fraction]], ncols: int) -> int:
    """Return the rank of a matrix given by its rows."""
    return _rank(_freeze(rows), ncols)


@lru_cache(maxsize=4096)
def _rank(rows: Matrix, ncols: int) -> int:
    if not rows or ncols == 0:
        return 0
    return int(_to_sympy(rows, ncols).rank())


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> List[Vector]:
    """Return a basis of ``{x : row . x = 0 for every row}``.

    The basis vectors are scaled to primitive integer vectors.
    """
    return list(_nullspace(_freeze(rows), ncols))


@lru_cache(maxsize=4096)
def _nullspace(rows: Matrix, ncols: int) -> Tuple[Vector, ...]:
    if not rows:
        return tuple(unit(ncols, i) for i in range(ncols))
    basis = _to_sympy(rows, ncols).nullspace()
    return tuple(
        primitive(tuple(_from_sympy(x) for x in column)) for column in basis
    )


def independent_rows(
    rows: Sequence[Sequence[Fraction]], ncols: int
) -> List[int]:
    """Return indices of a maximal linearly independent subset of rows.

    The first independent rows in order are kept.
    """
    if not rows:
        return []
    _, pivots = _to_sympy(rows, ncols).T.rref()
    return [int(p) for p in pivots]


def solve_linear(
    rows: Sequence[Sequence[Fraction]],
    rhs: Sequence[Fraction],
    ncols: int,
) -> Optional[Vector]:
    """Return one solution of ``rows x = rhs``, or `None` if inconsistent.

    Free variables are set to zero.
    """
    if len(rows) != len(rhs):
        raise DimensionMismatchError(
            f"{len(rows)} equations but {len(rhs)} right-hand sides."
        )
    if not rows:
        return zeros(ncols)
    augmented = [list(row) + [rhs[i]] for i, row in enumerate(rows)]
    reduced, pivots = _to_sympy(augmented, ncols + 1).rref()
    if ncols in pivots:
        return None
    solution = [Fraction(0)] * ncols
    for i, column in enumerate(pivots):
        solution[column] = _from_sympy(reduced[i, ncols])
    return tuple(solution)


def primitive(v: Sequence[Fraction]) -> Vector:
    """Return the positive multiple of ``v`` with coprime integer entries."""
    if is_zero(v):
        return tuple(Fraction(0) for _ in v)
    common = 1
    for q in v:
        common = common * q.denominator // math.gcd(common, q.denominator)
    integers = [int(q * common) for q in v]
    divisor = 0
    for k in integers:
        divisor = math.gcd(divisor, abs(k))
    return tuple(Fraction(k // divisor) for k in integers)
