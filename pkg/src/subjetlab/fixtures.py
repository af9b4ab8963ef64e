"""Fixture files: JSON schema, loading and saving.

Fixtures are JSON documents validated by the pydantic models below.
Rationals are written as strings ``"p/q"`` (or ``"p"``), so every number
round-trips exactly.
"""

__all__ = [
    "FixtureError",
    "MonomialModel",
    "PolynomialModel",
    "ConstraintModel",
    "AdjacencyModel",
    "CellModel",
    "PullbackModel",
    "DocumentedViolationModel",
    "FixtureModel",
    "AffineMap",
    "DocumentedViolation",
    "Fixture",
    "load_fixture",
    "load_fixture_entry",
    "save_fixture",
    "fixture_to_dict",
    "fixture_digest",
    "resolve_fixture_path",
    "corpus_paths",
]

import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ValidationError, root_validator, validator

from subjetlab.exact_geometry import HPolyhedron
from subjetlab.kinds import SubdiffKind, Tier
from subjetlab.piecewise_model import (
    AdjacencyDeclaration,
    Cell,
    PiecewiseFunction,
    Polynomial,
)
from subjetlab.rational import (
    Matrix,
    RationalFormatError,
    Vector,
    format_rational,
    format_vector,
    parse_rational,
    parse_vector,
)
from subjetlab.special import SPECIAL_ORACLES

logger = logging.getLogger("subjetlab")

DOCUMENTED_KINDS = SubdiffKind.values() + ["composite"]


class FixtureError(ValueError):
    """Raised when a fixture file cannot be read or violates the schema."""


def _check_rational(value: str) -> str:
    try:
        parse_rational(value)
    except RationalFormatError as e:
        raise ValueError(str(e))
    return value


class MonomialModel(BaseModel):
    """A monomial ``coef * x^exp``."""

    exp: List[int]
    """Exponent vector."""

    coef: str
    """Rational coefficient."""

    @validator("coef")
    def validate_coef(cls, value: str) -> str:
        """Validate the rational coefficient."""
        return _check_rational(value)

    @validator("exp")
    def validate_exp(cls, value: List[int]) -> List[int]:
        """Validate that exponents are nonnegative."""
        if any(e < 0 for e in value):
            raise ValueError(f"Invalid negative exponent in {value}.")
        return value


class PolynomialModel(BaseModel):
    """A polynomial as a list of monomials."""

    monomials: List[MonomialModel] = []


class ConstraintModel(BaseModel):
    """A linear constraint ``a . x <= b`` (or ``== b``)."""

    a: List[str]
    b: str

    @validator("a", each_item=True)
    def validate_a(cls, value: str) -> str:
        """Validate the normal vector entries."""
        return _check_rational(value)

    @validator("b")
    def validate_b(cls, value: str) -> str:
        """Validate the right-hand side."""
        return _check_rational(value)


class AdjacencyModel(BaseModel):
    """A declared witness sequence converging to ``point``."""

    point: List[str]
    witness_seq: List[List[str]]

    @validator("point", each_item=True)
    def validate_point(cls, value: str) -> str:
        """Validate the query point."""
        return _check_rational(value)

    @validator("witness_seq", each_item=True)
    def validate_witness(cls, value: List[str]) -> List[str]:
        """Validate the witness points."""
        for q in value:
            _check_rational(q)
        return value


class CellModel(BaseModel):
    """A cell: linear constraints, sign conditions and a formula."""

    ineqs: List[ConstraintModel] = []
    eqs: List[ConstraintModel] = []
    poly: PolynomialModel
    sign: List[PolynomialModel] = []
    adjacency_at: List[AdjacencyModel] = []


class PullbackModel(BaseModel):
    """Inner affine map ``x -> A x + c`` of a composite fixture."""

    A: List[List[str]]
    c: List[str]

    @validator("A", each_item=True)
    def validate_rows(cls, value: List[str]) -> List[str]:
        """Validate the matrix entries."""
        for q in value:
            _check_rational(q)
        return value

    @validator("c", each_item=True)
    def validate_offset(cls, value: str) -> str:
        """Validate the offset entries."""
        return _check_rational(value)


class DocumentedViolationModel(BaseModel):
    """A counterexample outcome the fixture is known to produce."""

    kind: str
    at: List[str]
    local_dim: int

    @validator("kind")
    def validate_kind(cls, value: str) -> str:
        """Validate the subdifferential kind."""
        if value not in DOCUMENTED_KINDS:
            raise ValueError(
                f"Invalid kind '{value}'. "
                f"Allowed values are: {', '.join(DOCUMENTED_KINDS)}."
            )
        return value


class FixtureModel(BaseModel):
    """Schema of a fixture file."""

    name: str
    ambient_dim: int
    tier: str
    cells: List[CellModel] = []
    special_oracle: Optional[str] = None
    pullback: Optional[PullbackModel] = None
    documented: List[DocumentedViolationModel] = []

    @validator("tier")
    def validate_tier(cls, value: str) -> str:
        """Validate the tier name."""
        if value not in Tier.values():
            raise ValueError(
                f"Invalid tier '{value}'. "
                f"Allowed values are: {', '.join(Tier.values())}."
            )
        return value

    @validator("special_oracle")
    def validate_special(cls, value: Optional[str]) -> Optional[str]:
        """Validate the special oracle tag."""
        if value is not None and value not in SPECIAL_ORACLES:
            raise ValueError(
                f"Invalid special oracle '{value}'. "
                f"Allowed values are: {', '.join(SPECIAL_ORACLES)}."
            )
        return value

    @root_validator(skip_on_failure=True)
    def validate_shapes(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        """Check every vector against the ambient dimension."""
        n = values["ambient_dim"]
        if n < 1:
            raise ValueError(f"Invalid ambient_dim {n}.")
        if not values["cells"] and not values["special_oracle"]:
            raise ValueError("A fixture needs cells or a special oracle.")
        for i, cell in enumerate(values["cells"]):
            constraints = cell.ineqs + cell.eqs
            if any(len(c.a) != n for c in constraints):
                raise ValueError(f"cell {i}: constraint length != {n}.")
            polys = [cell.poly] + cell.sign
            if any(len(m.exp) != n for p in polys for m in p.monomials):
                raise ValueError(f"cell {i}: exponent length != {n}.")
            for adj in cell.adjacency_at:
                if len(adj.point) != n or any(
                    len(w) != n for w in adj.witness_seq
                ):
                    raise ValueError(f"cell {i}: adjacency length != {n}.")
        pullback = values.get("pullback")
        if pullback is not None:
            if len(pullback.A) != n or len(pullback.c) != n:
                raise ValueError(f"pullback A and c must have {n} rows.")
            widths = {len(row) for row in pullback.A}
            if len(widths) != 1 or 0 in widths:
                raise ValueError("pullback rows must have one common length.")
        return values


@dataclass(frozen=True)
class AffineMap:
    """The affine map ``x -> matrix x + offset``."""

    matrix: Matrix
    offset: Vector


@dataclass(frozen=True)
class DocumentedViolation:
    """Every violation of ``kind`` lies over ``at`` with ``local_dim``."""

    kind: str
    at: Vector
    local_dim: int


@dataclass(frozen=True)
class Fixture:
    """A corpus entry: the function and its documented outcomes."""

    function: PiecewiseFunction
    pullback: Optional[AffineMap] = None
    documented: Tuple[DocumentedViolation, ...] = ()

    @property
    def name(self) -> str:
        """The fixture name."""
        return self.function.name


def _polynomial(model: PolynomialModel, n: int) -> Polynomial:
    return Polynomial(
        n,
        tuple(
            (tuple(m.exp), parse_rational(m.coef)) for m in model.monomials
        ),
    )


def _constraints(
    models: Sequence[ConstraintModel],
) -> Tuple[Tuple[Vector, Any], ...]:
    return tuple((parse_vector(c.a), parse_rational(c.b)) for c in models)


def _from_model(model: FixtureModel) -> Fixture:
    n = model.ambient_dim
    cells = []
    for cell in model.cells:
        region = HPolyhedron(
            n, _constraints(cell.ineqs), _constraints(cell.eqs)
        )
        adjacency = tuple(
            AdjacencyDeclaration(
                parse_vector(a.point),
                tuple(parse_vector(w) for w in a.witness_seq),
            )
            for a in cell.adjacency_at
        )
        cells.append(
            Cell(
                region,
                _polynomial(cell.poly, n),
                tuple(_polynomial(p, n) for p in cell.sign),
                adjacency,
            )
        )
    function = PiecewiseFunction(
        model.name, n, Tier(model.tier), tuple(cells), model.special_oracle
    )
    pullback = None
    if model.pullback is not None:
        pullback = AffineMap(
            tuple(parse_vector(row) for row in model.pullback.A),
            parse_vector(model.pullback.c),
        )
    documented = tuple(
        DocumentedViolation(d.kind, parse_vector(d.at), d.local_dim)
        for d in model.documented
    )
    return Fixture(function, pullback, documented)


def _describe(error: ValidationError) -> str:
    return "; ".join(
        f"{' -> '.join(str(p) for p in e['loc'])}: {e['msg']}"
        for e in error.errors()
    )


def parse_fixture(data: Mapping[str, Any], source: str = "<data>") -> Fixture:
    """Build a fixture from decoded JSON data."""
    try:
        model = FixtureModel.parse_obj(data)
    except ValidationError as e:
        raise FixtureError(f"{source}: {_describe(e)}")
    try:
        return _from_model(model)
    except ValueError as e:
        raise FixtureError(f"{source}: {e}")


def load_fixture_entry(path: Union[str, Path]) -> Fixture:
    """Load a fixture file with its pullback and documented outcomes.

    Raises
    ------
    FixtureError
        Raised on unreadable files, JSON syntax errors (with line and
        column) and schema violations (with the offending field).
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise FixtureError(f"Cannot read fixture {path}: {e.strerror}.")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise FixtureError(
            f"{path}: line {e.lineno}, column {e.colno}: {e.msg}."
        )
    fixture = parse_fixture(data, str(path))
    logger.debug(f"Loaded fixture '{fixture.name}' from {path}.")
    return fixture


def load_fixture(path: Union[str, Path]) -> PiecewiseFunction:
    """Load the piecewise function of a fixture file."""
    return load_fixture_entry(path).function


def _polynomial_to_dict(p: Polynomial) -> Dict[str, Any]:
    return {
        "monomials": [
            {"exp": list(exps), "coef": format_rational(coef)}
            for exps, coef in p.monomials
        ]
    }


def _constraints_to_list(
    rows: Sequence[Tuple[Vector, Any]]
) -> List[Dict[str, Any]]:
    return [{"a": format_vector(a), "b": format_rational(b)} for a, b in rows]


def fixture_to_dict(fixture: Union[Fixture, PiecewiseFunction]) -> Dict:
    """Return the canonical JSON-ready form of a fixture."""
    if isinstance(fixture, PiecewiseFunction):
        fixture = Fixture(fixture)
    f = fixture.function
    cells = []
    for cell in f.cells:
        entry: Dict[str, Any] = {
            "ineqs": _constraints_to_list(cell.region.inequalities),
            "eqs": _constraints_to_list(cell.region.equalities),
            "poly": _polynomial_to_dict(cell.formula),
        }
        if cell.sign:
            entry["sign"] = [_polynomial_to_dict(q) for q in cell.sign]
        if cell.adjacency:
            entry["adjacency_at"] = [
                {
                    "point": format_vector(a.point),
                    "witness_seq": [format_vector(w) for w in a.witness_seq],
                }
                for a in cell.adjacency
            ]
        cells.append(entry)
    data: Dict[str, Any] = {
        "name": f.name,
        "ambient_dim": f.ambient_dim,
        "tier": f.tier.value,
        "cells": cells,
    }
    if f.special_oracle:
        data["special_oracle"] = f.special_oracle
    if fixture.pullback is not None:
        data["pullback"] = {
            "A": [format_vector(row) for row in fixture.pullback.matrix],
            "c": format_vector(fixture.pullback.offset),
        }
    if fixture.documented:
        data["documented"] = [
            {
                "kind": d.kind,
                "at": format_vector(d.at),
                "local_dim": d.local_dim,
            }
            for d in fixture.documented
        ]
    return data


def _dumps(data: Mapping[str, Any]) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def save_fixture(
    fixture: Union[Fixture, PiecewiseFunction], path: Union[str, Path]
) -> None:
    """Write a fixture in canonical form."""
    Path(path).write_text(_dumps(fixture_to_dict(fixture)))


def fixture_digest(fixture: Union[Fixture, PiecewiseFunction]) -> str:
    """Return the SHA-256 digest of the canonical fixture JSON."""
    text = _dumps(fixture_to_dict(fixture))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def resolve_fixture_path(name: str, corpus_dir: Union[str, Path]) -> Path:
    """Return ``name`` as a path, falling back to the corpus directory."""
    path = Path(name)
    if path.exists():
        return path
    corpus = Path(corpus_dir)
    for candidate in (corpus / name, corpus / f"{name}.json"):
        if candidate.exists():
            return candidate
    raise FixtureError(f"Fixture '{name}' not found in {corpus_dir}.")


def corpus_paths(corpus_dir: Union[str, Path]) -> List[Path]:
    """Return the fixture files of a corpus directory, sorted by name."""
    return sorted(Path(corpus_dir).glob("*.json"))
