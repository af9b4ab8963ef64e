"""Run experiments and turn their outcomes into reports.

Every command of the command-line interface goes through `execute`, which
returns a `Report` and the exit code: 0 when the experiment passes, 1 on
a theorem violation or refusal. Input errors propagate as exceptions
(`ValueError` subclasses) and are mapped to exit code 2 by the caller.
"""

__all__ = [
    "Harness",
    "GENERIC_PASS_FRACTION",
    "RANDOM_CORPUS_SIZE",
    "execute",
    "parse_set",
    "composite_union",
]

import logging
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from subjetlab.config import Configuration
from subjetlab.dimension_lab import (
    VerificationReport,
    covering_test_points,
    global_dim,
    graph_union,
    local_dim,
    verify_local_dim_theorem,
)
from subjetlab.exact_geometry import HPolyhedron
from subjetlab.experiment_config import Command, Experiment
from subjetlab.fixtures import (
    Fixture,
    corpus_paths,
    fixture_digest,
    fixture_to_dict,
    load_fixture_entry,
    resolve_fixture_path,
    save_fixture,
)
from subjetlab.generator import FunctionGenerator, random_corpus
from subjetlab.kinds import SubdiffKind
from subjetlab.minty_maps import MintyMap, dense_local_diffeo, sample_generic
from subjetlab.param_systems import (
    HypothesisViolatedError,
    ParamSystem,
    access_point,
    local_dim_monotonicity_check,
    sensitivity_experiment,
    solve,
)
from subjetlab.pieces import PieceUnion
from subjetlab.piecewise_model import validate
from subjetlab.rational import (
    Vector,
    format_vector,
    parse_matrix,
    parse_rational,
    parse_vector,
    unit,
    zeros,
)
from subjetlab.reports import Report
from subjetlab.subdifferential import (
    NotLipschitzError,
    pullback_graph,
    subdiff,
)

logger = logging.getLogger("subjetlab")

GENERIC_PASS_FRACTION = 0.99
"""Smallest fraction of sampled matrices that must certify genericity."""

RANDOM_CORPUS_SIZE = 20
"""Number of seeded random functions added to ``verify`` runs."""

COMPOSITE = "composite"

Outcome = Tuple[Dict[str, Any], List[Any], bool]


def parse_set(components: List[str], n: int) -> List[HPolyhedron]:
    """Build the components of ``M`` from their textual form.

    A component is ``origin``, a point such as ``1/2,0`` or ``zero:i``
    for the coordinate hyperplane ``x_i = 0`` (``i`` counted from 0).
    """
    polyhedra = []
    for component in components:
        if component == "origin":
            polyhedra.append(HPolyhedron.point(zeros(n)))
        elif component.startswith("zero:"):
            index = component[len("zero:") :]
            if not index.isdigit() or int(index) >= n:
                raise ValueError(
                    f"Invalid component '{component}' of M. "
                    f"Allowed indices are 0 to {n - 1}."
                )
            polyhedra.append(
                HPolyhedron(n, (), ((unit(n, int(index)), Fraction(0)),))
            )
        else:
            polyhedra.append(HPolyhedron.point(parse_vector(component)))
    return polyhedra


def composite_union(fixture: Fixture) -> PieceUnion:
    """The graph of ``x -> A^T dg(A x + c)`` of a composite fixture."""
    if fixture.pullback is None:
        raise ValueError(f"Fixture '{fixture.name}' has no pullback map.")
    pieces = pullback_graph(
        fixture.function, fixture.pullback.matrix, fixture.pullback.offset
    )
    union = PieceUnion(2 * len(fixture.pullback.matrix[0]))
    for i, piece in enumerate(pieces):
        union.add(piece.to_piece(f"{COMPOSITE}[{i}]"))
    return union


def _composite_report(fixture: Fixture) -> VerificationReport:
    U = composite_union(fixture)
    n = U.ambient_dim // 2
    report = VerificationReport(
        fixture.name, SubdiffKind.LIMITING, n, semi_linear=True
    )
    for p in covering_test_points(U):
        local = local_dim(U, p)
        report.points.append(p)
        report.dims.append(local.local_dim)
        if local.local_dim != n:
            report.violations.append(local)
    return report


def _matches_documented(
    fixture: Fixture, kind: str, report: VerificationReport
) -> Optional[bool]:
    """Compare violations with the documented ones.

    Returns `None` when nothing is documented for ``kind``.
    """
    documented = [d for d in fixture.documented if d.kind == kind]
    if not documented:
        return None
    n = report.ambient_dim
    return bool(report.violations) and all(
        any(
            v.point[:n] == d.at and v.local_dim == d.local_dim
            for d in documented
        )
        for v in report.violations
    )


class Harness:
    """Execute one experiment.

    Parameters
    ----------
    experiment : `subjetlab.experiment_config.Experiment`
        The validated experiment.
    config : `subjetlab.config.Configuration`, optional
        Harness configuration (corpus location, tolerances).
    """

    logger = logger

    def __init__(
        self, experiment: Experiment, config: Optional[Configuration] = None
    ) -> None:
        self._experiment = experiment
        self._config = config or Configuration()
        self._command = Command(experiment.command)
        self._kind = SubdiffKind.parse(experiment.kind)
        self._fixture: Optional[Fixture] = None
        self._runners: Dict[Command, Callable[[], Outcome]] = {
            Command.SUBDIFF: self._subdiff,
            Command.GRAPH: self._graph,
            Command.LOCALDIM: self._localdim,
            Command.VERIFY: self._verify,
            Command.MINTY: self._minty,
            Command.SOLVE: self._solve,
            Command.SENSITIVITY: self._sensitivity,
            Command.ACCESS: self._access,
            Command.VALIDATE: self._validate,
            Command.GEN: self._gen,
        }
        self._table: List[Dict[str, Any]] = []

    def _load(self, name: str) -> Fixture:
        path = resolve_fixture_path(name, self._config.corpus_dir)
        return load_fixture_entry(path)

    @property
    def fixture(self) -> Fixture:
        """The fixture named by the experiment, loaded once."""
        if self._fixture is None:
            if self._experiment.fixture is None:
                raise ValueError(
                    f"Command '{self._command.value}' requires a fixture."
                )
            self._fixture = self._load(self._experiment.fixture)
        return self._fixture

    @property
    def n(self) -> int:
        """Ambient dimension of the fixture."""
        return self.fixture.function.ambient_dim

    def _vector(
        self, text: Optional[str], length: int, what: str
    ) -> Vector:
        if text is None:
            raise ValueError(f"Missing {what}.")
        v = parse_vector(text)
        if len(v) != length:
            raise ValueError(
                f"Invalid {what} {text}: expected {length} entries, "
                f"got {len(v)}."
            )
        return v

    def _matrix(self) -> MintyMap:
        if self._experiment.A is None:
            raise ValueError("Missing matrix A.")
        return MintyMap(parse_matrix(self._experiment.A, self.n, self.n))

    def run(self) -> Report:
        """Run the experiment."""
        inputs = self._experiment.dict(exclude_none=True, exclude={"out"})
        results, violations, passed = self._runners[self._command]()
        digest = None
        if self._experiment.fixture is not None:
            digest = fixture_digest(self.fixture)
        return Report(
            self._command.value,
            inputs,
            results,
            violations,
            digest=digest,
            passed=passed,
            table=self._table,
        )

    def _subdiff(self) -> Outcome:
        f = self.fixture.function
        x = self._vector(self._experiment.point, self.n, "point")
        result = subdiff(f, x, self._kind)
        return result.to_dict(), [], True

    def _graph(self) -> Outcome:
        U = graph_union(self.fixture.function, self._kind)
        for i, piece in U.labelled():
            self._table.append(
                {"piece": i, "label": piece.label, "dim": piece.dimension}
            )
        results = {
            "kind": self._kind.value,
            "pieces": list(self._table),
            "global_dim": global_dim(U),
        }
        if self.fixture.pullback is not None:
            composite = composite_union(self.fixture)
            results[COMPOSITE] = {
                "pieces": [
                    {"piece": i, "label": p.label, "dim": p.dimension}
                    for i, p in composite.labelled()
                ],
                "global_dim": global_dim(composite),
            }
        return results, [], True

    def _localdim(self) -> Outcome:
        p = self._vector(self._experiment.point, 2 * self.n, "graph point")
        U = graph_union(self.fixture.function, self._kind)
        report = local_dim(U, p)
        results = dict(report.to_dict(), global_dim=global_dim(U))
        results["kind"] = self._kind.value
        return results, [], True

    @staticmethod
    def _verify_kind(fixture: Fixture, kind: str) -> VerificationReport:
        if kind == COMPOSITE:
            return _composite_report(fixture)
        f = fixture.function
        subdiff_kind = SubdiffKind.parse(kind)
        if subdiff_kind is SubdiffKind.CLARKE and f.special_oracle:
            raise NotLipschitzError(f"'{f.name}' is not locally Lipschitz.")
        return verify_local_dim_theorem(f, subdiff_kind)

    def _verify_fixture(
        self, fixture: Fixture, violations: List[Any]
    ) -> bool:
        f = fixture.function
        lsc = validate(f, self._config.adjacency_tolerance).checks.get(
            "lsc", True
        )
        if self._kind is SubdiffKind.CLARKE:
            kinds = [SubdiffKind.CLARKE.value]
        else:
            kinds = [SubdiffKind.LIMITING.value, SubdiffKind.FRECHET.value]
            kinds += [d.kind for d in fixture.documented]
        ok = True
        for kind in dict.fromkeys(kinds):
            try:
                report = self._verify_kind(fixture, kind)
            except NotLipschitzError as e:
                logger.warning(f"Skipping the {kind} check: {e}")
                self._table.append(
                    {"fixture": fixture.name, "kind": kind, "skipped": True}
                )
                continue
            documented = _matches_documented(fixture, kind, report)
            if documented is None:
                kind_ok = report.passed or not lsc
            else:
                kind_ok = documented
            ok = ok and kind_ok
            self._table.append(
                {
                    "fixture": fixture.name,
                    "kind": kind,
                    "n": report.ambient_dim,
                    "lsc": lsc,
                    "points": len(report.points),
                    "violations": len(report.violations),
                    "documented": documented is not None,
                    "ok": kind_ok,
                }
            )
            if not kind_ok:
                violations.append(
                    {
                        "fixture": fixture.name,
                        "kind": kind,
                        "local_dims": [
                            v.to_dict() for v in report.violations
                        ],
                    }
                )
        U = graph_union(f, SubdiffKind.LIMITING)
        if lsc and global_dim(U) != f.ambient_dim:
            violations.append(
                {
                    "fixture": fixture.name,
                    "global_dim": global_dim(U),
                    "expected": f.ambient_dim,
                }
            )
            ok = False
        return ok

    def _verify(self) -> Outcome:
        if self._experiment.fixture is not None:
            fixtures = [self.fixture]
        else:
            fixtures = [
                load_fixture_entry(path)
                for path in corpus_paths(self._config.corpus_dir)
            ]
        if self._experiment.seed is not None:
            fixtures += [
                Fixture(f)
                for f in random_corpus(
                    RANDOM_CORPUS_SIZE,
                    self._experiment.seed,
                    self._experiment.hyperplanes,
                )
            ]
        violations: List[Any] = []
        passed = True
        for fixture in fixtures:
            passed = self._verify_fixture(fixture, violations) and passed
        results = {"fixtures": len(fixtures), "checks": list(self._table)}
        logger.info(
            f"Verified {len(fixtures)} fixtures: "
            f"{'pass' if passed else 'FAIL'}."
        )
        return results, violations, passed

    def _minty(self) -> Outcome:
        U = graph_union(self.fixture.function, SubdiffKind.LIMITING)
        if self._experiment.A is not None:
            A = self._matrix()
            certificate = dense_local_diffeo(A, U)
            monotonicity = local_dim_monotonicity_check(
                A, U, certificate=certificate
            )
            results = {
                "certificate": certificate.to_dict(),
                "monotonicity": monotonicity.to_dict(),
            }
            violations = [
                format_vector(p) for p in certificate.hypothesis_failures
            ]
            return results, violations, certificate.passed
        assert self._experiment.seed is not None
        sample = sample_generic(
            U, self._experiment.trials, self._experiment.seed
        )
        violations = [
            [format_vector(row) for row in matrix]
            for matrix in sample.failed_matrices
        ]
        return (
            sample.to_dict(),
            violations,
            sample.fraction >= GENERIC_PASS_FRACTION,
        )

    def _solve(self) -> Outcome:
        b = self._vector(self._experiment.b, self.n, "right-hand side")
        system = ParamSystem(self.fixture.function, self._matrix(), b)
        solutions = solve(system, self._kind)
        self._table = [o.to_dict() for o in solutions.outcomes]
        return solutions.to_dict(), [], True

    def _sensitivity(self) -> Outcome:
        experiment = self._experiment
        assert experiment.seed is not None
        assert experiment.eps is not None and experiment.delta is not None
        result = sensitivity_experiment(
            self.fixture.function,
            self._matrix(),
            self._vector(experiment.b, self.n, "right-hand side"),
            self._vector(experiment.point, 2 * self.n, "anchor"),
            parse_rational(experiment.eps),
            parse_rational(experiment.delta),
            experiment.trials,
            experiment.seed,
            gamma=(
                parse_rational(experiment.gamma)
                if experiment.gamma is not None
                else None
            ),
        )
        return result.to_dict(), [], result.successes > 0

    def _access(self) -> Outcome:
        experiment = self._experiment
        M = parse_set(experiment.M, self.n)
        tolerance = (
            parse_rational(experiment.tolerance)
            if experiment.tolerance is not None
            else None
        )
        try:
            witness = access_point(
                self.fixture.function,
                M,
                (
                    self._vector(experiment.point, self.n, "point")
                    if experiment.point is not None
                    else zeros(self.n)
                ),
                self._vector(experiment.v, self.n, "subgradient"),
                tolerance=tolerance,
                schedule=experiment.schedule,
            )
        except HypothesisViolatedError as e:
            results = {"refused": True, "hypothesis": e.certificate.to_dict()}
            return results, [str(e)], False
        results = dict(witness.to_dict(), refused=False)
        self._table = results["triples"]
        violations = [
            t for t, ok in zip(results["triples"], witness.verified) if not ok
        ]
        return results, violations, witness.converged

    def _validate(self) -> Outcome:
        report = validate(
            self.fixture.function, self._config.adjacency_tolerance
        )
        violations = [
            {
                "check": v.check,
                "message": v.message,
                "witness": (
                    format_vector(v.witness) if v.witness is not None else None
                ),
            }
            for v in report.violations
        ]
        return {"checks": report.checks}, violations, report.passed

    def _gen(self) -> Outcome:
        experiment = self._experiment
        assert experiment.seed is not None
        generator = FunctionGenerator(
            experiment.seed, experiment.dim, experiment.hyperplanes
        )
        f = generator.generate()
        if experiment.out is not None:
            save_fixture(f, Path(experiment.out))
            logger.info(f"Fixture '{f.name}' written to {experiment.out}.")
        report = validate(f, self._config.adjacency_tolerance)
        results = {
            "fixture": fixture_to_dict(f),
            "digest": fixture_digest(f),
            "cells": len(f.cells),
        }
        return results, [v.message for v in report.violations], report.passed


def execute(
    experiment: Experiment,
    timing: bool = False,
    config: Optional[Configuration] = None,
) -> Tuple[Report, int]:
    """Run an experiment and return its report and exit code."""
    start = time.perf_counter()
    report = Harness(experiment, config).run()
    if timing:
        report.wall_time = time.perf_counter() - start
    code = 0 if report.passed else 1
    logger.info(
        f"Command '{report.command}' finished with exit code {code}."
    )
    return report, code
