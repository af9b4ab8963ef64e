"""Command-line interface for subjet-lab."""

__all__ = ["main", "run"]

import functools
import logging
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import click

from subjetlab import __version__
from subjetlab.config import Configuration
from subjetlab.experiment_config import Command, Experiment, ExperimentFile
from subjetlab.harness import execute
from subjetlab.reports import Report, ReportRenderer, write_csv

logger = logging.getLogger("subjetlab")

EXIT_INPUT_ERROR = 2

FORMATS = ("json", "text")

_EXPERIMENT_FIELDS = {
    "fixture": "fixture",
    "point": "point",
    "kind": "kind",
    "seed": "seed",
    "trials": "trials",
    "eps": "eps",
    "delta": "delta",
    "gamma": "gamma",
    "matrix": "A",
    "rhs": "b",
    "subgradient": "v",
    "schedule": "schedule",
    "tolerance": "tolerance",
    "hyperplanes": "hyperplanes",
    "dim": "dim",
    "out": "out",
}


def _output_options(command: Callable) -> Callable:
    options = [
        click.option(
            "--format",
            "fmt",
            type=click.Choice(FORMATS),
            default="json",
            show_default=True,
            help="Report format.",
        ),
        click.option(
            "--csv",
            "csv_path",
            type=click.Path(dir_okay=False),
            help="Also write the result table as CSV.",
        ),
        click.option(
            "--timing",
            is_flag=True,
            help="Record the wall time (reports are then not reproducible).",
        ),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _experiment_options(command: Callable) -> Callable:
    options = [
        click.option("--fixture", help="Fixture path or corpus name."),
        click.option("--point", help="Comma separated rationals."),
        click.option(
            "--kind",
            type=click.Choice(["frechet", "limiting", "clarke"]),
            default="limiting",
            show_default=True,
            help="Subdifferential kind.",
        ),
        click.option("--seed", type=int, help="Seed of random draws."),
        click.option(
            "--trials",
            type=int,
            default=1000,
            show_default=True,
            help="Number of random trials.",
        ),
        click.option("--eps", help="Radius of the solution neighbourhood."),
        click.option("--delta", help="Radius of the perturbation ball."),
        click.option("--gamma", help="Separate radius for b."),
        click.option("--A", "matrix", help="Square matrix, row-major."),
        click.option("--b", "rhs", help="Right-hand side."),
        click.option("--v", "subgradient", help="Anchor subgradient."),
        click.option(
            "--M",
            "sets",
            multiple=True,
            help="Component of M: origin, a point or zero:i (repeatable).",
        ),
        click.option(
            "--schedule",
            default="1,2,4,8,16",
            show_default=True,
            help="Penalty parameters.",
        ),
        click.option("--tolerance", help="Witness tolerance."),
        click.option(
            "--hyperplanes",
            type=int,
            default=3,
            show_default=True,
            help="Arrangement size of generated functions.",
        ),
        click.option(
            "--dim",
            type=int,
            default=1,
            show_default=True,
            help="Ambient dimension of generated functions.",
        ),
        click.option("--out", help="Output path."),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _build_experiment(
    command: Command, options: Dict[str, Any]
) -> Experiment:
    data: Dict[str, Any] = {
        field: options[name]
        for name, field in _EXPERIMENT_FIELDS.items()
        if options.get(name) is not None
    }
    data["schedule"] = [
        int(m) for m in options["schedule"].replace(" ", "").split(",")
    ]
    if options.get("sets"):
        data["M"] = list(options["sets"])
    return Experiment(name=command.value, command=command.value, **data)


def _emit(
    report: Report,
    fmt: str,
    out: Optional[str],
    csv_path: Optional[str],
) -> None:
    if fmt == "json":
        text = report.to_json()
    else:
        text = ReportRenderer().render(report)
    if out is not None and report.command != Command.GEN.value:
        Path(out).write_text(text)
        logger.info(f"Report written to {out}.")
    else:
        click.echo(text, nl=False)
    if csv_path is not None:
        write_csv(report.table, csv_path)


def _run_experiment(
    ctx: click.Context,
    build: Callable[[], Experiment],
    fmt: str,
    csv_path: Optional[str],
    timing: bool,
) -> None:
    try:
        experiment = build()
        report, code = execute(experiment, timing=timing)
        _emit(report, fmt, experiment.out, csv_path)
    except (ValueError, KeyError, OSError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        ctx.exit(EXIT_INPUT_ERROR)
    ctx.exit(code)


@click.group()
@click.version_option(__version__, prog_name="subjet-lab")
@click.option("--log-level", help="Overrides SUBJET_LOG_LEVEL.")
def main(log_level: Optional[str]) -> None:
    """Exact subdifferential graphs, local dimension and Minty maps."""
    level = (log_level or Configuration().log_level).upper()
    logging.basicConfig(
        level=level, format="%(asctime)s %(levelname)s %(message)s"
    )


def _register(command: Command, help_text: str) -> None:
    @click.pass_context
    def callback(
        ctx: click.Context,
        fmt: str,
        csv_path: Optional[str],
        timing: bool,
        **options: Any,
    ) -> None:
        _run_experiment(
            ctx,
            functools.partial(_build_experiment, command, options),
            fmt,
            csv_path,
            timing,
        )

    main.command(name=command.value, help=help_text)(
        _output_options(_experiment_options(callback))
    )


_COMMANDS = {
    Command.SUBDIFF: "Subdifferential of a fixture at a point.",
    Command.GRAPH: "Pieces and dimension of a subdifferential graph.",
    Command.LOCALDIM: "Local dimension of a graph at a point (x, v).",
    Command.VERIFY: "Check the local dimension theorem on the corpus.",
    Command.MINTY: "Certify the Minty map of one or random matrices.",
    Command.SOLVE: "Solve v in df(x), A x + v = b exactly.",
    Command.SENSITIVITY: "Sample perturbations of (A, b) around a solution.",
    Command.ACCESS: "Fréchet subjet points outside M converging to a point.",
    Command.VALIDATE: "Validate a fixture.",
    Command.GEN: "Generate a random piecewise-affine fixture.",
}

for _command, _help in _COMMANDS.items():
    _register(_command, _help)


@main.command()
@click.argument("experiment_file", type=click.Path(exists=True))
@click.option("--name", required=True, help="Experiment to run.")
@_output_options
@click.pass_context
def run(
    ctx: click.Context,
    experiment_file: str,
    name: str,
    fmt: str,
    csv_path: Optional[str],
    timing: bool,
) -> None:
    """Run an experiment from a YAML experiment file."""
    _run_experiment(
        ctx,
        lambda: ExperimentFile(experiment_file).get(name),
        fmt,
        csv_path,
        timing,
    )
