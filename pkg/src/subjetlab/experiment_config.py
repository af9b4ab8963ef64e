"""Pydantic models for experiment files."""

from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml
from pydantic import BaseModel, root_validator, validator

from subjetlab.kinds import SubdiffKind
from subjetlab.rational import (
    RationalFormatError,
    parse_rational,
    parse_vector,
)

__all__ = [
    "Command",
    "STOCHASTIC_COMMANDS",
    "Experiment",
    "Experiments",
    "ExperimentFile",
]


class Command(Enum):
    """Commands an experiment can run."""

    SUBDIFF = "subdiff"
    GRAPH = "graph"
    LOCALDIM = "localdim"
    VERIFY = "verify"
    MINTY = "minty"
    SOLVE = "solve"
    SENSITIVITY = "sensitivity"
    ACCESS = "access"
    VALIDATE = "validate"
    GEN = "gen"

    @staticmethod
    def values() -> List[str]:
        """Return list of command names."""
        return [c.value for c in Command]


STOCHASTIC_COMMANDS = {Command.MINTY, Command.SENSITIVITY, Command.GEN}
"""Commands that draw random numbers and therefore need a seed."""

_REQUIRED: Dict[Command, List[str]] = {
    Command.SUBDIFF: ["fixture", "point"],
    Command.GRAPH: ["fixture"],
    Command.LOCALDIM: ["fixture", "point"],
    Command.MINTY: ["fixture"],
    Command.SOLVE: ["fixture", "A", "b"],
    Command.SENSITIVITY: ["fixture", "A", "b", "point", "eps", "delta"],
    Command.ACCESS: ["fixture", "v"],
    Command.VALIDATE: ["fixture"],
}


def _rational(value: Optional[str]) -> Optional[str]:
    if value is not None:
        parse_rational(value)
    return value


def _positive(value: Optional[str]) -> Optional[str]:
    if value is not None and parse_rational(value) <= 0:
        raise ValueError(f"Invalid value '{value}'. It must be positive.")
    return value


class Experiment(BaseModel):
    """One run of a command with its parameters.

    Rationals are strings ``"p/q"``; vectors and matrices are comma
    separated (matrices row-major).
    """

    name: str = "experiment"
    """Experiment name, used by ``subjet-lab run --name``."""

    command: str
    """One of the `Command` values."""

    fixture: Optional[str] = None
    """Fixture path or corpus name. ``verify`` uses the whole corpus
    when it is not given.
    """

    point: Optional[str] = None
    """Query point, graph point for ``localdim`` or anchor ``(x, v)`` for
    ``sensitivity``. ``access`` anchors at the origin when it is omitted.
    """

    kind: str = SubdiffKind.LIMITING.value
    """Subdifferential kind."""

    seed: Optional[int] = None
    """Seed of stochastic commands (mandatory for them)."""

    trials: int = 1000
    """Number of random trials."""

    eps: Optional[str] = None
    """Radius of the solution neighbourhood (``sensitivity``)."""

    delta: Optional[str] = None
    """Radius of the perturbation ball (``sensitivity``)."""

    gamma: Optional[str] = None
    """Separate radius for the right-hand side (``sensitivity``)."""

    A: Optional[str] = None
    """Square matrix, row-major."""

    b: Optional[str] = None
    """Right-hand side."""

    v: Optional[str] = None
    """Anchor subgradient (``access``)."""

    M: List[str] = ["origin"]
    """Components of the set ``M`` (``access``): ``origin``, a point, or
    ``zero:i`` for the hyperplane ``x_i = 0``.
    """

    schedule: List[int] = [1, 2, 4, 8, 16]
    """Penalty parameters (``access``)."""

    tolerance: Optional[str] = None
    """Witness tolerance (``access``)."""

    hyperplanes: int = 3
    """Arrangement size (``gen``)."""

    dim: int = 1
    """Ambient dimension (``gen``)."""

    out: Optional[str] = None
    """Output path of the report or generated fixture."""

    @validator("command")
    def validate_command(cls, value: str) -> str:
        """Validate the command name."""
        if value not in Command.values():
            raise ValueError(
                f"Invalid command '{value}'. "
                f"Allowed values are: {', '.join(Command.values())}."
            )
        return value

    @validator("kind")
    def validate_kind(cls, value: str) -> str:
        """Validate the subdifferential kind."""
        SubdiffKind.parse(value)
        return value

    @validator("point", "b", "v", "A")
    def validate_vector(cls, value: Optional[str]) -> Optional[str]:
        """Check that every entry is an exact rational."""
        if value is not None:
            try:
                parse_vector(value)
            except RationalFormatError as e:
                raise ValueError(str(e))
        return value

    @validator("eps", "delta", "gamma", "tolerance")
    def validate_radius(cls, value: Optional[str]) -> Optional[str]:
        """Radii and tolerances are positive rationals."""
        try:
            return _positive(_rational(value))
        except RationalFormatError as e:
            raise ValueError(str(e))

    @validator("schedule")
    def validate_schedule(cls, value: List[int]) -> List[int]:
        """Penalties are positive."""
        if not value or any(m <= 0 for m in value):
            raise ValueError("The schedule must list positive penalties.")
        return value

    @validator("trials")
    def validate_trials(cls, value: int) -> int:
        """At least one trial."""
        if value < 1:
            raise ValueError("trials must be positive.")
        return value

    @root_validator(skip_on_failure=True)
    def validate_requirements(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        """Check the parameters each command needs."""
        command = Command(values["command"])
        if command in STOCHASTIC_COMMANDS and values.get("seed") is None:
            raise ValueError(f"Command '{command.value}' requires a seed.")
        missing = [
            key
            for key in _REQUIRED.get(command, [])
            if values.get(key) is None
        ]
        if missing:
            raise ValueError(
                f"Command '{command.value}' requires: {', '.join(missing)}."
            )
        return values


class Experiments(BaseModel):
    """The contents of an experiment file."""

    experiments: List[Experiment]
    """List of experiments."""


class ExperimentFile:
    """A representation of an experiment file."""

    def __init__(self, configfile: Union[str, Path]) -> None:
        self._configfile = Path(configfile)
        self._config = self._parse()

    def _parse(self) -> Experiments:
        """Parse the experiment file."""
        with open(self._configfile) as f:
            yaml_data = yaml.safe_load(f)
        return Experiments.parse_obj(yaml_data)

    @property
    def config(self) -> Experiments:
        """Return the configuration object."""
        return self._config

    @property
    def names(self) -> List[str]:
        """List experiment names."""
        return [e.name for e in self._config.experiments]

    def get(self, name: str) -> Experiment:
        """Get an experiment by its name.

        Raises
        ------
        KeyError
            Raised if no experiment has that name.
        """
        for experiment in self._config.experiments:
            if experiment.name == name:
                return experiment
        raise KeyError(
            f"Invalid experiment '{name}'. "
            f"Allowed values are: {', '.join(self.names)}."
        )
