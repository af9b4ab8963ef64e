"""Shared fixtures of the subjet-lab tests."""

from pathlib import Path
from typing import Callable

import pytest

from subjetlab.config import CORPUS_DIR
from subjetlab.fixtures import Fixture, load_fixture_entry
from subjetlab.piecewise_model import PiecewiseFunction


@pytest.fixture
def corpus_dir() -> Path:
    """Directory of the fixture corpus shipped with the package."""
    return CORPUS_DIR


@pytest.fixture
def data_dir() -> Path:
    """Directory containing test data."""
    return Path(__file__).parent.joinpath("data")


@pytest.fixture
def corpus_entry(corpus_dir: Path) -> Callable[[str], Fixture]:
    """Load a corpus fixture by name, with its documented outcomes."""

    def load(name: str) -> Fixture:
        return load_fixture_entry(corpus_dir.joinpath(f"{name}.json"))

    return load


@pytest.fixture
def corpus_function(
    corpus_entry: Callable[[str], Fixture]
) -> Callable[[str], PiecewiseFunction]:
    """Load the piecewise function of a corpus fixture by name."""

    def load(name: str) -> PiecewiseFunction:
        return corpus_entry(name).function

    return load
