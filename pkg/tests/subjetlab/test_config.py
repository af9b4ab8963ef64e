"""Tests for the config and kinds modules."""

import pytest

from subjetlab.config import CORPUS_DIR, Configuration
from subjetlab.kinds import SubdiffKind, Tier


def test_defaults() -> None:
    """Test the default configuration."""
    config = Configuration()
    assert config.corpus_path == CORPUS_DIR
    assert config.curve_exponents == [1, 2, 3]
    assert config.access_tolerance == "1/100"
    assert config.report_template == "report.txt.j2"


def test_curve_exponents_from_env(monkeypatch: pytest.MonkeyPatch) -> None:
    """Test reading the curve exponents from the environment."""
    monkeypatch.setenv("SUBJET_CURVE_EXPONENTS", "1, 3")
    assert Configuration().curve_exponents == [1, 3]
    monkeypatch.setenv("SUBJET_CURVE_EXPONENTS", "0")
    with pytest.raises(ValueError):
        Configuration()


@pytest.mark.parametrize(
    "overrides",
    [
        {"log_level": "LOUD"},
        {"generic_numerator_bound": 0},
        {"generic_denominator_bound": 0},
        {"sampler_grid": 0},
        {"curve_depth": 0},
        {"access_tolerance": "-1/2"},
    ],
)
def test_invalid_configuration(overrides: dict) -> None:
    """Test that invalid settings are refused."""
    with pytest.raises(ValueError):
        Configuration(**overrides)


def test_subdiff_kind_parse() -> None:
    """Test parsing subdifferential kinds."""
    assert SubdiffKind.parse("clarke") is SubdiffKind.CLARKE
    assert SubdiffKind.values() == ["frechet", "limiting", "clarke"]
    with pytest.raises(ValueError, match="Allowed values"):
        SubdiffKind.parse("proximal")


def test_tier_values() -> None:
    """Test the tier names."""
    assert Tier.values() == ["affine", "polynomial"]
