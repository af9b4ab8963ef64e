"""Tests for the reports module."""

import csv
import json
from pathlib import Path

import pytest
from jinja2 import TemplateError

from subjetlab import __version__
from subjetlab.reports import Report, ReportRenderer, write_csv


@pytest.fixture
def report() -> Report:
    """A small passing report."""
    return Report(
        "solve",
        {"fixture": "abs", "A": "1", "b": "2"},
        {"points": [["1", "1"]], "finite": True},
        digest="0" * 64,
    )


def test_canonical_json(report: Report) -> None:
    """Test that the JSON form is sorted and ends with a newline."""
    text = report.to_json()
    assert text.endswith("}\n")
    data = json.loads(text)
    assert list(data) == sorted(data)
    assert data["version"] == __version__
    assert data["passed"] is True
    assert "wall_time" not in data


def test_wall_time(report: Report) -> None:
    """Test that the wall time is written only when set."""
    report.wall_time = 0.25
    assert json.loads(report.to_json())["wall_time"] == 0.25


def test_write(report: Report, tmp_path: Path) -> None:
    """Test writing a report file."""
    path = tmp_path / "report.json"
    report.write(path)
    assert path.read_text() == report.to_json()


def test_render_text(report: Report) -> None:
    """Test the text rendering of passing and failing reports."""
    renderer = ReportRenderer()
    text = renderer.render(report)
    assert text.startswith(f"subjet-lab {__version__} - solve")
    assert "status: PASS" in text
    assert "violations: none" in text
    assert "wall time" not in text
    report.passed = False
    report.violations = ["too many solutions"]
    failing = renderer.render(report)
    assert "status: FAIL" in failing
    assert "  - too many solutions" in failing


def test_missing_template() -> None:
    """Test that an unknown template is an error."""
    with pytest.raises(TemplateError):
        ReportRenderer("missing.j2")


def test_write_csv(tmp_path: Path) -> None:
    """Test flattening table rows, with list cells as JSON."""
    path = tmp_path / "table.csv"
    write_csv(
        [
            {"piece": 0, "status": "point", "point": ["1", "1"]},
            {"piece": 1, "status": "empty"},
        ],
        path,
    )
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    assert list(rows[0]) == ["piece", "point", "status"]
    assert rows[0]["point"] == '["1", "1"]'
    assert rows[1]["point"] == ""
