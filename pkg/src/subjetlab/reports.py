"""Machine-readable reports of harness commands.

Reports are written as canonical JSON (sorted keys, fixed indentation),
so identical inputs and seeds give byte-identical files. The same data
renders as text through a Jinja2 template, and tabular results flatten
to CSV.
"""

__all__ = ["Report", "ReportRenderer", "write_csv"]

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

from jinja2 import Environment, PackageLoader, Template, TemplateError

from subjetlab import __version__
from subjetlab.config import Configuration

logger = logging.getLogger("subjetlab")


@dataclass
class Report:
    """The outcome of one harness command."""

    command: str
    inputs: Dict[str, Any]
    results: Dict[str, Any] = field(default_factory=dict)
    violations: List[Any] = field(default_factory=list)
    digest: Optional[str] = None
    """SHA-256 of the canonical fixture JSON, when a fixture is used."""

    passed: bool = True
    wall_time: Optional[float] = None
    """Seconds spent; only set when timing was requested."""

    version: str = __version__
    table: List[Dict[str, Any]] = field(default_factory=list, repr=False)
    """Rows flattened to CSV with ``--csv``; not part of the JSON."""

    def to_dict(self) -> Dict[str, Any]:
        """Return the report as a JSON-compatible dictionary."""
        data: Dict[str, Any] = {
            "version": self.version,
            "command": self.command,
            "digest": self.digest,
            "inputs": self.inputs,
            "results": self.results,
            "violations": self.violations,
            "passed": self.passed,
        }
        if self.wall_time is not None:
            data["wall_time"] = self.wall_time
        return data

    def to_json(self) -> str:
        """Canonical JSON text."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def write(self, path: Union[str, Path]) -> None:
        """Write the canonical JSON to ``path``."""
        Path(path).write_text(self.to_json())
        logger.info(f"Report written to {path}.")


class ReportRenderer:
    """Render reports as text with a Jinja2 template.

    Parameters
    ----------
    template_name : `str`, optional
        Template file under ``subjetlab/templates``. Defaults to the
        configured report template.
    """

    logger = logger

    def __init__(self, template_name: Optional[str] = None) -> None:
        self._template_name = (
            template_name or Configuration().report_template
        )
        self._template = self._load_template()

    @property
    def template(self) -> Template:
        """Get the report template."""
        return self._template

    def _load_template(self) -> Template:
        """Load the report template file."""
        env = Environment(
            loader=PackageLoader("subjetlab"), keep_trailing_newline=True
        )
        try:
            template = env.get_template(self._template_name)
        except TemplateError as e:
            logger.error("Error loading the report template file.")
            raise e
        return template

    @staticmethod
    def _create_context(report: Report) -> Mapping[str, Any]:
        """Create the template context."""
        return dict(
            report=report.to_dict(),
            results=json.dumps(report.results, sort_keys=True, indent=2),
        )

    def render(self, report: Report) -> str:
        """Return the text form of a report."""
        return self._template.render(**self._create_context(report))


def write_csv(
    rows: Sequence[Mapping[str, Any]], path: Union[str, Path]
) -> None:
    """Write table rows to a CSV file, columns in sorted key order."""
    columns = sorted({key for row in rows for key in row})
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=columns)
        writer.writeheader()
        for row in rows:
            writer.writerow(
                {
                    key: json.dumps(v) if isinstance(v, list) else v
                    for key, v in row.items()
                }
            )
    logger.info(f"Table of {len(rows)} rows written to {path}.")
