"""Configuration definition."""

__all__ = ["Configuration", "CORPUS_DIR"]

import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import List

CORPUS_DIR = Path(__file__).parent.joinpath("corpus")
"""Directory of the fixture corpus shipped with the package."""

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


@dataclass
class Configuration:
    """Configuration for subjet-lab."""

    corpus_dir: str = os.getenv("SUBJET_CORPUS", str(CORPUS_DIR))
    """Directory searched for fixture files given by name.

    Defaults to the corpus shipped with the package.
    """

    log_level: str = os.getenv("SUBJET_LOG_LEVEL", "INFO")
    """Log level used by the command line interface."""

    generic_numerator_bound: int = int(
        os.getenv("SUBJET_GENERIC_NUMERATOR_BOUND", "1000")
    )
    """Bound on the numerators of generic matrix entries.

    Entries of sampled matrices are ``p/q`` with ``p`` drawn uniformly from
    ``[-bound, bound]`` excluding zero.
    """

    generic_denominator_bound: int = int(
        os.getenv("SUBJET_GENERIC_DENOMINATOR_BOUND", "100")
    )
    """Bound on the denominators of generic matrix entries, drawn uniformly
    from ``[1, bound]``.
    """

    sampler_grid: int = int(os.getenv("SUBJET_SAMPLER_GRID", "1000000"))
    """Number of grid steps per half-width used by the rational jitter of the
    sensitivity sampler.
    """

    oracle_tolerance: float = float(
        os.getenv("SUBJET_ORACLE_TOLERANCE", "1e-6")
    )
    """Tolerance of the definitional (floating point) oracle."""

    adjacency_tolerance: float = float(
        os.getenv("SUBJET_ADJACENCY_TOLERANCE", "1e-9")
    )
    """Largest admissible distance between the last point of a declared
    adjacency witness sequence and its query point.
    """

    pca_cutoff: float = float(os.getenv("SUBJET_PCA_CUTOFF", "1e-6"))
    """Relative singular value cutoff of the numeric local dimension
    estimator.
    """

    curve_depth: int = int(os.getenv("SUBJET_CURVE_DEPTH", "8"))
    """First dyadic level ``k`` at which witness curves are sampled
    (``t = 2**-k``) on the polynomial tier.
    """

    access_tolerance: str = os.getenv("SUBJET_ACCESS_TOLERANCE", "1/100")
    """Default distance bound for accessibility witness sequences."""

    report_template: str = os.getenv(
        "SUBJET_REPORT_TEMPLATE", "report.txt.j2"
    )
    """Name of the Jinja2 template used for text reports."""

    def __post_init__(self) -> None:
        """Post config initialization steps."""
        self.curve_exponents = [
            int(e)
            for e in self._strtolist(
                os.getenv("SUBJET_CURVE_EXPONENTS", "1,2,3")
            )
        ]
        for exponent in self.curve_exponents:
            if exponent < 1:
                raise ValueError(
                    f"Invalid curve exponent '{exponent}'. "
                    "Exponents must be positive integers."
                )

        if self.log_level.upper() not in LOG_LEVELS:
            raise ValueError(
                f"Invalid log level '{self.log_level}'. "
                f"Allowed values are: {', '.join(LOG_LEVELS)}."
            )

        if self.generic_numerator_bound < 1:
            raise ValueError("generic_numerator_bound must be positive.")
        if self.generic_denominator_bound < 1:
            raise ValueError("generic_denominator_bound must be positive.")
        if self.sampler_grid < 1:
            raise ValueError("sampler_grid must be positive.")
        if self.curve_depth < 1:
            raise ValueError("curve_depth must be positive.")

        if Fraction(self.access_tolerance) <= 0:
            raise ValueError("access_tolerance must be positive.")

    @property
    def corpus_path(self) -> Path:
        """Return the corpus directory as a path."""
        return Path(self.corpus_dir)

    def _strtolist(self, s: str) -> List[str]:
        """Convert comma separated values to a list of strings.

        Parameters
        ----------
        s : `str`
            Comma separated values

        Returns
        -------
        slist : `list`
        """
        slist = s.replace(" ", "").split(",")
        return slist
