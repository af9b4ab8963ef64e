"""Exact subdifferential graphs and local dimension for piecewise
functions.
"""

__all__ = ["__version__"]

from importlib.metadata import PackageNotFoundError, version

__version__: str
"""The application version string of (PEP 440 / SemVer compatible)."""

try:
    __version__ = version("subjet-lab")
except PackageNotFoundError:
    # package is not installed
    __version__ = "0.0.0"
