"""Enumerations shared by the subdifferential engine and the harness."""

__all__ = ["SubdiffKind", "Tier"]

from enum import Enum
from typing import List


class SubdiffKind(Enum):
    """The subdifferential constructions supported by the engine."""

    FRECHET = "frechet"
    LIMITING = "limiting"
    CLARKE = "clarke"

    @staticmethod
    def values() -> List[str]:
        """Return list of kind names."""
        return [k.value for k in SubdiffKind]

    @classmethod
    def parse(cls, name: str) -> "SubdiffKind":
        """Return the kind called ``name``.

        Raises
        ------
        ValueError
            Raised if ``name`` is not a supported kind.
        """
        if name not in SubdiffKind.values():
            raise ValueError(
                f"Invalid subdifferential kind '{name}'. "
                f"Allowed values are: {', '.join(SubdiffKind.values())}."
            )
        return cls(name)


class Tier(Enum):
    """Representation tier of a piecewise function."""

    AFFINE = "affine"
    POLYNOMIAL = "polynomial"

    @staticmethod
    def values() -> List[str]:
        """Return list of tier names."""
        return [t.value for t in Tier]
