"""Corrugation Process toolkit for epsilon-isometric surfaces in R^3."""

from corrugate.errors import CorrugationError

__version__ = "0.1.0"

__all__ = ["CorrugationError", "__version__"]
