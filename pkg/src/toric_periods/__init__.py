"""Exact local and global criteria for non-vanishing of toric periods of
theta lifts on unitary groups."""

from .errors import InputError, PrecisionError, ToricPeriodError

__version__ = "0.1.0"

__all__ = ["InputError", "PrecisionError", "ToricPeriodError", "__version__"]
