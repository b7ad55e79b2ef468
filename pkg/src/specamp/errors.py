"""Exception hierarchy shared across the package."""

from __future__ import annotations


class SpecampError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(SpecampError):
    """Bad parameters or structurally inconsistent inputs."""


class FileFormatError(SpecampError):
    """Malformed input file; message carries path and line where known."""


class EstimationError(SpecampError):
    """Numerical failure: no root in bracket, degenerate data, zero denominator."""
