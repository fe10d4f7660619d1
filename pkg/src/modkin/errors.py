"""Exception hierarchy shared across the toolkit.

Every error carries a short machine-greppable ``code`` so the CLI and the
HTTP service can report failures uniformly.
"""

from __future__ import annotations


class ModkinError(Exception):
    """Base class for all domain errors."""

    code = "MODKIN_ERROR"


class ParseError(ModkinError):
    """A document (composition file, DH CSV, URDF XML) could not be parsed."""

    code = "PARSE_ERROR"

    def __init__(self, message: str, *, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)


class ValidationError(ModkinError):
    """A hard structural invariant is broken (e.g. a composition with no units)."""

    code = "VALIDATION_ERROR"


class InvalidComposition(ValidationError):
    """A composition failed assembly-rule validation where a valid one is required."""

    code = "INVALID_COMPOSITION"


class DimensionMismatch(ModkinError):
    """A vector argument does not match the composition's degree of freedom count."""

    code = "DIMENSION_MISMATCH"


class OutOfRange(ModkinError):
    """A twist angle falls outside the reachable slot range."""

    code = "OUT_OF_RANGE"


class Unconvertible(ModkinError):
    """A DH table cannot be realized with the available modular units."""

    code = "UNCONVERTIBLE"

    def __init__(self, message: str, *, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
