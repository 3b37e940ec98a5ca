"""Error hierarchy shared by all subsystems.

Every error carries a stable machine-readable ``code`` so the HTTP service
and the CLI can surface the same identifiers.
"""

from __future__ import annotations


class SetXTabError(Exception):
    """Base class; ``code`` is the wire-level error identifier."""

    code = "Error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)


class UnknownElementError(SetXTabError):
    code = "UnknownElement"


class UniverseOverflowError(SetXTabError):
    code = "UniverseOverflow"


class InvalidPermutationError(SetXTabError):
    code = "InvalidPermutation"


class UniverseMismatchError(SetXTabError):
    code = "UniverseMismatch"


class InvalidCapError(SetXTabError):
    code = "InvalidCap"


class InvalidKeyError(SetXTabError):
    code = "InvalidKey"


class InvalidSelectionError(SetXTabError):
    code = "InvalidSelection"


class InvalidReferenceError(SetXTabError):
    code = "InvalidReference"


class InvalidProbabilityError(SetXTabError):
    code = "InvalidProbability"


class InvalidConfigError(SetXTabError):
    code = "InvalidConfig"


class ParseError(SetXTabError):
    code = "ParseError"

    def __init__(self, message: str, line: int | None = None, column: str | None = None):
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column!r}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")


class SpecError(SetXTabError):
    code = "SpecError"
