"""Exception hierarchy shared across the package.

The split mirrors the CLI exit codes: bad input (2), a violated mathematical
standing assumption such as smoothness or basis independence (3), and internal
invariant violations (4).
"""


class DworkboxError(Exception):
    """Base class for all library errors."""


class InputError(DworkboxError):
    """Malformed or out-of-contract user input."""


class ContextMismatchError(InputError):
    """Operands built over different variable contexts."""


class ParseError(InputError):
    """Syntax error in the polynomial surface syntax; carries a position."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class AssumptionError(DworkboxError):
    """A standing mathematical hypothesis failed on the given data."""


class SmoothnessError(AssumptionError):
    """Quotient failed to close: singular or non-complete-intersection input."""


class IndependenceError(AssumptionError):
    """The constructed classes are linearly dependent in the deformed quotient."""


class InternalCheckError(DworkboxError):
    """An internal exact identity failed; indicates a bug, not bad input."""
