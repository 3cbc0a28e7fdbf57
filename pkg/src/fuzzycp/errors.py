"""Exception hierarchy shared by all fuzzycp modules."""


class FuzzycpError(Exception):
    """Base class for every error raised by this package."""


class EmptyDatasetError(FuzzycpError):
    """The input stream contained no rows at all."""


class ShapeError(FuzzycpError):
    """A data row has the wrong number of cells."""

    def __init__(self, row, message=None):
        self.row = row
        super().__init__(message or f"row {row}: wrong number of cells")


class ParseError(FuzzycpError):
    """Unparseable input; carries a location when one is known.

    ``line``/``column`` are 1-based for query text and 0-based row/column
    indexes for tabular data (they index records, not characters).
    """

    def __init__(self, message, line=None, column=None, expected=None):
        self.line = line
        self.column = column
        self.expected = tuple(expected) if expected else ()
        if line is not None and column is not None:
            message = f"{line}:{column}: {message}"
        super().__init__(message)


class SemanticError(FuzzycpError):
    """Well-formed query text with an inconsistent meaning."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None and column is not None:
            message = f"{line}:{column}: {message}"
        super().__init__(message)


class DegenerateDataError(FuzzycpError):
    """Too little variation in the data to build the requested clusters."""


class ConfigError(FuzzycpError):
    """A configuration entry references something that does not exist."""


class ValidationError(FuzzycpError):
    """A preference net violates its structural invariants.

    ``report`` holds the individual violations.
    """

    def __init__(self, report):
        self.report = tuple(report)
        lines = "; ".join(str(v) for v in self.report)
        super().__init__(f"invalid preference net: {lines}")


class CapacityError(FuzzycpError):
    """An enumeration would exceed its configured bound."""


class AssignmentError(FuzzycpError):
    """An outcome assignment is missing a variable or uses a foreign value."""


class DegenerateUtilityError(FuzzycpError):
    """The utility scale is flat, so importances cannot be normalized."""


class BindingError(FuzzycpError):
    """Query variables and knowledge-base attributes do not line up."""


class DegenerateQueryError(FuzzycpError):
    """A query with no terms or no variables cannot be evaluated."""
