"""Exception hierarchy shared by the library and the CLI."""


class QSDError(Exception):
    """Base class for all library errors."""


class FieldError(QSDError, ValueError):
    """Unsupported field order or invalid field element."""


class DimensionError(QSDError, ValueError):
    """Ambient dimension mismatch or a dimension constraint violated."""


class CapacityError(QSDError):
    """An enumeration or search would exceed the configured size guard."""


class FormatError(QSDError, ValueError):
    """Malformed QSD1 / equation-system / parallelism file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DesignError(QSDError, ValueError):
    """A design does not satisfy a precondition of the requested operation."""


class SearchInvariantError(QSDError, RuntimeError):
    """Internal search bookkeeping disagrees with a full recount."""
