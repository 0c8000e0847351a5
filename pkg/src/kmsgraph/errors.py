class KmsGraphError(Exception):
    """Base class for every domain error raised by the package."""


class GraphInputError(KmsGraphError, ValueError):
    """Malformed graph, unknown vertex or edge id, or unparsable document."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            loc = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{loc}: {message}"
        super().__init__(message)


class PreconditionError(KmsGraphError, ValueError):
    pass


class NumericalError(KmsGraphError, ArithmeticError):
    """An iterative computation did not converge, or a residual check failed."""

    def __init__(self, message, **diagnostics):
        self.diagnostics = diagnostics
        if diagnostics:
            details = ", ".join(f"{k}={v!r}" for k, v in diagnostics.items())
            message = f"{message} ({details})"
        super().__init__(message)


class NotSummableError(PreconditionError):
    """A sink or circular orbit is not summable at the requested beta."""


class NoCriticalBetaError(KmsGraphError):
    """The component has a zero-weight loop or loops of both signs."""


class CycleLimitError(KmsGraphError):
    """Simple-cycle enumeration exceeded the configured limits."""


class RepresentationError(KmsGraphError):
    """The symbolic trace representation violates a Cuntz-Krieger relation."""
