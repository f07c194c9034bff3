"""Exception types raised by qndsim."""


class QndError(Exception):
    """Base class for all qndsim errors."""


class DimensionError(QndError, ValueError):
    """Shapes of the supplied operators or states are incompatible."""


class ValidationError(QndError, ValueError):
    """An input violates a physical invariant (unitarity, hermiticity, norm).

    ``field`` names the offending input when known, e.g. ``"interaction.matrix"``.
    """

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field


class DomainError(QndError, ValueError):
    """A scalar parameter lies outside the operation's domain."""


class ImpossibleOutcomeError(QndError, ValueError):
    """Collapse was requested onto an outcome of (numerically) zero probability."""


class ConsistencyError(QndError, RuntimeError):
    """An internal identity failed; this indicates a bug, not bad input."""


class ModelFileError(QndError, ValueError):
    """A model file could not be parsed."""
