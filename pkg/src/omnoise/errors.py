"""Exception hierarchy shared by all omnoise modules."""


class OmnoiseError(Exception):
    """Base class for every error raised by omnoise."""


class InvalidParameterError(OmnoiseError, ValueError):
    """A physical parameter or numerical option violates its allowed range."""


class ConfigError(InvalidParameterError):
    """A configuration file does not match the schema.

    The offending key is available as ``field`` so callers can report it.
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class NumericalError(OmnoiseError, ArithmeticError):
    """A numerical procedure failed (CLI exit code 3)."""


class ConvergenceError(NumericalError):
    def __init__(self, message, residual=None, iterations=None):
        self.residual = residual
        self.iterations = iterations
        super().__init__(message)


class DegenerateSystemError(NumericalError):
    pass


class SingularityError(NumericalError):
    pass


class InstabilityError(NumericalError):
    """The drift matrix has an eigenvalue with nonnegative real part."""

    def __init__(self, message, abscissa=None):
        self.abscissa = abscissa
        super().__init__(message)


class EigenSolverError(NumericalError):
    pass


class QuadratureError(NumericalError):
    """Adaptive quadrature stopped before reaching the requested tolerance."""

    def __init__(self, message, estimate=None, error=None):
        self.estimate = estimate
        self.error = error
        super().__init__(message)
