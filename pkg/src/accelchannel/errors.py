"""Exception types shared across the package."""


class AccelChannelError(Exception):
    """Base class for package errors."""


class DomainError(AccelChannelError, ValueError):
    """Argument outside the domain of a function."""


class ConvergenceError(AccelChannelError, ArithmeticError):
    """A series or quadrature failed to reach its tolerance."""


class IntegrandNaNError(AccelChannelError, ArithmeticError):
    """The integrand returned a non-finite value."""

    def __init__(self, abscissa):
        self.abscissa = abscissa
        super().__init__(f"integrand is not finite at {abscissa!r}")


class InconsistencyError(AccelChannelError, ArithmeticError):
    """A computed state or channel violates a physicality condition."""


class ConfigError(AccelChannelError, ValueError):
    """Invalid scenario configuration; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")
