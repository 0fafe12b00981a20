"""Exception types raised by the package."""


class DomainError(ValueError):
    """Argument outside the supported domain (degree, radius, wavenumber...)."""


class SingularBlockError(ArithmeticError):
    """A per-degree system could not be solved to the required residual."""


class ConvergenceError(RuntimeError):
    """Two independent evaluation routes disagree beyond tolerance."""


class TruncationError(RuntimeError):
    """Spectral coefficients have not decayed at the truncation degree."""
