"""Exception hierarchy shared by every module."""


class ScreeningError(Exception):
    """Base class for all errors raised by ecrscreen."""


class ConfigurationError(ScreeningError, ValueError):
    """Invalid parameters or an inconsistent configuration."""


class DomainError(ScreeningError, ValueError):
    """Input data outside the domain of an estimator (NaN, constant column, n < 2)."""


class NumericError(ScreeningError, ArithmeticError):
    """A linear-algebra step failed (Cholesky, eigendecomposition, solve)."""
