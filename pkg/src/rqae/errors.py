"""Exception types raised by the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class NoDataError(ValueError):
    """No measurement shots were supplied to an estimator."""


class NotUnitaryError(ValueError):
    """A matrix expected to be unitary is not."""


class ConfigurationError(ValueError):
    """An experiment or algorithm specification is invalid."""
