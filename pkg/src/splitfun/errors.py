"""Exception types shared across the package."""


class DomainError(ValueError):
    """A point lies outside the mathematical domain of an operation."""


class ConfigError(ValueError):
    """Invalid experiment configuration (bad field, infeasible sizes, ...)."""


class SolverError(RuntimeError):
    """An iterative solver failed to converge within its budget."""


class UnsupportedOrderError(ValueError):
    """A derivative order beyond what the functional supports."""


class UnsupportedModelError(ValueError):
    """The requested operation is not defined for this model class."""
