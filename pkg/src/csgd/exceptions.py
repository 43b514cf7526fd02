"""Exception hierarchy shared by all csgd modules."""


class CSGDError(Exception):
    """Base class for every error raised by csgd."""


class DimensionError(CSGDError, ValueError):
    """Operand shapes do not agree."""


class ContractViolation(CSGDError, ValueError):
    """A documented precondition of an operation does not hold."""


class NumericalError(CSGDError, ArithmeticError):
    """An iterative routine failed to converge or a numeric check failed."""


class SolverError(NumericalError):
    """A factorization failed; carries the minimum eigenvalue when known."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class DomainError(CSGDError, ValueError):
    """A point lies outside the domain of a kernel or function."""


class IllPosedError(CSGDError, ValueError):
    """The problem data make the requested system singular (e.g. duplicate nodes)."""


class DegenerateRowError(NumericalError):
    """A normalized update met a row with zero norm."""


class DivergenceError(NumericalError):
    """An SGD run blew up past the divergence guard."""


class SamplingError(CSGDError, RuntimeError):
    """Rejection sampling exhausted its budget."""


class OracleError(NumericalError):
    """A finite-difference oracle saw non-finite function values."""


class ConfigError(CSGDError, ValueError):
    """Invalid experiment configuration."""
