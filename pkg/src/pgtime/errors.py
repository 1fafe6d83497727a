"""Exception types shared across the package."""


class PgtimeError(Exception):
    """Base class for all library errors."""


class DomainError(PgtimeError, ValueError):
    """Arguments outside the mathematical domain of an operation."""


class ConvergenceFailure(PgtimeError, ArithmeticError):
    """A series hit its term budget before the truncation rule fired."""


class QuadratureFailure(PgtimeError, ArithmeticError):
    """Adaptive quadrature could not reach the requested accuracy."""


class InsufficientSamples(PgtimeError, ValueError):
    pass


class DegenerateBinning(PgtimeError, ValueError):
    pass


class UnknownSuite(PgtimeError, KeyError):
    pass


class RuntimeFault(PgtimeError, RuntimeError):
    """An event of probability zero happened (sampler guard tripped)."""
