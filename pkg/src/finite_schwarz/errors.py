"""Exception types raised by the toolkit."""


class FiniteSchwarzError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FiniteSchwarzError, ValueError):
    """An argument lies outside the disk or radius range where it is defined."""


class NumericalError(FiniteSchwarzError, ArithmeticError):
    """A quadrature, root-finding or ODE routine failed to reach its tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message if achieved is None else f"{message} (achieved {achieved:.3g})")
        self.achieved = achieved


class ResolutionError(NumericalError):
    """A search grid was too coarse to find an admissible value."""


class ConfigurationError(FiniteSchwarzError, ValueError):
    """A scenario is well-formed but cannot be evaluated as configured."""


class ScenarioError(FiniteSchwarzError, ValueError):
    """A scenario file could not be parsed or validated."""
