"""
Exception hierarchy shared by the pricing engines, the simulator and the CLI
"""
from typing import List, Optional, Tuple


class BasketCDSError(Exception):
    """Base class for every error raised by the library."""


class InvalidParameterError(BasketCDSError, ValueError):
    """An argument lies outside the domain of the operation."""


class DegenerateParameterError(BasketCDSError):
    """
    Two decay rates of an exponential-mixture recursion coincide.

    Args:
        message: Human readable description
        pair: Indices (or lattice points) of the colliding rates
        values: The two colliding rate values
    """

    def __init__(self, message: str, pair: Tuple = (), values: Tuple[float, ...] = ()):
        super().__init__(message)
        self.pair = pair
        self.values = values


class QuadratureError(BasketCDSError):
    """Adaptive quadrature hit its subdivision limit before reaching tolerance."""

    def __init__(self, message: str, estimate: Optional[float] = None, error: Optional[float] = None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class SimulationError(BasketCDSError):
    """Monte Carlo failure (root-finder breakdown, empty premium leg, ...)."""


class PricingError(BasketCDSError):
    """A swap rate is undefined for the given law and contract."""


class ConfigError(BasketCDSError):
    """
    Scenario configuration failed validation.

    Every message starts with the dotted path of the offending field,
    e.g. ``"run.ks: seniority 11 exceeds basket size 10"``.
    """

    def __init__(self, errors: List[str]):
        self.errors = list(errors)
        super().__init__('; '.join(self.errors) if self.errors else 'invalid configuration')


class NestingLimitError(BasketCDSError):
    """The requested seniority needs more nested integrals than configured."""
