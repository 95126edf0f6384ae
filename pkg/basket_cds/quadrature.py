"""
Adaptive quadrature settings and a thin wrapper over scipy's quad_vec
"""
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad_vec

from basket_cds.errors import InvalidParameterError, QuadratureError

logger = logging.getLogger(__name__)

PANEL_RULES = ('gk21', 'gk15', 'trapezoid')


@dataclass(frozen=True)
class QuadratureConfig:
    """
    Tolerances for every numeric integral in the library.

    Args:
        abs_tol: Absolute tolerance per integral (per nesting level)
        rel_tol: Relative tolerance per integral
        max_depth: Maximum number of adaptive subintervals
        panel_rule: Embedded rule used on each panel (gk21, gk15 or trapezoid)
        max_nesting: Largest number of nested default-time integrals evaluated
            analytically before deferring to simulation
    """
    abs_tol: float = 1e-9
    rel_tol: float = 1e-10
    max_depth: int = 200
    panel_rule: str = 'gk21'
    max_nesting: int = 3

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise InvalidParameterError(f"abs_tol must be > 0, got {self.abs_tol!r}")
        if not self.rel_tol >= 0:
            raise InvalidParameterError(f"rel_tol must be >= 0, got {self.rel_tol!r}")
        if int(self.max_depth) != self.max_depth or self.max_depth < 1:
            raise InvalidParameterError(f"max_depth must be >= 1, got {self.max_depth!r}")
        if self.panel_rule not in PANEL_RULES:
            raise InvalidParameterError(f"panel_rule must be one of {PANEL_RULES}, got {self.panel_rule!r}")
        if int(self.max_nesting) != self.max_nesting or self.max_nesting < 0:
            raise InvalidParameterError(f"max_nesting must be >= 0, got {self.max_nesting!r}")


DEFAULT_QUADRATURE = QuadratureConfig()


def integrate(func: Callable[[float], object], lower: float, upper: float,
              config: QuadratureConfig = DEFAULT_QUADRATURE,
              points: Optional[Sequence[float]] = None):
    """
    Integrate a scalar- or vector-valued function over [lower, upper].

    Args:
        func: Integrand; may return a float or a 1-D numpy array
        lower: Lower limit
        upper: Upper limit (must be >= lower)
        config: Tolerances and rule
        points: Interior break points where the integrand has features

    Returns:
        The integral (float or array, matching func)

    Raises:
        QuadratureError: if the subdivision limit is reached before tolerance
    """
    if upper < lower:
        raise InvalidParameterError(f"upper limit {upper} is below lower limit {lower}")
    if upper == lower:
        sample = np.asarray(func(lower), dtype=float)
        return 0.0 if sample.ndim == 0 else np.zeros_like(sample)

    interior = None
    if points:
        interior = [p for p in points if lower < p < upper]

    value, error, info = quad_vec(
        func, lower, upper,
        epsabs=config.abs_tol,
        epsrel=config.rel_tol,
        limit=int(config.max_depth),
        quadrature=config.panel_rule,
        points=interior or None,
        full_output=True,
    )
    if not info.success:
        raise QuadratureError(
            f"quadrature on [{lower:.6g}, {upper:.6g}] did not converge within "
            f"{config.max_depth} subintervals (error estimate {np.max(error):.3g})",
            estimate=float(np.max(value)), error=float(np.max(error)),
        )
    logger.debug("integral on [%.6g, %.6g]: %d evaluations, error %.3g",
                  lower, upper, info.neval, np.max(error))
    return float(value) if np.ndim(value) == 0 else value
