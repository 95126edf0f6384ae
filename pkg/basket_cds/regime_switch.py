"""
Two-state Markov regime-switching intensity

The common intensity X(t) alternates between x1 and x2 with exit rates eta1, eta2.
Conditional on the path, the k-th default time is the homogeneous mixture with
time changed by int_0^t X(s) ds = x2 t + (x1 - x2) T(t), where T(t) is the time
spent in state 1. Averaging over the chain needs only the occupation-time
transforms psi_i(l, t) = E_i[exp(-l T(t))].
"""
import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from basket_cds.errors import InvalidParameterError
from basket_cds.mixture_core import ExponentialMixture, HomogeneousSpec, kth_default_mixture
from basket_cds.pricing import NumericLaw
from basket_cds.quadrature import QuadratureConfig

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# |omega| below this fraction of max(1, alpha^2) uses the polynomial branch
OMEGA_GUARD = 1e-10

TRIG, POLYNOMIAL, HYPERBOLIC = 'trig', 'polynomial', 'hyperbolic'


@dataclass(frozen=True)
class TwoStateSpec:
    """
    Homogeneous basket driven by a two-state intensity chain.

    Args:
        x1: Intensity level in state 1 (per year)
        x2: Intensity level in state 2 (per year)
        eta1: Exit rate of state 1 (per year)
        eta2: Exit rate of state 2 (per year)
        initial_state: 1 or 2
        n: Number of names
        c: Contagion multiplier
    """
    x1: float
    x2: float
    eta1: float
    eta2: float
    initial_state: int
    n: int
    c: float

    def __post_init__(self):
        if not self.x1 > 0 or not self.x2 > 0:
            raise InvalidParameterError(f"x1 and x2 must be > 0, got {self.x1!r}, {self.x2!r}")
        if not self.eta1 >= 0 or not self.eta2 >= 0:
            raise InvalidParameterError(f"eta1 and eta2 must be >= 0, got {self.eta1!r}, {self.eta2!r}")
        if self.initial_state not in (1, 2):
            raise InvalidParameterError(f"initial_state must be 1 or 2, got {self.initial_state!r}")
        # validates n and c
        self.unit_homogeneous()

    def unit_homogeneous(self) -> HomogeneousSpec:
        """Mixture skeleton with a = 1; the chain supplies the time scale."""
        return HomogeneousSpec(n=self.n, a=1.0, c=self.c)

    def level(self, state: int) -> float:
        return self.x1 if state == 1 else self.x2


@dataclass(frozen=True)
class OccupationTransform:
    """
    Closed form of psi_i(l, t) for one transform argument l.

    psi_i = e^{-alpha t} [C(t) + K_i S(t)] with K_1 = beta, K_2 = alpha and
    (C, S) = (cos wt, sin(wt)/w), (1, t) or (cosh wt, sinh(wt)/w) as omega is
    positive, zero or negative.
    """
    l: float
    eta1: float
    eta2: float

    @property
    def alpha(self) -> float:
        return 0.5 * (self.eta1 + self.eta2 + self.l)

    @property
    def beta(self) -> float:
        return 0.5 * (self.eta1 + self.eta2 - self.l)

    @property
    def omega(self) -> float:
        return self.l * self.eta2 - self.alpha ** 2

    @property
    def branch(self) -> str:
        omega = self.omega
        if abs(omega) < OMEGA_GUARD * max(1.0, self.alpha ** 2):
            return POLYNOMIAL
        return TRIG if omega > 0 else HYPERBOLIC

    def gain(self, i: int) -> float:
        if i not in (1, 2):
            raise InvalidParameterError(f"state must be 1 or 2, got {i!r}")
        return self.beta if i == 1 else self.alpha

    def basis(self, t: ArrayLike, shift: float = 0.0):
        """e^{-(alpha+shift) t} C(t) and e^{-(alpha+shift) t} S(t)."""
        t = np.asarray(t, dtype=float)
        branch = self.branch
        decay = self.alpha + shift
        if branch == HYPERBOLIC:
            w = np.sqrt(-self.omega)
            envelope = 0.5 * np.exp((w - decay) * t)
            return envelope * (1.0 + np.exp(-2.0 * w * t)), envelope * (-np.expm1(-2.0 * w * t)) / w
        envelope = np.exp(-decay * t)
        if branch == TRIG:
            w = np.sqrt(self.omega)
            return envelope * np.cos(w * t), envelope * np.sin(w * t) / w
        return envelope, envelope * t


def _check_time(t: ArrayLike):
    if np.any(np.asarray(t) < 0):
        raise InvalidParameterError('t must be >= 0')


def psi(transform: OccupationTransform, i: int, t: ArrayLike, shift: float = 0.0) -> ArrayLike:
    """
    E_i[exp(-l T(t))] times exp(-shift t).

    Args:
        transform: Transform argument and chain rates
        i: Initial state (1 or 2)
        t: Time(s) >= 0
        shift: Extra exponential discount folded into the same exponent
    """
    _check_time(t)
    gain = transform.gain(i)
    if transform.l == 0:
        value = np.exp(-shift * np.asarray(t, dtype=float))
    else:
        cos_part, sin_part = transform.basis(t, shift)
        value = cos_part + gain * sin_part
    return value if np.ndim(t) else float(value)


def psi_derivative(transform: OccupationTransform, i: int, t: ArrayLike, shift: float = 0.0) -> ArrayLike:
    """
    d psi_i / dt times exp(-shift t):
    e^{-alpha t} [(K - alpha) C(t) - (alpha K + omega) S(t)].
    """
    _check_time(t)
    gain = transform.gain(i)
    if transform.l == 0:
        value = np.zeros_like(np.asarray(t, dtype=float))
    else:
        alpha, omega = transform.alpha, transform.omega
        if transform.branch == POLYNOMIAL:
            omega = 0.0
        cos_part, sin_part = transform.basis(t, shift)
        value = (gain - alpha) * cos_part - (alpha * gain + omega) * sin_part
    return value if np.ndim(t) else float(value)


def _terms(spec: TwoStateSpec, k: int):
    mixture = kth_default_mixture(spec.unit_homogeneous(), k)
    for weight, beta in zip(mixture.weights, mixture.betas):
        transform = OccupationTransform(l=beta * (spec.x1 - spec.x2), eta1=spec.eta1, eta2=spec.eta2)
        yield weight, beta, transform


def kth_survival_rs(spec: TwoStateSpec, k: int, t: ArrayLike) -> ArrayLike:
    """P(tau^k > t) = sum_j (alpha_j / beta_j) e^{-beta_j x2 t} psi_i(beta_j (x1 - x2), t)."""
    _check_time(t)
    total = 0.0
    for weight, beta, transform in _terms(spec, k):
        total = total + weight / beta * psi(transform, spec.initial_state, t, shift=beta * spec.x2)
    return total


def kth_density_rs(spec: TwoStateSpec, k: int, t: ArrayLike) -> ArrayLike:
    """f(t) = -d/dt P(tau^k > t), with each psi branch differentiated in closed form."""
    _check_time(t)
    total = 0.0
    state = spec.initial_state
    for weight, beta, transform in _terms(spec, k):
        shift = beta * spec.x2
        level = psi(transform, state, t, shift=shift)
        slope = psi_derivative(transform, state, t, shift=shift)
        total = total + weight / beta * (shift * level - slope)
    return total


def kth_default_law_rs(spec: TwoStateSpec, k: int,
                       quadrature: QuadratureConfig = QuadratureConfig(abs_tol=1e-10)) -> NumericLaw:
    """Default-time law of tau^k for quadrature pricing."""
    if spec.x1 == spec.x2:
        logger.debug("x1 == x2: regime chain is irrelevant, density is a pure mixture")
    return NumericLaw(
        density=lambda t: float(kth_density_rs(spec, k, t)),
        survival=lambda t: float(kth_survival_rs(spec, k, t)),
        quadrature=quadrature,
        label=f"regime switching n={spec.n} k={k}",
    )


def constant_level_mixture(spec: TwoStateSpec, k: int) -> ExponentialMixture:
    """Mixture law when x1 == x2; the chain then has no effect."""
    if spec.x1 != spec.x2:
        raise InvalidParameterError('constant_level_mixture needs x1 == x2')
    return kth_default_mixture(HomogeneousSpec(n=spec.n, a=spec.x1, c=spec.c), k)
