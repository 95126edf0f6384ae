"""
Ordered default times when contagion decays exponentially

Each survivor defaults with intensity a * (1 + c * sum_i exp(-d (t - tau_i))) over
the past default times tau_i. The hazard between defaults integrates in closed
form; only the outer default-time integrals over the ordered simplex are numeric.
"""
import logging
from dataclasses import dataclass
from functools import partial
from typing import Callable, Sequence, Tuple

import numpy as np

from basket_cds.errors import InvalidParameterError, NestingLimitError
from basket_cds.mixture_core import HomogeneousSpec
from basket_cds.pricing import NumericLaw
from basket_cds.quadrature import DEFAULT_QUADRATURE, QuadratureConfig, integrate

logger = logging.getLogger(__name__)

# Below this decay rate (1 - e^{-ds}) / d is replaced by its limit s
DECAY_FLOOR = 1e-12


@dataclass(frozen=True)
class DecaySpec:
    """
    Homogeneous basket with exponentially decaying contagion.

    Args:
        n: Number of names
        a: Base hazard rate per name (per year)
        c: Contagion multiplier
        d: Decay rate of the contagion effect (per year); d = 0 is constant contagion
    """
    n: int
    a: float
    c: float
    d: float

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise InvalidParameterError(f"n must be a positive integer, got {self.n!r}")
        if not self.a > 0:
            raise InvalidParameterError(f"a must be > 0, got {self.a!r}")
        if not self.c >= 0:
            raise InvalidParameterError(f"c must be >= 0, got {self.c!r}")
        if not self.d >= 0:
            raise InvalidParameterError(f"d must be >= 0, got {self.d!r}")
        object.__setattr__(self, 'n', int(self.n))

    def as_homogeneous(self) -> HomogeneousSpec:
        """The d = 0 model with the same n, a, c."""
        return HomogeneousSpec(n=self.n, a=self.a, c=self.c)


def _phi(d: float, s):
    """int_0^s e^{-d u} du."""
    if d < DECAY_FLOOR:
        return s
    return -np.expm1(-d * s) / d


def _validate_past(spec: DecaySpec, past: Sequence[float], t: float) -> Tuple[float, ...]:
    past = tuple(float(x) for x in past)
    if len(past) >= spec.n:
        raise InvalidParameterError(f"{len(past)} past defaults leave no survivor in a basket of {spec.n}")
    if past and past[0] < 0:
        raise InvalidParameterError('default times must be >= 0')
    if any(later <= earlier for earlier, later in zip(past, past[1:])):
        raise InvalidParameterError(f"past default times must be strictly increasing, got {past}")
    last = past[-1] if past else 0.0
    if t < last:
        raise InvalidParameterError(f"t={t} precedes the last default at {last}")
    return past


def _hazard(spec: DecaySpec, past: Tuple[float, ...], t: float) -> float:
    excitation = sum(np.exp(-spec.d * (t - tau)) for tau in past)
    return spec.a * (spec.n - len(past)) * (1.0 + spec.c * excitation)


def _integrated_hazard(spec: DecaySpec, past: Tuple[float, ...], t: float) -> float:
    last = past[-1] if past else 0.0
    elapsed = t - last
    carried = sum(np.exp(-spec.d * (last - tau)) for tau in past)
    return spec.a * (spec.n - len(past)) * (elapsed + spec.c * carried * _phi(spec.d, elapsed))


def _conditional_density(spec: DecaySpec, past: Tuple[float, ...], t: float) -> float:
    return _hazard(spec, past, t) * np.exp(-_integrated_hazard(spec, past, t))


def hazard(spec: DecaySpec, past_defaults: Sequence[float], t: float) -> float:
    """Aggregate default intensity of the survivors at t given the past defaults."""
    return _hazard(spec, _validate_past(spec, past_defaults, t), t)


def integrated_hazard(spec: DecaySpec, past_defaults: Sequence[float], t: float) -> float:
    """Aggregate hazard accumulated between the last default and t."""
    return _integrated_hazard(spec, _validate_past(spec, past_defaults, t), t)


def conditional_density(spec: DecaySpec, past_defaults: Sequence[float], t: float) -> float:
    """
    Density of the next default time at t given the first k default times.

    Args:
        spec: Decay model
        past_defaults: tau^1 < ... < tau^k (may be empty)
        t: Candidate time of default k+1, t >= tau^k

    Returns:
        hazard(t) * exp(-integrated hazard since tau^k)
    """
    return _conditional_density(spec, _validate_past(spec, past_defaults, t), t)


def joint_density(spec: DecaySpec, times: Sequence[float]) -> float:
    """Joint density of (tau^1, ..., tau^k); zero off the ordered simplex."""
    times = tuple(float(x) for x in times)
    if not times:
        raise InvalidParameterError('at least one default time is required')
    if len(times) > spec.n:
        raise InvalidParameterError(f"{len(times)} default times exceed basket size {spec.n}")
    if times[0] < 0 or any(later <= earlier for earlier, later in zip(times, times[1:])):
        return 0.0
    value = 1.0
    for i, t in enumerate(times):
        value *= _conditional_density(spec, times[:i], t)
    return float(value)


def pair_density(spec: DecaySpec, t1: float, t2: float) -> float:
    """
    Two-name joint density
    2 a^2 (1 + c e^{-d(t2-t1)}) exp(-a(t1 + t2) - a c (1 - e^{-d(t2-t1)}) / d) for t1 < t2.
    """
    if spec.n != 2:
        raise InvalidParameterError(f"pair_density needs n=2, got n={spec.n}")
    if not 0 <= t1 < t2:
        return 0.0
    gap = t2 - t1
    a, c = spec.a, spec.c
    return float(2.0 * a * a * (1.0 + c * np.exp(-spec.d * gap))
                 * np.exp(-a * (t1 + t2) - a * c * _phi(spec.d, gap)))


def _simplex_integral(spec: DecaySpec, t: float, depth: int,
                      tail: Callable[[Tuple[float, ...]], float],
                      quad: QuadratureConfig) -> float:
    """
    int over 0 < t_1 < ... < t_depth < t of the joint density of the first
    `depth` defaults times tail(t_1, ..., t_depth).
    """
    def nested(past: Tuple[float, ...], remaining: int) -> float:
        if remaining == 0:
            return tail(past)
        lower = past[-1] if past else 0.0
        if lower >= t:
            return 0.0
        return integrate(
            lambda s: _conditional_density(spec, past, s) * nested(past + (s,), remaining - 1),
            lower, t, quad,
        )
    return float(nested((), depth))


def _check_nesting(spec: DecaySpec, k: int, quad: QuadratureConfig):
    if isinstance(k, bool) or int(k) != k or not 1 <= k <= spec.n:
        raise InvalidParameterError(f"k must satisfy 1 <= k <= n={spec.n}, got {k!r}")
    if k - 1 > quad.max_nesting:
        raise NestingLimitError(
            f"k={k} needs {k - 1} nested integrals; max_nesting is {quad.max_nesting}"
        )


def kth_density_decay(spec: DecaySpec, k: int, t: float,
                      quad: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """
    Marginal density of the k-th default time.

    Raises:
        NestingLimitError: if k - 1 exceeds quad.max_nesting
        QuadratureError: if an inner integral fails to converge
    """
    _check_nesting(spec, k, quad)
    if t < 0:
        return 0.0
    if k == 1:
        rate = spec.n * spec.a
        return float(rate * np.exp(-rate * t))
    if spec.n == 2:
        return float(integrate(lambda t1: pair_density(spec, t1, t), 0.0, t, quad))
    return _simplex_integral(
        spec, t, k - 1, lambda past: _conditional_density(spec, past, t), quad,
    )


def kth_survival_decay(spec: DecaySpec, k: int, t: float,
                       quad: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """
    P(tau^k > t) = sum_{m<k} P(exactly m defaults by t).

    P(N(t) = m) integrates the joint density of the first m defaults against the
    probability that no further default occurs before t.
    """
    _check_nesting(spec, k, quad)
    if t <= 0:
        return 1.0
    total = 0.0
    for m in range(k):
        total += _simplex_integral(
            spec, t, m, lambda past: np.exp(-_integrated_hazard(spec, past, t)), quad,
        )
    return float(total)


def _first_default_batch(spec: DecaySpec, times: np.ndarray, horizons: np.ndarray):
    rate = spec.n * spec.a
    return rate * np.exp(-rate * np.asarray(times)), np.exp(-rate * np.asarray(horizons))


def pair_law_batch(spec: DecaySpec, times: np.ndarray, horizons: np.ndarray,
                   quad: QuadratureConfig = DEFAULT_QUADRATURE):
    """
    Density of tau^2 at `times` and P(tau^2 > t) at `horizons` for n=2, from a
    single vector-valued integral over the first default time.

    With t1 = u t both integrands live on u in [0, 1]:
    f(t) = int_0^1 t pair_density(u t, t) du and
    P(tau^2 > t) = e^{-2at} + int_0^1 t 2a e^{-2a u t} e^{-a(t - u t) - a c phi(t - u t)} du.
    """
    if spec.n != 2:
        raise InvalidParameterError(f"pair_law_batch needs n=2, got n={spec.n}")
    times = np.asarray(times, dtype=float)
    horizons = np.asarray(horizons, dtype=float)
    a, c, d = spec.a, spec.c, spec.d

    def integrand(u):
        gap = (1.0 - u) * times
        density = times * 2.0 * a * a * (1.0 + c * np.exp(-d * gap)) \
            * np.exp(-a * (u * times + times) - a * c * _phi(d, gap))
        tail_gap = (1.0 - u) * horizons
        one_default = horizons * 2.0 * a * np.exp(-2.0 * a * u * horizons) \
            * np.exp(-a * tail_gap - a * c * _phi(d, tail_gap))
        return np.concatenate([density, one_default])

    values = integrate(integrand, 0.0, 1.0, quad)
    return values[:times.size], np.exp(-2.0 * a * horizons) + values[times.size:]


def _decay_breakpoints(spec: DecaySpec) -> Tuple[float, ...]:
    # the contagion transient after a default lives on the 1/d scale
    if spec.d < DECAY_FLOOR:
        return ()
    return tuple(scale / spec.d for scale in (1.0, 4.0, 16.0))


def kth_default_law_decay(spec: DecaySpec, k: int,
                          quad: QuadratureConfig = DEFAULT_QUADRATURE) -> NumericLaw:
    """Default-time law of tau^k for quadrature pricing."""
    _check_nesting(spec, k, quad)
    logger.debug("decay law n=%d k=%d a=%g c=%g d=%g", spec.n, k, spec.a, spec.c, spec.d)
    batch = None
    if k == 1:
        batch = partial(_first_default_batch, spec)
    elif spec.n == 2:
        batch = partial(pair_law_batch, spec, quad=quad)
    return NumericLaw(
        density=lambda t: kth_density_decay(spec, k, t, quad),
        survival=lambda t: kth_survival_decay(spec, k, t, quad),
        breakpoints=_decay_breakpoints(spec),
        quadrature=quad,
        label=f"decay n={spec.n} k={k}",
        batch=batch,
    )
