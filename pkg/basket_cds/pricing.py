"""
Swap rates of k-th-to-default basket CDS contracts

    S_k = (1 - R) E[e^{-r tau} 1{tau <= T}]
          / sum_i E[Delta_i e^{-r t_i} 1{tau > t_i} + (tau - t_{i-1}) e^{-r tau} 1{t_{i-1} < tau <= t_i}]

Exponential-mixture laws are priced in closed form term by term; any other law
is priced by adaptive quadrature on each payment interval, or by a fixed
Gauss-Legendre rule when the law can evaluate many points in one pass.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy.special import gammainc

from basket_cds.errors import InvalidParameterError, PricingError
from basket_cds.mixture_core import ExponentialMixture, HomogeneousSpec, sensitivity_coeffs
from basket_cds.quadrature import QuadratureConfig, integrate

logger = logging.getLogger(__name__)

PRICING_QUADRATURE = QuadratureConfig(abs_tol=1e-10, rel_tol=1e-10)

# Gauss-Legendre nodes per panel for laws with a batch evaluator
PANEL_NODES = 24


@dataclass(frozen=True)
class SwapContract:
    """
    k-th-to-default swap terms.

    Args:
        payment_times: Premium dates 0 = t_0 < t_1 < ... < t_N = T (years)
        recovery: Recovery rate R in [0, 1]
        rate: Continuously compounded riskless rate r >= 0
    """
    payment_times: Tuple[float, ...]
    recovery: float
    rate: float

    def __post_init__(self):
        times = tuple(float(t) for t in self.payment_times)
        if len(times) < 2 or times[0] != 0.0:
            raise InvalidParameterError('payment_times must start at 0 and contain at least one payment date')
        if any(later <= earlier for earlier, later in zip(times, times[1:])):
            raise InvalidParameterError('payment_times must be strictly increasing')
        if not 0.0 <= self.recovery <= 1.0:
            raise InvalidParameterError(f"recovery must lie in [0, 1], got {self.recovery!r}")
        if not self.rate >= 0.0:
            raise InvalidParameterError(f"rate must be >= 0, got {self.rate!r}")
        object.__setattr__(self, 'payment_times', times)

    @classmethod
    def regular(cls, maturity: float, period: float, recovery: float, rate: float) -> 'SwapContract':
        """Contract paying every `period` years up to `maturity` (last period may be short)."""
        if not maturity > 0 or not period > 0:
            raise InvalidParameterError('maturity and period must be > 0')
        count = int(np.ceil(maturity / period - 1e-12))
        times = [min(i * period, maturity) for i in range(count + 1)]
        times[-1] = maturity
        return cls(payment_times=tuple(times), recovery=recovery, rate=rate)

    @property
    def maturity(self) -> float:
        return self.payment_times[-1]

    @property
    def grid(self) -> np.ndarray:
        return np.asarray(self.payment_times)

    @property
    def deltas(self) -> np.ndarray:
        return np.diff(self.grid)


@dataclass(frozen=True)
class NumericLaw:
    """
    Default-time law known only through evaluators.

    Args:
        density: t -> f(t)
        survival: t -> P(tau > t)
        breakpoints: Times where the density has sharp features (quadrature hints)
        quadrature: Tolerances for pricing integrals
        label: Short description used in logs
        batch: Optional (times, horizons) -> (densities, survivals) evaluating many
            points in one pass; when set, legs use a fixed Gauss-Legendre rule
    """
    density: Callable[[float], float]
    survival: Callable[[float], float]
    breakpoints: Tuple[float, ...] = ()
    quadrature: QuadratureConfig = PRICING_QUADRATURE
    label: str = ''
    batch: Optional[Callable[[np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]] = None

    @classmethod
    def from_mixture(cls, mixture: ExponentialMixture,
                     quadrature: QuadratureConfig = PRICING_QUADRATURE) -> 'NumericLaw':
        return cls(density=mixture.density, survival=mixture.survival,
                   quadrature=quadrature, label='mixture via quadrature')


DefaultLaw = Union[ExponentialMixture, NumericLaw]


def _protection_kernel(lam: np.ndarray, maturity: float):
    """int_0^T e^{-lam t} dt and its lam-derivative."""
    value = -np.expm1(-lam * maturity) / lam
    dvalue = -gammainc(2, lam * maturity) / lam ** 2
    return value, dvalue


def _accrual_kernel(lam: np.ndarray, start: float, delta: float):
    """int_{start}^{start+delta} (t - start) e^{-lam t} dt and its lam-derivative."""
    shift = np.exp(-lam * start)
    value = shift * gammainc(2, lam * delta) / lam ** 2
    dvalue = -start * value - shift * 2.0 * gammainc(3, lam * delta) / lam ** 3
    return value, dvalue


def _mixture_kernels(rates: np.ndarray, contract: SwapContract):
    """
    Per-rate protection and premium functionals of a unit density term e^{-rho t},
    with their rho-derivatives.
    """
    r = contract.rate
    lam = r + rates
    loss = 1.0 - contract.recovery
    prot, dprot = _protection_kernel(lam, contract.maturity)
    prem = np.zeros_like(rates)
    dprem = np.zeros_like(rates)
    grid = contract.grid
    for start, end in zip(grid[:-1], grid[1:]):
        delta = end - start
        surv = np.exp(-rates * end) / rates
        dsurv = -np.exp(-rates * end) * (end / rates + 1.0 / rates ** 2)
        accrual, daccrual = _accrual_kernel(lam, start, delta)
        discount = delta * np.exp(-r * end)
        prem += discount * surv + accrual
        dprem += discount * dsurv + daccrual
    return loss * prot, prem, loss * dprot, dprem


def _panel_rule(contract: SwapContract, breakpoints: Tuple[float, ...]):
    """Composite Gauss-Legendre nodes, weights and payment-period index over [0, T]."""
    nodes, weights = np.polynomial.legendre.leggauss(PANEL_NODES)
    times, masses, period = [], [], []
    grid = contract.grid
    for i, (start, end) in enumerate(zip(grid[:-1], grid[1:])):
        edges = [start, *sorted(p for p in breakpoints if start < p < end), end]
        for lo, hi in zip(edges[:-1], edges[1:]):
            half = 0.5 * (hi - lo)
            times.append(lo + half * (nodes + 1.0))
            masses.append(half * weights)
            period.append(np.full(PANEL_NODES, i))
    return np.concatenate(times), np.concatenate(masses), np.concatenate(period)


def _batched_legs(law: NumericLaw, contract: SwapContract) -> Tuple[float, float]:
    r = contract.rate
    grid = contract.grid
    times, masses, period = _panel_rule(contract, law.breakpoints)
    density, survival = law.batch(times, grid[1:])
    weighted = masses * np.exp(-r * times) * density
    protection = (1.0 - contract.recovery) * weighted.sum()
    premium = (contract.deltas * np.exp(-r * grid[1:]) * survival).sum() \
        + ((times - grid[:-1][period]) * weighted).sum()
    return float(protection), float(premium)


def _numeric_legs(law: NumericLaw, contract: SwapContract) -> Tuple[float, float]:
    if law.batch is not None:
        return _batched_legs(law, contract)
    r = contract.rate
    loss = 1.0 - contract.recovery
    protection = 0.0
    premium = 0.0
    grid = contract.grid
    for start, end in zip(grid[:-1], grid[1:]):
        def integrand(t, start=start):
            weight = np.exp(-r * t) * law.density(t)
            return np.array([weight, (t - start) * weight])
        pieces = integrate(integrand, start, end, law.quadrature, points=law.breakpoints)
        protection += loss * pieces[0]
        premium += (end - start) * np.exp(-r * end) * law.survival(end) + pieces[1]
    return float(protection), float(premium)


def price_legs(law: DefaultLaw, contract: SwapContract) -> Tuple[float, float]:
    """(protection leg, premium leg per unit rate) for any default law."""
    if isinstance(law, ExponentialMixture):
        prot, prem, _, _ = _mixture_kernels(law.rates, contract)
        coeff = law.weights * law.scale
        return float(coeff @ prot), float(coeff @ prem)
    return _numeric_legs(law, contract)


def protection_leg(law: DefaultLaw, contract: SwapContract) -> float:
    """(1 - R) E[e^{-r tau} 1{tau <= T}]."""
    return price_legs(law, contract)[0]


def premium_leg_unit(law: DefaultLaw, contract: SwapContract) -> float:
    """Present value of the fee stream plus accrued fee, per unit swap rate."""
    return price_legs(law, contract)[1]


def swap_rate(law: DefaultLaw, contract: SwapContract) -> float:
    """
    Fair k-th-to-default swap rate.

    Raises:
        PricingError: if the premium leg vanishes
    """
    protection, premium = price_legs(law, contract)
    if not premium > 0:
        raise PricingError(f"premium leg is {premium!r}; the swap rate is undefined")
    return protection / premium


def swap_rate_sensitivities(spec: HomogeneousSpec, contract: SwapContract, k: int) -> Tuple[float, float]:
    """
    Analytic (dS_k/da, dS_k/dc) in the homogeneous constant-contagion model.

    Both legs are linear in the density, so each is differentiated term by term
    with d f/d a = sum_j alpha_j (1 - beta_j a t) e^{-beta_j a t} and
    d f/d c = sum_j (alpha'_j - alpha_j beta'_j a t) a e^{-beta_j a t};
    the swap-rate derivative follows from the quotient rule.
    """
    sens = sensitivity_coeffs(spec, k)
    base = sens.base
    a = spec.a
    alpha, betas = base.weights, base.betas
    prot, prem, dprot, dprem = _mixture_kernels(base.rates, contract)

    coeff = alpha * a
    protection = coeff @ prot
    premium = coeff @ prem
    if not premium > 0:
        raise PricingError(f"premium leg is {premium!r}; the swap rate is undefined")

    # coefficient alpha_j a and rate beta_j a both move with a and c
    dprotection_da = alpha @ prot + (coeff * betas) @ dprot
    dpremium_da = alpha @ prem + (coeff * betas) @ dprem
    dcoeff_dc = sens.dalpha_dc * a
    drate_dc = sens.dbeta_dc * a
    dprotection_dc = dcoeff_dc @ prot + (coeff * drate_dc) @ dprot
    dpremium_dc = dcoeff_dc @ prem + (coeff * drate_dc) @ dprem

    theta_a = (dprotection_da * premium - protection * dpremium_da) / premium ** 2
    theta_c = (dprotection_dc * premium - protection * dpremium_dc) / premium ** 2
    return float(theta_a), float(theta_c)


def finite_difference_sensitivity(price: Callable[[float], float], x: float,
                                  relative_step: float = 1e-5) -> Tuple[float, float]:
    """
    Central difference of a swap-rate callable.

    Args:
        price: x -> swap rate
        x: Point of differentiation
        relative_step: Step as a fraction of |x| (absolute when x == 0)

    Returns:
        (derivative estimate, step used)
    """
    step = relative_step * abs(x) if x != 0 else relative_step
    if x - step < 0 <= x:
        # one-sided at the boundary of a non-negative parameter
        return (price(x + step) - price(x)) / step, step
    return (price(x + step) - price(x - step)) / (2.0 * step), step
