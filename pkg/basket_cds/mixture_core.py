"""
Exact exponential-mixture law of the k-th default time in the homogeneous
constant-contagion model

Every name defaults with intensity a * (1 + c * #defaults so far). After j
defaults the n - j survivors share the aggregate rate a * beta_j with
beta_j = (n - j)(1 + j c), so the k-th default time is a sum of k independent
exponential stages and its density is a signed exponential mixture.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import Tuple, Union

import numpy as np

from basket_cds.errors import DegenerateParameterError, InvalidParameterError
from basket_cds.quadrature import DEFAULT_QUADRATURE, QuadratureConfig, integrate

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Relative gap below which two decay rates are treated as equal
COLLISION_TOLERANCE = 1e-9

# Shift applied to c by the opt-in perturbation of degenerate parameters
PERTURBATION_SHIFT = 1e-7


@dataclass(frozen=True)
class HomogeneousSpec:
    """
    Homogeneous basket with constant contagion.

    Args:
        n: Number of names in the basket
        a: Base hazard rate per name (per year)
        c: Contagion multiplier applied per prior default
    """
    n: int
    a: float
    c: float

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise InvalidParameterError(f"n must be a positive integer, got {self.n!r}")
        if not self.a > 0:
            raise InvalidParameterError(f"a must be > 0, got {self.a!r}")
        if not self.c >= 0:
            raise InvalidParameterError(f"c must be >= 0, got {self.c!r}")
        object.__setattr__(self, 'n', int(self.n))

    @property
    def betas(self) -> np.ndarray:
        """All stage multipliers beta_0 .. beta_{n-1}."""
        j = np.arange(self.n, dtype=float)
        return (self.n - j) * (1.0 + j * self.c)

    def perturbed(self, shift: float = PERTURBATION_SHIFT) -> 'HomogeneousSpec':
        """Copy with c moved by `shift`; used only behind an explicit opt-in."""
        return replace(self, c=self.c + shift)


@dataclass(frozen=True, eq=False)
class ExponentialMixture:
    """
    Signed exponential mixture f(t) = sum_j w_j * s * exp(-beta_j * s * t).

    The weights and multipliers are stored separately from the scale s so that
    derivatives with respect to s stay exact. Laws whose coefficients already
    carry the rate (two-group model) use s = 1.

    Args:
        weights: Mixture weights alpha_j
        betas: Dimensionless decay multipliers beta_j (rates are beta_j * scale)
        scale: Rate scale s (per year)
    """
    weights: np.ndarray
    betas: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        weights = np.array(self.weights, dtype=float)
        betas = np.array(self.betas, dtype=float)
        if weights.ndim != 1 or weights.shape != betas.shape or weights.size == 0:
            raise InvalidParameterError('weights and betas must be non-empty 1-D arrays of equal length')
        if not self.scale > 0:
            raise InvalidParameterError(f"scale must be > 0, got {self.scale!r}")
        if np.any(betas <= 0):
            raise InvalidParameterError('all mixture rates must be positive')
        weights.setflags(write=False)
        betas.setflags(write=False)
        object.__setattr__(self, 'weights', weights)
        object.__setattr__(self, 'betas', betas)
        object.__setattr__(self, 'scale', float(self.scale))

    @property
    def rates(self) -> np.ndarray:
        return self.betas * self.scale

    @property
    def terms(self) -> Tuple[Tuple[float, float], ...]:
        """(weight, rate) pairs."""
        return tuple(zip(self.weights.tolist(), self.rates.tolist()))

    def _kernel(self, t: ArrayLike) -> np.ndarray:
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        return np.exp(-np.outer(np.maximum(t_arr, 0.0), self.rates))

    def density(self, t: ArrayLike) -> ArrayLike:
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        values = self._kernel(t_arr) @ (self.weights * self.scale)
        values = np.where(t_arr < 0, 0.0, values)
        return values if np.ndim(t) else float(values[0])

    def survival(self, t: ArrayLike) -> ArrayLike:
        """P(tau > t) = sum_j (w_j / beta_j) exp(-rate_j t)."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        values = self._kernel(t_arr) @ (self.weights / self.betas)
        values = np.where(t_arr < 0, 1.0, values)
        return values if np.ndim(t) else float(values[0])

    def cdf(self, t: ArrayLike) -> ArrayLike:
        return 1.0 - self.survival(t)

    def density_dscale(self, t: ArrayLike) -> ArrayLike:
        """d f / d s = sum_j w_j (1 - beta_j s t) exp(-beta_j s t)."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        factor = 1.0 - np.outer(np.maximum(t_arr, 0.0), self.rates)
        values = (self._kernel(t_arr) * factor) @ self.weights
        values = np.where(t_arr < 0, 0.0, values)
        return values if np.ndim(t) else float(values[0])

    def total_mass(self) -> float:
        return float(np.sum(self.weights / self.betas))

    def mean(self) -> float:
        return float(np.sum(self.weights / (self.scale * self.betas ** 2)))

    def condition_number(self) -> float:
        """max|w| * s / rate_min; large values flag cancellation in the alternating sum."""
        return float(np.max(np.abs(self.weights)) / np.min(self.betas))


@dataclass(frozen=True, eq=False)
class MixtureSensitivity:
    """
    Derivatives of a homogeneous mixture with respect to the contagion c.

    Args:
        base: The mixture being differentiated
        dalpha_dc: d alpha_{k,j} / d c
        dbeta_dc: d beta_j / d c = (n - j) j
    """
    base: ExponentialMixture
    dalpha_dc: np.ndarray
    dbeta_dc: np.ndarray

    def density_da(self, t: ArrayLike) -> ArrayLike:
        return self.base.density_dscale(t)

    def density_dc(self, t: ArrayLike) -> ArrayLike:
        """d f / d c = sum_j (alpha'_j - alpha_j beta'_j a t) a exp(-beta_j a t)."""
        base = self.base
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        tt = np.maximum(t_arr, 0.0)
        coeff = self.dalpha_dc[None, :] - base.weights[None, :] * self.dbeta_dc[None, :] * base.scale * tt[:, None]
        values = np.sum(coeff * base.scale * base._kernel(tt), axis=1)
        values = np.where(t_arr < 0, 0.0, values)
        return values if np.ndim(t) else float(values[0])


def _check_k(spec: HomogeneousSpec, k: int):
    if isinstance(k, bool) or int(k) != k or not 1 <= k <= spec.n:
        raise InvalidParameterError(f"k must satisfy 1 <= k <= n={spec.n}, got {k!r}")


def check_distinct_rates(betas: np.ndarray, labels=None):
    """
    Raise DegenerateParameterError if two rates are closer than
    COLLISION_TOLERANCE * max(rates).

    Args:
        betas: Rates to compare
        labels: Optional names for each rate used in the error message
    """
    betas = np.asarray(betas, dtype=float)
    if betas.size < 2:
        return
    labels = list(labels) if labels is not None else list(range(betas.size))
    tol = COLLISION_TOLERANCE * float(np.max(np.abs(betas)))
    gaps = np.abs(betas[:, None] - betas[None, :])
    np.fill_diagonal(gaps, np.inf)
    i, j = np.unravel_index(np.argmin(gaps), gaps.shape)
    if gaps[i, j] < tol:
        i, j = min(i, j), max(i, j)
        raise DegenerateParameterError(
            f"rates {labels[i]} and {labels[j]} collide "
            f"({betas[i]:.12g} vs {betas[j]:.12g}); the exponential-mixture law "
            f"is undefined for these parameters",
            pair=(labels[i], labels[j]),
            values=(float(betas[i]), float(betas[j])),
        )


def beta(n: int, c: float, j: int) -> float:
    """Stage multiplier beta_j = (n - j)(1 + j c) after j defaults."""
    if isinstance(j, bool) or int(j) != j or not 0 <= j <= n - 1:
        raise InvalidParameterError(f"j must satisfy 0 <= j <= n-1={n - 1}, got {j!r}")
    return float((n - j) * (1 + j * c))


def stage_rates(spec: HomogeneousSpec, k: int) -> np.ndarray:
    """Rates a * beta_i of the k independent exponential stages of tau^k."""
    _check_k(spec, k)
    return spec.a * spec.betas[:k]


def _alpha_recursion(betas: np.ndarray, n: int, k: int, dbetas: np.ndarray = None):
    alpha = np.array([float(n)])
    dalpha = np.zeros(1)
    for m in range(1, k):
        b_k, b = betas[m], betas[:m]
        gamma = b_k / (b_k - b)
        if dbetas is not None:
            dgamma = (b_k * dbetas[:m] - b * dbetas[m]) / (b_k - b) ** 2
            step = alpha * dgamma + dalpha * gamma
            dalpha = np.append(step, -np.sum(step))
        scaled = alpha * gamma
        alpha = np.append(scaled, -np.sum(scaled))
    return alpha, dalpha


def kth_default_mixture(spec: HomogeneousSpec, k: int) -> ExponentialMixture:
    """
    Density of the k-th default time as an exponential mixture.

    alpha_{1,0} = n and
    alpha_{k+1,j} = alpha_{k,j} beta_k / (beta_k - beta_j) for j < k,
    alpha_{k+1,k} = -sum_u alpha_{k,u} beta_k / (beta_k - beta_u).

    Args:
        spec: Homogeneous basket
        k: Seniority, 1 <= k <= n

    Returns:
        ExponentialMixture with weights alpha_{k,j}, multipliers beta_j, scale a

    Raises:
        DegenerateParameterError: if two of the basket's stage multipliers coincide
    """
    _check_k(spec, k)
    betas = spec.betas
    check_distinct_rates(betas, labels=[f"beta_{j}" for j in range(spec.n)])
    alpha, _ = _alpha_recursion(betas, spec.n, k)
    mixture = ExponentialMixture(weights=alpha, betas=betas[:k], scale=spec.a)
    if mixture.condition_number() > 1e10:
        logger.warning("mixture for n=%d, k=%d has condition number %.3g; expect cancellation error",
                       spec.n, k, mixture.condition_number())
    return mixture


def closed_form_alpha(n: int, c: float, k: int, j: int) -> float:
    """
    Product/factorial expression for alpha_{k,j}:

        (-1)^{k-1-j} n! prod_{m=1}^{k-1}(1 + m c)
        / ((n-k)! j! (k-1-j)! prod_{m=0, m != j}^{k-1}(1 + (m + j - n) c))
    """
    if isinstance(k, bool) or int(k) != k or not 1 <= k <= n:
        raise InvalidParameterError(f"k must satisfy 1 <= k <= n={n}, got {k!r}")
    if isinstance(j, bool) or int(j) != j or not 0 <= j <= k - 1:
        raise InvalidParameterError(f"j must satisfy 0 <= j <= k-1={k - 1}, got {j!r}")
    numerator = math.factorial(n) * math.prod(1.0 + m * c for m in range(1, k))
    denominator = float(math.factorial(n - k) * math.factorial(j) * math.factorial(k - 1 - j))
    for m in range(k):
        if m == j:
            continue
        factor = 1.0 + (m + j - n) * c
        if abs(factor) < COLLISION_TOLERANCE:
            raise DegenerateParameterError(
                f"factor 1 + ({m} + {j} - {n}) c vanishes for c={c!r}",
                pair=(m, j), values=(beta(n, c, m), beta(n, c, j)),
            )
        denominator *= factor
    sign = -1.0 if (k - 1 - j) % 2 else 1.0
    return sign * numerator / denominator


def kth_default_mean(spec: HomogeneousSpec, k: int) -> float:
    """E[tau^k] = sum_{i<k} 1 / (a (1 + i c)(n - i))."""
    return float(np.sum(1.0 / stage_rates(spec, k)))


def kth_default_variance(spec: HomogeneousSpec, k: int) -> float:
    """Var[tau^k] = sum_{i<k} 1 / (a (1 + i c)(n - i))^2."""
    return float(np.sum(1.0 / stage_rates(spec, k) ** 2))


def mean_bound_fixed_k(n: int, k: int, a: float) -> float:
    """Upper bound k / (a (n - k)) on E[tau^k(n)], valid for n > k."""
    if not n > k >= 1:
        raise InvalidParameterError(f"bound requires n > k >= 1, got n={n}, k={k}")
    return k / (a * (n - k))


def mean_bound_full_basket(k: int, a: float, c: float) -> float:
    """Upper bound (2c+2)/(a(ck+1)) * (1 + ln(1+ck)/c) on E[tau^k(n)], c > 0."""
    if not c > 0:
        raise InvalidParameterError(f"bound requires c > 0, got {c!r}")
    return (2 * c + 2) / (a * (c * k + 1)) * (1 + math.log1p(c * k) / c)


def sensitivity_coeffs(spec: HomogeneousSpec, k: int) -> MixtureSensitivity:
    """
    alpha'_{k,j} = d alpha_{k,j} / d c through the differentiated recursion

        alpha'_{k+1,j} = alpha_{k,j} gamma'_{k,j} + alpha'_{k,j} gamma_{k,j},  j < k
        alpha'_{k+1,k} = -sum_u (alpha_{k,u} gamma'_{k,u} + alpha'_{k,u} gamma_{k,u})

    with gamma = beta_k / (beta_k - beta_j), alpha'_{1,0} = 0 and
    gamma' = (beta_k beta_j' - beta_j beta_k') / (beta_k - beta_j)^2.
    """
    base = kth_default_mixture(spec, k)
    j = np.arange(spec.n, dtype=float)
    dbetas = (spec.n - j) * j
    _, dalpha = _alpha_recursion(spec.betas, spec.n, k, dbetas=dbetas)
    dalpha.setflags(write=False)
    return MixtureSensitivity(base=base, dalpha_dc=dalpha, dbeta_dc=dbetas[:k])


def convolution_density(spec: HomogeneousSpec, k: int, t: float,
                        quad: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """
    Density of tau^k from the stage convolution
    f_{k+1}(t) = int_0^t f_k(s) a beta_k e^{-a beta_k (t - s)} ds,
    evaluated by nested quadrature. Independent of the mixture coefficients,
    so it also works where two stage rates coincide.
    """
    rates = stage_rates(spec, k)
    if t < 0:
        return 0.0

    def stage(level: int, u: float) -> float:
        rate = rates[level]
        if level == 0:
            return float(rate * np.exp(-rate * u))
        return integrate(lambda s: stage(level - 1, s) * rate * np.exp(-rate * (u - s)), 0.0, u, quad)

    return float(stage(k - 1, t))
