"""
Two-group heterogeneous contagion

Names in G1 (n1 of them) and G2 (n2) carry their own base rates and react
differently to defaults in either group. After k defaults, m of them in G1,
the surviving G1 names default at the aggregate rate

    zeta_{k,m}  = a (n1 - m) [1 + b m + c (k - m)]

and the G2 survivors at

    zeta~_{k,m} = a~ (n2 - (k - m)) [1 + b~ m + c~ (k - m)].

The joint density of (tau^k, N^k) is a sum of exponentials whose coefficients
follow from convolving the holding time of each lattice state.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.stats import hypergeom

from basket_cds.errors import DegenerateParameterError, InvalidParameterError
from basket_cds.mixture_core import COLLISION_TOLERANCE, ExponentialMixture, HomogeneousSpec, kth_default_mixture

logger = logging.getLogger(__name__)

# Rates closer than this (relative) are merged in the marginal law
MERGE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class TwoGroupSpec:
    """
    Two-group basket.

    Args:
        n1: Size of group G1
        n2: Size of group G2
        a: Base rate of G1 names (per year)
        a_tilde: Base rate of G2 names (per year)
        b: Effect of a G1 default on G1 names
        c: Effect of a G2 default on G1 names
        b_tilde: Effect of a G1 default on G2 names
        c_tilde: Effect of a G2 default on G2 names
    """
    n1: int
    n2: int
    a: float
    a_tilde: float
    b: float
    c: float
    b_tilde: float
    c_tilde: float

    def __post_init__(self):
        for name in ('n1', 'n2'):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 0:
                raise InvalidParameterError(f"{name} must be a non-negative integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.n1 + self.n2 < 1:
            raise InvalidParameterError('the basket needs at least one name')
        if not self.a > 0 or not self.a_tilde > 0:
            raise InvalidParameterError(f"a and a_tilde must be > 0, got {self.a!r}, {self.a_tilde!r}")
        for name in ('b', 'c', 'b_tilde', 'c_tilde'):
            if not getattr(self, name) >= 0:
                raise InvalidParameterError(f"{name} must be >= 0, got {getattr(self, name)!r}")

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def is_symmetric(self) -> bool:
        """Both groups behave identically, so the basket is homogeneous."""
        return self.a == self.a_tilde and self.b == self.b_tilde == self.c == self.c_tilde

    def lattice(self, k: int) -> range:
        """Admissible counts m of G1 names among the first k defaults."""
        return range(max(0, k - self.n2), min(k, self.n1) + 1)


def _check_point(spec: TwoGroupSpec, k: int, m: int):
    if isinstance(k, bool) or int(k) != k or not 0 <= k <= spec.n:
        raise InvalidParameterError(f"k must satisfy 0 <= k <= {spec.n}, got {k!r}")
    if isinstance(m, bool) or int(m) != m or m not in spec.lattice(k):
        raise InvalidParameterError(f"m={m!r} is not reachable after k={k} defaults (n1={spec.n1}, n2={spec.n2})")


def _zeta(spec: TwoGroupSpec, k: int, m: int) -> Tuple[float, float]:
    g1 = spec.a * (spec.n1 - m) * (1.0 + spec.b * m + spec.c * (k - m))
    g2 = spec.a_tilde * (spec.n2 - (k - m)) * (1.0 + spec.b_tilde * m + spec.c_tilde * (k - m))
    return g1, g2


def zeta(spec: TwoGroupSpec, k: int, m: int) -> Tuple[float, float]:
    """(zeta_{k,m}, zeta~_{k,m}): aggregate hazards of the G1 and G2 survivors."""
    _check_point(spec, k, m)
    return _zeta(spec, k, m)


@dataclass(frozen=True, eq=False)
class JointCoefficientTable:
    """
    f_{tau^k, N^k}(t, m) = sum_{i<k} sum_{j<=m} alpha[k, m, i, j] exp(-beta[i, j] t)

    Coefficients carry the rate factor; beta holds absolute rates (per year).
    Entries off the reachable lattice are zero.
    """
    spec: TwoGroupSpec
    k_max: int
    alpha: np.ndarray
    beta: np.ndarray

    def _check(self, k: int, m: int):
        if not 1 <= k <= self.k_max:
            raise InvalidParameterError(f"k must satisfy 1 <= k <= {self.k_max}, got {k!r}")
        _check_point(self.spec, k, m)

    def joint_density(self, k: int, m: int, t):
        self._check(k, m)
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        coeff = self.alpha[k, m, :k, :]
        values = np.exp(-np.multiply.outer(t_arr, self.beta[:k, :])) * coeff
        values = values.reshape(t_arr.size, -1).sum(axis=1)
        values = np.where(t_arr < 0, 0.0, values)
        return values if np.ndim(t) else float(values[0])

    def joint_survival(self, k: int, m: int, t):
        """P(tau^k > t, N^k = m)."""
        self._check(k, m)
        t_arr = np.maximum(np.atleast_1d(np.asarray(t, dtype=float)), 0.0)
        coeff = self.alpha[k, m, :k, :]
        mask = coeff != 0
        scaled = coeff[mask] / self.beta[:k, :][mask]
        values = np.exp(-np.outer(t_arr, self.beta[:k, :][mask])) @ scaled
        return values if np.ndim(t) else float(values[0])

    def probability(self, k: int, m: int) -> float:
        """P(N^k = m) = sum alpha / beta."""
        return float(self.joint_survival(k, m, 0.0))

    def group_probabilities(self, k: int) -> np.ndarray:
        """P(N^k = m) for m = 0 .. n1 (zero off the lattice)."""
        probs = np.zeros(self.spec.n1 + 1)
        for m in self.spec.lattice(k):
            probs[m] = self.probability(k, m)
        return probs

    def marginal_mixture(self, k: int) -> ExponentialMixture:
        """Law of tau^k alone, with equal rates merged (scale 1)."""
        if not 1 <= k <= self.k_max:
            raise InvalidParameterError(f"k must satisfy 1 <= k <= {self.k_max}, got {k!r}")
        weights, rates = [], []
        coeff = self.alpha[k].sum(axis=0)
        for i in range(k):
            for j in self.spec.lattice(i):
                weights.append(coeff[i, j])
                rates.append(self.beta[i, j])
        order = np.argsort(rates)
        rates = np.asarray(rates)[order]
        weights = np.asarray(weights)[order]
        tol = MERGE_TOLERANCE * float(np.max(rates))
        merged_w, merged_r = [weights[0]], [rates[0]]
        for w, r in zip(weights[1:], rates[1:]):
            if r - merged_r[-1] <= tol:
                merged_w[-1] += w
            else:
                merged_w.append(w)
                merged_r.append(r)
        return ExponentialMixture(weights=merged_w, betas=merged_r, scale=1.0)


@lru_cache(maxsize=64)
def joint_coefficients(spec: TwoGroupSpec, k_max: int) -> JointCoefficientTable:
    """
    Coefficient table for 1 <= k <= k_max.

    alpha[1, 1, 0, 0] = n1 a and alpha[1, 0, 0, 0] = n2 a~. A state (k, m') left
    at total rate B = beta[k, m'] passes each term alpha e^{-beta[i, j] t} to its
    successor (k+1, m'+1) with factor zeta_{k,m'} / (B - beta[i, j]) and to
    (k+1, m') with factor zeta~_{k,m'} / (B - beta[i, j]); the successor also
    gains the term -(sum of those) e^{-B t}.

    Raises:
        DegenerateParameterError: if a denominator B - beta[i, j] vanishes
    """
    if isinstance(k_max, bool) or int(k_max) != k_max or not 1 <= k_max <= spec.n:
        raise InvalidParameterError(f"k_max must satisfy 1 <= k_max <= {spec.n}, got {k_max!r}")
    width = spec.n1 + 1
    alpha = np.zeros((k_max + 1, width, k_max, width))
    beta = np.zeros((k_max, width))
    for i in range(k_max):
        for j in spec.lattice(i):
            beta[i, j] = sum(_zeta(spec, i, j))
    tol = COLLISION_TOLERANCE * float(np.max(beta))

    g1, g2 = _zeta(spec, 0, 0)
    if spec.n1 > 0:
        alpha[1, 1, 0, 0] = g1
    if spec.n2 > 0:
        alpha[1, 0, 0, 0] = g2

    for k in range(1, k_max):
        for m in spec.lattice(k):
            rate = beta[k, m]
            coeff = alpha[k, m, :k, :]
            used = coeff != 0
            gaps = rate - beta[:k, :]
            close = used & (np.abs(gaps) < tol)
            if np.any(close):
                i, j = (int(x) for x in np.argwhere(close)[0])
                raise DegenerateParameterError(
                    f"lattice rates beta[{k},{m}] and beta[{i},{j}] collide ({rate:.12g} vs {beta[i, j]:.12g})",
                    pair=((k, m), (i, j)), values=(float(rate), float(beta[i, j])),
                )
            ratio = np.where(used, coeff / np.where(used, gaps, 1.0), 0.0)
            z1, z2 = _zeta(spec, k, m)
            for target, z in ((m + 1, z1), (m, z2)):
                if z == 0 or target not in spec.lattice(k + 1):
                    continue
                contribution = z * ratio
                alpha[k + 1, target, :k, :] += contribution
                alpha[k + 1, target, k, m] -= contribution.sum()

    alpha.setflags(write=False)
    beta.setflags(write=False)
    logger.debug("two-group table n1=%d n2=%d k_max=%d built", spec.n1, spec.n2, k_max)
    return JointCoefficientTable(spec=spec, k_max=int(k_max), alpha=alpha, beta=beta)


def _homogeneous_equivalent(spec: TwoGroupSpec) -> HomogeneousSpec:
    return HomogeneousSpec(n=spec.n, a=spec.a, c=spec.b)


def kth_default_law_hetero(spec: TwoGroupSpec, k: int) -> ExponentialMixture:
    """
    Marginal law of tau^k as a rate-scaled mixture.

    Symmetric specs whose lattice rates collide fall back to the homogeneous
    mixture; asymmetric collisions propagate.
    """
    try:
        return joint_coefficients(spec, k).marginal_mixture(k)
    except DegenerateParameterError:
        if not spec.is_symmetric:
            raise
        logger.info("symmetric two-group spec with colliding rates; using the homogeneous engine")
        return to_rate_scaled(kth_default_mixture(_homogeneous_equivalent(spec), k))


def kth_density_hetero(spec: TwoGroupSpec, k: int, t):
    """Marginal density of the k-th default time."""
    return kth_default_law_hetero(spec, k).density(t)


def group_loss_distribution(spec: TwoGroupSpec, k: int, m: int) -> float:
    """P(N^k = m): probability that m of the first k defaults come from G1."""
    _check_point(spec, k, m)
    if k == 0:
        return 1.0
    try:
        return joint_coefficients(spec, k).probability(k, m)
    except DegenerateParameterError:
        if not spec.is_symmetric:
            raise
        # identical names: each default picks a uniformly random survivor
        return float(hypergeom(spec.n, spec.n1, k).pmf(m))


def to_rate_scaled(mixture: ExponentialMixture) -> ExponentialMixture:
    """Fold the scale into weights and rates (terms alpha * e^{-beta t})."""
    return ExponentialMixture(weights=mixture.weights * mixture.scale,
                              betas=mixture.betas * mixture.scale, scale=1.0)


def from_rate_scaled(mixture: ExponentialMixture, scale: float) -> ExponentialMixture:
    """Inverse of to_rate_scaled for a given scale."""
    if not scale > 0:
        raise InvalidParameterError(f"scale must be > 0, got {scale!r}")
    rate_scaled = to_rate_scaled(mixture)
    return ExponentialMixture(weights=rate_scaled.weights / scale,
                              betas=rate_scaled.betas / scale, scale=scale)
