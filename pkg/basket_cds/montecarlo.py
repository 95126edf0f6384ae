"""
Monte Carlo simulation of ordered default times

Paths are generated in fixed-size blocks. Block b draws from its own stream
SeedSequence(seed, spawn_key=(b,)), and blocks are concatenated in index order,
so a (seed, paths) pair fixes every sample no matter how many worker threads run.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy.optimize import brentq

from basket_cds.decay_density import DECAY_FLOOR, DecaySpec
from basket_cds.errors import InvalidParameterError, SimulationError
from basket_cds.hetero_groups import TwoGroupSpec
from basket_cds.mixture_core import HomogeneousSpec
from basket_cds.pricing import SwapContract
from basket_cds.regime_switch import TwoStateSpec

logger = logging.getLogger(__name__)

BLOCK_SIZE = 8192
ROOT_TOLERANCE = 1e-12
MAX_ROOT_ITERATIONS = 200


@dataclass(frozen=True, eq=False)
class GeneralIntensitySpec:
    """
    Interacting intensities lambda_i(t) = a_i + sum_{j defaulted} b_ij exp(-d_ij (t - tau_j)).

    Args:
        a: Base rates, shape (n,), all > 0
        b: Contagion matrix, shape (n, n), >= 0 with zero diagonal
        d: Decay matrix, shape (n, n), >= 0
    """
    a: np.ndarray
    b: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        b = np.array(self.b, dtype=float)
        d = np.array(self.d, dtype=float)
        if a.ndim != 1 or a.size == 0:
            raise InvalidParameterError('a must be a non-empty vector')
        n = a.size
        if b.shape != (n, n) or d.shape != (n, n):
            raise InvalidParameterError(f"b and d must have shape ({n}, {n})")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.all(np.isfinite(d))):
            raise InvalidParameterError('all intensity parameters must be finite')
        if np.any(a <= 0):
            raise InvalidParameterError('base rates a must be > 0')
        if np.any(b < 0) or np.any(d < 0):
            raise InvalidParameterError('b and d must be >= 0')
        if np.any(np.diag(b) != 0):
            raise InvalidParameterError('b must have a zero diagonal')
        for arr in (a, b, d):
            arr.setflags(write=False)
        object.__setattr__(self, 'a', a)
        object.__setattr__(self, 'b', b)
        object.__setattr__(self, 'd', d)

    @property
    def n(self) -> int:
        return int(self.a.size)

    @classmethod
    def from_decay(cls, spec: DecaySpec) -> 'GeneralIntensitySpec':
        """Homogeneous decay basket: a_i = a, b_ij = a c (i != j), d_ij = d."""
        n = spec.n
        b = np.full((n, n), spec.a * spec.c)
        np.fill_diagonal(b, 0.0)
        return cls(a=np.full(n, spec.a), b=b, d=np.full((n, n), spec.d))


SimulatedSpec = Union[HomogeneousSpec, DecaySpec, TwoStateSpec, TwoGroupSpec, GeneralIntensitySpec]


@dataclass(frozen=True)
class SimulationPlan:
    """
    Args:
        paths: Number of simulated baskets
        seed: Root seed of every block stream
        antithetic: Reserved; must stay off
        parallel_chunks: Worker threads used to fill blocks
        block_size: Paths per block (part of the reproducibility key)
    """
    paths: int
    seed: int = 0
    antithetic: bool = False
    parallel_chunks: int = 1
    block_size: int = BLOCK_SIZE

    def __post_init__(self):
        if isinstance(self.paths, bool) or int(self.paths) != self.paths or self.paths < 1:
            raise InvalidParameterError(f"paths must be >= 1, got {self.paths!r}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise InvalidParameterError(f"seed must be a non-negative integer, got {self.seed!r}")
        if self.antithetic:
            raise InvalidParameterError('antithetic sampling is reserved and not available')
        if int(self.parallel_chunks) != self.parallel_chunks or self.parallel_chunks < 1:
            raise InvalidParameterError(f"parallel_chunks must be >= 1, got {self.parallel_chunks!r}")
        if int(self.block_size) != self.block_size or self.block_size < 1:
            raise InvalidParameterError(f"block_size must be >= 1, got {self.block_size!r}")

    def blocks(self):
        """(index, size) of every block."""
        count = -(-int(self.paths) // int(self.block_size))
        for b in range(count):
            yield b, min(self.block_size, self.paths - b * self.block_size)


@dataclass(frozen=True)
class EstimateWithError:
    value: float
    std_error: float
    paths_used: int


@dataclass(frozen=True, eq=False)
class SampleSet:
    """
    Ordered default times per path.

    Args:
        times: Shape (paths, stages); inf where the default lies past the horizon
        labels: Same shape; defaulting group (1/2) or name index, None for homogeneous specs
    """
    times: np.ndarray
    labels: Optional[np.ndarray] = None

    @property
    def paths(self) -> int:
        return int(self.times.shape[0])

    def kth(self, k: int) -> np.ndarray:
        if not 1 <= k <= self.times.shape[1]:
            raise InvalidParameterError(f"k must satisfy 1 <= k <= {self.times.shape[1]}, got {k!r}")
        return self.times[:, k - 1]


@dataclass(frozen=True, eq=False)
class HistogramEstimate:
    edges: np.ndarray
    probabilities: np.ndarray
    std_errors: np.ndarray
    tail_probability: float
    paths_used: int


def sample_mean_with_error(values) -> EstimateWithError:
    """Sample mean with its standard error (finite values only)."""
    values = np.asarray(values, dtype=float)
    values = values[np.isfinite(values)]
    if values.size == 0:
        raise SimulationError('no finite samples to average')
    error = float(np.std(values, ddof=1) / np.sqrt(values.size)) if values.size > 1 else 0.0
    return EstimateWithError(value=float(np.mean(values)), std_error=error, paths_used=int(values.size))


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(int(block),)))


def _sample_homogeneous(spec: HomogeneousSpec, rng, size: int, stages: int, horizon):
    rates = spec.a * spec.betas[:stages]
    times = np.cumsum(rng.exponential(size=(size, stages)) / rates, axis=1)
    return times, None


def _sample_two_group(spec: TwoGroupSpec, rng, size: int, stages: int, horizon):
    times = np.empty((size, stages))
    labels = np.empty((size, stages), dtype=np.int8)
    m = np.zeros(size)
    now = np.zeros(size)
    for k in range(stages):
        g1 = spec.a * (spec.n1 - m) * (1.0 + spec.b * m + spec.c * (k - m))
        g2 = spec.a_tilde * (spec.n2 - (k - m)) * (1.0 + spec.b_tilde * m + spec.c_tilde * (k - m))
        total = g1 + g2
        now = now + rng.exponential(size=size) / total
        from_g1 = rng.random(size) * total < g1
        times[:, k] = now
        labels[:, k] = np.where(from_g1, 1, 2)
        m = m + from_g1
    return times, labels


def _sample_regime(spec: TwoStateSpec, rng, size: int, stages: int, horizon):
    betas = spec.unit_homogeneous().betas
    levels = np.array([0.0, spec.x1, spec.x2])
    exits = np.array([0.0, spec.eta1, spec.eta2])

    def holding(states):
        rate = exits[states]
        draws = rng.exponential(size=states.size)
        with np.errstate(divide='ignore'):
            return np.where(rate > 0, draws / np.where(rate > 0, rate, 1.0), np.inf)

    state = np.full(size, spec.initial_state)
    now = np.zeros(size)
    next_switch = holding(state)
    times = np.full((size, stages), np.inf)
    alive = np.ones(size, dtype=bool)
    for k in range(stages):
        # integrated intensity still to accumulate before default k+1
        remaining = rng.exponential(size=size) / betas[k]
        pending = alive.copy()
        while np.any(pending):
            idx = np.flatnonzero(pending)
            level = levels[state[idx]]
            capacity = level * (next_switch[idx] - now[idx])
            hit = capacity >= remaining[idx]
            done = idx[hit]
            now[done] += remaining[done] / levels[state[done]]
            times[done, k] = now[done]
            pending[done] = False

            moved = idx[~hit]
            remaining[moved] -= capacity[~hit]
            now[moved] = next_switch[moved]
            state[moved] = 3 - state[moved]
            next_switch[moved] = now[moved] + holding(state[moved])
            if horizon is not None:
                beyond = moved[now[moved] > horizon]
                pending[beyond] = False
                alive[beyond] = False
        if horizon is not None:
            late = times[:, k] > horizon
            alive &= ~late
            times[late, k] = np.inf
    return times, None


def _phi(d: np.ndarray, s: np.ndarray) -> np.ndarray:
    small = d < DECAY_FLOOR
    safe = np.where(small, 1.0, d)
    return np.where(small, s, -np.expm1(-safe * s) / safe)


def _invert_path(base: float, carried: np.ndarray, d: np.ndarray, target: float,
                 lo: float, hi: float, stage: int) -> float:
    """brentq on one path's integrated hazard inside the bracket left by the vector solver."""
    def residual(s):
        return base * s + float((carried * _phi(d, np.asarray(s))).sum()) - target

    try:
        root, info = brentq(residual, lo, hi, xtol=ROOT_TOLERANCE, full_output=True, disp=False)
    except ValueError as e:
        raise SimulationError(
            f"integrated-hazard inversion failed at default {stage}: bracket [{lo:.6g}, {hi:.6g}], "
            f"target {target:.6g}: {e}"
        ) from e
    if not info.converged:
        raise SimulationError(
            f"integrated-hazard inversion failed at default {stage}: {info.flag}, "
            f"bracket [{lo:.6g}, {hi:.6g}], target {target:.6g}"
        )
    return root


def _sample_general(spec: GeneralIntensitySpec, rng, size: int, stages: int, horizon):
    """
    Next default by inverting the integrated hazard of the survivors.

    The inversion is a vectorised safeguarded Newton step over all paths, the
    array form of the scalar brentq inversion of a cumulative hazard; paths it
    leaves unconverged are finished one by one with scipy's brentq.
    """
    n = spec.n
    a, b, d = spec.a, spec.b, spec.d
    tau = np.full((size, n), np.inf)
    alive = np.ones((size, n), dtype=bool)
    now = np.zeros(size)
    times = np.empty((size, stages))
    labels = np.empty((size, stages), dtype=np.int16)
    rows = np.arange(size)
    for k in range(stages):
        defaulted = ~alive
        age = np.where(defaulted, now[:, None] - np.where(defaulted, tau, 0.0), 0.0)
        # carried[p, i, j]: excitation of name i by defaulted name j at the current time
        carried = np.where(defaulted[:, None, :], b[None, :, :] * np.exp(-d[None, :, :] * age[:, None, :]), 0.0)
        carried = carried * alive[:, :, None]
        base = (a[None, :] * alive).sum(axis=1)

        def integrated(s):
            return base * s + (carried * _phi(d[None, :, :], s[:, None, None])).sum(axis=(1, 2))

        def intensity(s):
            return base + (carried * np.exp(-d[None, :, :] * s[:, None, None])).sum(axis=(1, 2))

        target = rng.exponential(size=size)
        lo = np.zeros(size)
        hi = target / base
        s = target / intensity(np.zeros(size))
        converged = np.zeros(size, dtype=bool)
        for _ in range(MAX_ROOT_ITERATIONS):
            residual = integrated(s) - target
            converged = np.abs(residual) <= ROOT_TOLERANCE * np.maximum(1.0, target)
            if np.all(converged):
                break
            lo = np.where(residual < 0, s, lo)
            hi = np.where(residual > 0, s, hi)
            step = s - residual / intensity(s)
            inside = (step > lo) & (step < hi)
            s = np.where(converged, s, np.where(inside, step, 0.5 * (lo + hi)))
        else:
            residual = integrated(s) - target
            converged = np.abs(residual) <= ROOT_TOLERANCE * np.maximum(1.0, target)
        if not np.all(converged):
            stragglers = np.flatnonzero(~converged)
            logger.debug("brentq fallback on %d paths at default %d", stragglers.size, k + 1)
            for p in stragglers:
                s[p] = _invert_path(base[p], carried[p], d, target[p], lo[p], hi[p], k + 1)

        rates = a[None, :] * alive + (carried * np.exp(-d[None, :, :] * s[:, None, None])).sum(axis=2)
        rates = rates * alive
        cumulative = np.cumsum(rates, axis=1)
        draw = rng.random(size) * cumulative[:, -1]
        names = np.minimum((cumulative <= draw[:, None]).sum(axis=1), n - 1)
        now = now + s
        tau[rows, names] = now
        alive[rows, names] = False
        times[:, k] = now
        labels[:, k] = names
    return times, labels


def _sampler(spec: SimulatedSpec) -> Tuple[Callable, SimulatedSpec]:
    if isinstance(spec, HomogeneousSpec):
        return _sample_homogeneous, spec
    if isinstance(spec, DecaySpec):
        if spec.d == 0:
            return _sample_homogeneous, spec.as_homogeneous()
        return _sample_general, GeneralIntensitySpec.from_decay(spec)
    if isinstance(spec, TwoGroupSpec):
        return _sample_two_group, spec
    if isinstance(spec, TwoStateSpec):
        return _sample_regime, spec
    if isinstance(spec, GeneralIntensitySpec):
        return _sample_general, spec
    raise InvalidParameterError(f"unsupported model spec {type(spec).__name__}")


def sample_ordered_defaults(spec: SimulatedSpec, plan: SimulationPlan,
                            stages: Optional[int] = None,
                            horizon: Optional[float] = None) -> SampleSet:
    """
    Simulate tau^1 < ... < tau^stages on plan.paths independent baskets.

    Args:
        spec: Any model spec
        plan: Path count, seed and parallelism
        stages: Number of ordered defaults to simulate (default: the whole basket)
        horizon: Regime-switching paths stop once past this time (later defaults are inf)

    Returns:
        SampleSet in path order
    """
    sampler, target = _sampler(spec)
    stages = target.n if stages is None else int(stages)
    if not 1 <= stages <= target.n:
        raise InvalidParameterError(f"stages must satisfy 1 <= stages <= {target.n}, got {stages!r}")

    def run(block):
        index, size = block
        return sampler(target, block_rng(plan.seed, index), size, stages, horizon)

    with ThreadPoolExecutor(max_workers=int(plan.parallel_chunks)) as pool:
        results = list(pool.map(run, plan.blocks()))
    times = np.concatenate([r[0] for r in results], axis=0)
    labels = None if results[0][1] is None else np.concatenate([r[1] for r in results], axis=0)
    logger.debug("simulated %d paths of %s (%d stages)", plan.paths, type(spec).__name__, stages)
    return SampleSet(times=times, labels=labels)


def leg_payoffs(tau: np.ndarray, contract: SwapContract) -> Tuple[np.ndarray, np.ndarray]:
    """Per-path discounted protection payoff and unit premium leg."""
    r = contract.rate
    grid = contract.grid
    deltas = contract.deltas
    with np.errstate(over='ignore'):
        discount_tau = np.where(np.isfinite(tau), np.exp(-r * np.where(np.isfinite(tau), tau, 0.0)), 0.0)
    covered = tau <= contract.maturity
    protection = (1.0 - contract.recovery) * discount_tau * covered

    survived = tau[:, None] > grid[None, 1:]
    premium = survived.astype(float) @ (deltas * np.exp(-r * grid[1:]))
    period = np.searchsorted(grid, tau, side='left')
    accruing = covered & (period >= 1)
    start = grid[np.clip(period - 1, 0, grid.size - 1)]
    premium = premium + np.where(accruing, (tau - start) * discount_tau, 0.0)
    return protection, premium


def _horizon(spec: SimulatedSpec, contract: SwapContract) -> Optional[float]:
    if isinstance(spec, TwoStateSpec):
        return 2.0 * contract.maturity + 10.0 / min(spec.x1, spec.x2)
    return None


def mc_swap_rate(spec: SimulatedSpec, contract: SwapContract, k: int, plan: SimulationPlan) -> EstimateWithError:
    """
    Ratio estimator of the k-th-to-default swap rate with a delta-method error.

    Raises:
        SimulationError: if the premium-leg estimate is not positive
    """
    samples = sample_ordered_defaults(spec, plan, stages=k, horizon=_horizon(spec, contract))
    protection, premium = leg_payoffs(samples.kth(k), contract)
    count = protection.size
    mean_p = float(np.mean(protection))
    mean_d = float(np.mean(premium))
    if not mean_d > 0:
        raise SimulationError(f"premium-leg estimate is {mean_d!r}; the swap rate is undefined")
    ratio = mean_p / mean_d
    if count < 2:
        return EstimateWithError(value=ratio, std_error=0.0, paths_used=count)
    cov = np.cov(protection, premium, ddof=1)
    variance = (cov[0, 0] - 2.0 * ratio * cov[0, 1] + ratio ** 2 * cov[1, 1]) / (mean_d ** 2 * count)
    return EstimateWithError(value=ratio, std_error=float(np.sqrt(max(variance, 0.0))), paths_used=count)


def mc_density_histogram(spec: SimulatedSpec, k: int, bins, plan: SimulationPlan) -> HistogramEstimate:
    """Bin probabilities of tau^k with binomial standard errors."""
    edges = np.asarray(bins, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0) or edges[0] < 0:
        raise InvalidParameterError('bins must be a strictly increasing grid of at least two non-negative edges')
    samples = sample_ordered_defaults(spec, plan, stages=k, horizon=None)
    tau = samples.kth(k)
    count = tau.size
    counts, _ = np.histogram(tau[np.isfinite(tau)], bins=edges)
    probabilities = counts / count
    std_errors = np.sqrt(probabilities * (1.0 - probabilities) / count)
    tail = float(np.mean(tau > edges[-1]))
    return HistogramEstimate(edges=edges, probabilities=probabilities, std_errors=std_errors,
                             tail_probability=tail, paths_used=count)
