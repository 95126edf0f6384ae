"""
Scenario runs, reference-table reproduction and sensitivity sweeps
"""
import logging
import time
from dataclasses import fields, replace
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from basket_cds import presets
from basket_cds.errors import (BasketCDSError, ConfigError, DegenerateParameterError,
                               InvalidParameterError, NestingLimitError)
from basket_cds.hetero_groups import kth_default_law_hetero
from basket_cds.laws import ModelSpec, default_law
from basket_cds.mixture_core import PERTURBATION_SHIFT, HomogeneousSpec
from basket_cds.montecarlo import SimulationPlan, mc_swap_rate
from basket_cds.pricing import (SwapContract, finite_difference_sensitivity, swap_rate,
                                swap_rate_sensitivities)
from basket_cds.quadrature import DEFAULT_QUADRATURE, QuadratureConfig
from basket_cds.regime_switch import kth_default_law_rs
from basket_cds.results import ResultRow
from basket_cds.scenario_config import DEFAULT_PATHS, ScenarioConfig

logger = logging.getLogger(__name__)

# Difference quotient step for simulated sensitivities
MC_FD_STEP = 0.1
ANALYTIC_FD_RELATIVE_STEP = 1e-5
ANALYTIC_PARAMETERS = ('a', 'c')


def _analytic_rate(model: ModelSpec, contract: SwapContract, k: int,
                   quad: QuadratureConfig, perturb_degenerate: bool) -> float:
    try:
        return swap_rate(default_law(model, k, quad), contract)
    except DegenerateParameterError as e:
        if not perturb_degenerate or not hasattr(model, 'c'):
            raise
        logger.warning("%s; shifting c by %g and retrying", e, PERTURBATION_SHIFT)
        shifted = replace(model, c=model.c + PERTURBATION_SHIFT)
        return swap_rate(default_law(shifted, k, quad), contract)


def _timed(func):
    start = time.perf_counter()
    value = func()
    return value, (time.perf_counter() - start) * 1000.0


def run_scenario(config: ScenarioConfig, timings: bool = False,
                 perturb_degenerate: bool = False) -> List[ResultRow]:
    """
    Price every requested seniority with the configured method(s).

    Decay baskets deeper than the nesting cap are simulated instead and their
    rows are labelled 'mc'.

    Args:
        config: Validated scenario
        timings: Record wall-clock time per row
        perturb_degenerate: Shift c slightly when mixture rates collide

    Returns:
        Rows in (k, method) order

    Raises:
        BasketCDSError: engine failures, annotated with scenario, k and method
    """
    methods = ('analytic', 'mc') if config.method == 'both' else (config.method,)
    plan = config.mc_plan or SimulationPlan(paths=DEFAULT_PATHS)
    rows: Dict[tuple, ResultRow] = {}
    for k in config.ks:
        for method in methods:
            if (k, method) in rows:
                continue
            try:
                if method == 'analytic':
                    try:
                        rate, elapsed = _timed(lambda: _analytic_rate(
                            config.model, config.contract, k, config.quadrature, perturb_degenerate))
                        rows[(k, 'analytic')] = ResultRow(
                            config.name, k, 'analytic', rate,
                            wall_clock_ms=elapsed if timings else None)
                        continue
                    except NestingLimitError as e:
                        logger.warning("%s: %s; simulating k=%d instead", config.name, e, k)
                        method = 'mc'
                estimate, elapsed = _timed(lambda: mc_swap_rate(config.model, config.contract, k, plan))
                rows[(k, 'mc')] = ResultRow(
                    config.name, k, 'mc', estimate.value, std_error=estimate.std_error,
                    wall_clock_ms=elapsed if timings else None)
            except BasketCDSError as e:
                note = f"scenario {config.name!r}, k={k}, method={method}"
                if hasattr(e, 'add_note'):
                    e.add_note(note)
                else:  # Python < 3.11
                    e.__notes__ = [*getattr(e, '__notes__', []), note]
                raise
    return [rows[key] for key in sorted(rows)]


def _table1(quad: QuadratureConfig) -> pd.DataFrame:
    contract = presets.table_contract()
    records = []
    for a, c, d, spec, published in presets.table1_cells():
        rate = swap_rate(default_law(spec, presets.TABLE1_K, quad), contract)
        records.append({'a': a, 'c': c, 'd': d, 'k': presets.TABLE1_K,
                        'rate': rate, 'published': published})
    return pd.DataFrame(records)


def _table2() -> pd.DataFrame:
    contract = presets.table_contract()
    records = []
    for condition, spec in presets.table2_specs():
        for k in range(1, spec.n + 1):
            # every condition goes through the transform path, including x1 == x2
            rate = swap_rate(kth_default_law_rs(spec, k), contract)
            records.append({'condition': condition, 'x1': spec.x1, 'x2': spec.x2,
                            'eta1': spec.eta1, 'eta2': spec.eta2, 'k': k, 'rate': rate,
                            'published': presets.TABLE2_PUBLISHED[k][condition - 1]})
    return pd.DataFrame(records)


def _table3(method: str, plan: SimulationPlan) -> pd.DataFrame:
    contract = presets.table_contract()
    records = []
    for condition, spec in presets.table3_specs():
        for k in range(1, spec.n + 1):
            published_ap, published_mc = presets.TABLE3_PUBLISHED[k][condition - 1]
            record = {'condition': condition, 'b': spec.b, 'b_tilde': spec.b_tilde,
                      'c': spec.c, 'c_tilde': spec.c_tilde, 'k': k}
            if method in ('analytic', 'both'):
                record['rate'] = swap_rate(kth_default_law_hetero(spec, k), contract)
                record['published'] = published_ap
            if method in ('mc', 'both'):
                estimate = mc_swap_rate(spec, contract, k, plan)
                record['mc_rate'] = estimate.value
                record['mc_std_error'] = estimate.std_error
                record['published_mc'] = published_mc
            records.append(record)
    return pd.DataFrame(records)


def reproduce_table(which: int, method: str = 'analytic', plan: Optional[SimulationPlan] = None,
                    quad: QuadratureConfig = DEFAULT_QUADRATURE) -> pd.DataFrame:
    """
    Recompute one of the reference tables from its built-in parameters.

    Args:
        which: 1 (decay), 2 (regime switching) or 3 (two groups)
        method: analytic, mc or both; simulation columns exist for table 3 only
        plan: Simulation plan for table 3 (default 100k paths, seed 0)
        quad: Quadrature settings for table 1

    Returns:
        One row per cell, with parameters, rate and published value
    """
    if which == 1:
        return _table1(quad)
    if which == 2:
        return _table2()
    if which == 3:
        return _table3(method, plan or SimulationPlan(paths=DEFAULT_PATHS))
    raise InvalidParameterError(f"table must be 1, 2 or 3, got {which!r}")


def _with_parameter(model: ModelSpec, parameter: str, value: float) -> ModelSpec:
    return replace(model, **{parameter: float(value)})


def sensitivity_sweep(config: ScenarioConfig, parameter: str, grid: Optional[Sequence[float]] = None,
                      mode: str = 'analytic') -> pd.DataFrame:
    """
    theta_k = dS_k / d(parameter) across a grid of parameter values.

    'analytic' (homogeneous models) reports the closed-form derivative next to a
    central difference of the analytic rate. 'fd' works for any model: a central
    difference of the analytic rate, or, for method 'mc', a difference quotient
    of simulated rates with step 0.1 on a shared seed.

    Degenerate grid points are kept as rows with NaN values and degenerate=True.
    """
    model = config.model
    names = {f.name for f in fields(model)}
    if parameter not in names:
        raise ConfigError([f"sweep: model {config.model_type!r} has no parameter {parameter!r}"])
    if mode not in ('analytic', 'fd'):
        raise ConfigError([f"sweep: mode must be 'analytic' or 'fd', got {mode!r}"])
    if mode == 'analytic' and not isinstance(model, HomogeneousSpec):
        raise ConfigError([f"sweep: analytic sensitivities exist only for homogeneous models, "
                           f"got {config.model_type!r}; use fd mode"])
    if mode == 'analytic' and parameter not in ANALYTIC_PARAMETERS:
        raise ConfigError([f"sweep: analytic sensitivities exist for 'a' and 'c' only, got {parameter!r}; "
                           f"use fd mode"])
    if grid is None:
        grid = presets.FIGURE_GRIDS.get(parameter)
        if grid is None:
            raise ConfigError([f"sweep: no default grid for {parameter!r}"])

    simulated = config.method == 'mc' or config.model_type == 'general_mc'
    plan = config.mc_plan or SimulationPlan(paths=DEFAULT_PATHS)
    records = []
    for value in grid:
        point = {'parameter': parameter, 'value': float(value)}
        for k in config.ks:
            row = dict(point, k=k, theta_analytic=np.nan, theta_fd=np.nan, fd_step=np.nan, degenerate=False)
            try:
                spec = _with_parameter(model, parameter, value)
                if simulated:
                    def price(x, k=k):
                        return mc_swap_rate(_with_parameter(model, parameter, x), config.contract, k, plan).value
                    lower = max(value - MC_FD_STEP, 0.0)
                    row['theta_fd'] = (price(value + MC_FD_STEP) - price(lower)) / (value + MC_FD_STEP - lower)
                    row['fd_step'] = MC_FD_STEP
                else:
                    def price(x, k=k):
                        return swap_rate(default_law(_with_parameter(model, parameter, x), k, config.quadrature),
                                         config.contract)
                    theta_fd, step = finite_difference_sensitivity(price, float(value), ANALYTIC_FD_RELATIVE_STEP)
                    row['theta_fd'] = theta_fd
                    row['fd_step'] = step
                if mode == 'analytic':
                    theta_a, theta_c = swap_rate_sensitivities(spec, config.contract, k)
                    row['theta_analytic'] = theta_a if parameter == 'a' else theta_c
            except (DegenerateParameterError, InvalidParameterError) as e:
                logger.warning("sweep %s=%g, k=%d skipped: %s", parameter, value, k, e)
                row.update(theta_analytic=np.nan, theta_fd=np.nan, degenerate=True)
            records.append(row)
    return pd.DataFrame(records, columns=['parameter', 'value', 'k', 'theta_analytic',
                                          'theta_fd', 'fd_step', 'degenerate'])


def figure_scenario(parameter: str, ks: Sequence[int] = tuple(range(1, presets.FIGURE_N + 1))) -> ScenarioConfig:
    """Homogeneous n=10 scenario behind the a- and c-sensitivity curves."""
    if parameter not in presets.FIGURE_BASES:
        raise ConfigError([f"sweep: parameter must be 'a' or 'c', got {parameter!r}"])
    return ScenarioConfig(
        name=f"sensitivity_{parameter}",
        model_type='homogeneous',
        model=presets.FIGURE_BASES[parameter],
        contract=presets.table_contract(),
        ks=tuple(ks),
    )
