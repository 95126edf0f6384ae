"""Tests for scenario runs, table reproduction and sensitivity sweeps."""
import time

import numpy as np
import pytest

from basket_cds import presets
from basket_cds.decay_density import DecaySpec
from basket_cds.errors import ConfigError, DegenerateParameterError, InvalidParameterError
from basket_cds.mixture_core import HomogeneousSpec, kth_default_mixture
from basket_cds.montecarlo import SimulationPlan
from basket_cds.pricing import swap_rate
from basket_cds.runner import figure_scenario, reproduce_table, run_scenario, sensitivity_sweep
from basket_cds.scenario_config import ScenarioConfig


MODEL_TYPES = {HomogeneousSpec: 'homogeneous', DecaySpec: 'decay'}


def scenario(model, ks, method='analytic', plan=None, name='unit'):
    return ScenarioConfig(name=name, model_type=MODEL_TYPES[type(model)], model=model,
                          contract=presets.table_contract(), ks=tuple(ks), method=method, mc_plan=plan)


def homogeneous_scenario(ks=(1, 2, 3), **kwargs):
    return scenario(HomogeneousSpec(n=5, a=0.4, c=0.7), ks, **kwargs)


class TestRunScenario:

    def test_analytic_rows(self):
        rows = run_scenario(homogeneous_scenario())
        assert [(r.k, r.method) for r in rows] == [(1, 'analytic'), (2, 'analytic'), (3, 'analytic')]
        spec = HomogeneousSpec(n=5, a=0.4, c=0.7)
        for row in rows:
            assert row.rate == pytest.approx(swap_rate(kth_default_mixture(spec, row.k), presets.table_contract()),
                                              rel=1e-9)
            assert row.std_error is None
            assert row.wall_clock_ms is None

    def test_both_methods(self):
        rows = run_scenario(homogeneous_scenario(ks=(1, 2), method='both',
                                                 plan=SimulationPlan(paths=20_000, seed=1)))
        assert [(r.k, r.method) for r in rows] == [(1, 'analytic'), (1, 'mc'), (2, 'analytic'), (2, 'mc')]
        for analytic, simulated in zip(rows[::2], rows[1::2]):
            assert simulated.std_error > 0
            assert abs(simulated.rate - analytic.rate) < 3 * simulated.std_error

    def test_timings(self):
        rows = run_scenario(homogeneous_scenario(ks=(1,)), timings=True)
        assert rows[0].wall_clock_ms >= 0

    def test_degenerate_rates_are_reported_with_context(self):
        config = scenario(HomogeneousSpec(n=3, a=1.0, c=1.0), [2], name='clash')
        with pytest.raises(DegenerateParameterError) as info:
            run_scenario(config)
        assert "scenario 'clash', k=2, method=analytic" in info.value.__notes__

    def test_perturbed_degenerate_rates(self):
        config = scenario(HomogeneousSpec(n=3, a=1.0, c=1.0), [2])
        rows = run_scenario(config, perturb_degenerate=True)
        nearby = swap_rate(kth_default_mixture(HomogeneousSpec(n=3, a=1.0, c=1.0 + 1e-4), 2),
                           presets.table_contract())
        assert rows[0].rate == pytest.approx(nearby, rel=1e-3)

    def test_deep_decay_baskets_are_simulated(self):
        config = scenario(DecaySpec(n=5, a=0.5, c=1.0, d=1.0), [5], plan=SimulationPlan(paths=2000, seed=3))
        rows = run_scenario(config)
        assert [(r.k, r.method) for r in rows] == [(5, 'mc')]
        assert rows[0].std_error > 0


class TestSensitivitySweep:

    def test_analytic_next_to_finite_difference(self):
        config = figure_scenario('c', ks=(1, 2, 5))
        df = sensitivity_sweep(config, 'c', grid=[0.3, 1.0])
        assert len(df) == 6
        clean = df[df['value'] == 0.3]
        assert not clean['degenerate'].any()
        np.testing.assert_allclose(clean['theta_analytic'], clean['theta_fd'], rtol=1e-4, atol=1e-10)
        assert clean.loc[clean['k'] == 1, 'theta_analytic'].item() == pytest.approx(0.0, abs=1e-12)

    def test_degenerate_points_are_flagged(self):
        df = sensitivity_sweep(figure_scenario('c', ks=(2,)), 'c', grid=[1.0])
        assert df['degenerate'].all()
        assert df['theta_analytic'].isna().all()

    def test_default_grid(self):
        df = sensitivity_sweep(figure_scenario('a', ks=(1,)), 'a')
        assert len(df) == len(presets.FIGURE_GRIDS['a'])
        assert (df['theta_analytic'] > 0).all()

    def test_finite_differences_for_other_models(self):
        config = scenario(DecaySpec(n=2, a=0.5, c=1.0, d=1.0), [2])
        df = sensitivity_sweep(config, 'd', grid=[1.0], mode='fd')
        row = df.iloc[0]
        assert np.isnan(row['theta_analytic'])
        assert row['fd_step'] == pytest.approx(1e-5)
        # faster decay weakens contagion, lowering the senior rate
        assert row['theta_fd'] < 0

    def test_simulated_difference_quotient(self):
        config = homogeneous_scenario(ks=(1,), method='mc', plan=SimulationPlan(paths=20_000, seed=5))
        df = sensitivity_sweep(config, 'a', grid=[0.4], mode='fd')
        assert df['fd_step'].item() == 0.1
        assert df['theta_fd'].item() > 0

    @pytest.mark.parametrize("parameter,mode", [('x', 'analytic'), ('c', 'exact')])
    def test_rejects_bad_requests(self, parameter, mode):
        with pytest.raises(ConfigError):
            sensitivity_sweep(figure_scenario('c', ks=(1,)), parameter, grid=[0.3], mode=mode)

    def test_analytic_mode_only_for_rate_parameters(self):
        with pytest.raises(ConfigError) as info:
            sensitivity_sweep(figure_scenario('c', ks=(1,)), 'n', grid=[5])
        assert "'a' and 'c' only" in info.value.errors[0]

    def test_analytic_mode_needs_homogeneous_model(self):
        config = scenario(DecaySpec(n=2, a=0.5, c=1.0, d=1.0), [2])
        with pytest.raises(ConfigError):
            sensitivity_sweep(config, 'c', grid=[1.0])


class TestFigureScenario:

    def test_presets(self):
        config = figure_scenario('a')
        assert config.model == HomogeneousSpec(n=10, a=0.1, c=0.3)
        assert config.ks == tuple(range(1, 11))

    def test_unknown_parameter(self):
        with pytest.raises(ConfigError):
            figure_scenario('d')


class TestReproduceTable:

    def test_unknown_table(self):
        with pytest.raises(InvalidParameterError):
            reproduce_table(4)

    @pytest.mark.slow
    @pytest.mark.parametrize("which,tolerance,budget", [(1, 1e-3, 5.0), (2, 2e-3, 10.0), (3, 2e-3, 2.0)])
    def test_matches_published(self, which, tolerance, budget):
        start = time.perf_counter()
        df = reproduce_table(which)
        elapsed = time.perf_counter() - start
        assert np.all(np.abs(df['rate'] - df['published']) < tolerance)
        assert elapsed < budget

    @pytest.mark.slow
    def test_decay_table_shape(self):
        df = reproduce_table(1)
        assert len(df) == 36
        for _, cell in df.groupby(['a', 'c']):
            # the contagion effect fades as decay speeds up
            assert np.all(np.diff(cell.sort_values('d')['rate']) <= 1e-6)
        for _, cell in df.groupby(['a', 'd']):
            assert np.all(np.diff(cell.sort_values('c')['rate']) >= -1e-6)
        for _, cell in df.groupby(['c', 'd']):
            assert np.all(np.diff(cell.sort_values('a')['rate']) > 0)

    @pytest.mark.slow
    def test_simulated_columns(self):
        df = reproduce_table(3, method='both', plan=SimulationPlan(paths=100_000, seed=0))
        assert {'mc_rate', 'mc_std_error', 'published_mc'} <= set(df.columns)
        z = np.abs(df['mc_rate'] - df['rate']) / df['mc_std_error']
        # at most 1% of cells may sit beyond three standard errors
        assert np.mean(z > 3.0) <= 0.01
