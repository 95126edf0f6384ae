"""Tests for the two-state regime-switching engine."""
import numpy as np
import pytest

from basket_cds.errors import InvalidParameterError
from basket_cds.mixture_core import HomogeneousSpec, kth_default_mixture
from basket_cds.montecarlo import SimulationPlan, sample_ordered_defaults
from basket_cds.presets import table2_specs
from basket_cds.regime_switch import (
    HYPERBOLIC,
    POLYNOMIAL,
    OccupationTransform,
    TwoStateSpec,
    constant_level_mixture,
    kth_default_law_rs,
    kth_density_rs,
    kth_survival_rs,
    psi,
    psi_derivative,
)


@pytest.fixture
def switching_spec():
    return TwoStateSpec(x1=1.0, x2=2.0, eta1=1.0, eta2=1.0, initial_state=1, n=4, c=0.3)


class TestTwoStateSpec:

    @pytest.mark.parametrize("kwargs", [
        {'x1': 0.0},
        {'eta2': -1.0},
        {'initial_state': 3},
        {'n': 0},
        {'c': -0.1},
    ])
    def test_rejects_invalid_parameters(self, kwargs):
        params = dict(x1=1.0, x2=2.0, eta1=1.0, eta2=1.0, initial_state=1, n=4, c=0.3)
        params.update(kwargs)
        with pytest.raises(InvalidParameterError):
            TwoStateSpec(**params)

    def test_level(self, switching_spec):
        assert switching_spec.level(1) == 1.0
        assert switching_spec.level(2) == 2.0


class TestPsi:

    def test_zero_argument(self):
        transform = OccupationTransform(l=0.0, eta1=0.4, eta2=2.0)
        for i in (1, 2):
            np.testing.assert_allclose(psi(transform, i, np.array([0.0, 1.0, 7.0])), 1.0)

    @pytest.mark.parametrize("l", [-0.5, 0.3, 4.0])
    def test_at_time_zero(self, l):
        transform = OccupationTransform(l=l, eta1=1.0, eta2=0.5)
        assert psi(transform, 1, 0.0) == pytest.approx(1.0)
        assert psi(transform, 2, 0.0) == pytest.approx(1.0)

    def test_reference_value(self):
        transform = OccupationTransform(l=1.0, eta1=1.0, eta2=1.0)
        assert transform.branch == HYPERBOLIC
        assert transform.omega == pytest.approx(-1.25)
        w = np.sqrt(1.25)
        expected = np.exp(-1.5) * (np.cosh(w) + 0.5 * np.sinh(w) / w)
        assert psi(transform, 1, 1.0) == pytest.approx(expected, rel=1e-13)
        assert psi(transform, 1, 1.0) == pytest.approx(0.514, abs=1e-3)

    @pytest.mark.parametrize("l", [0.2, 1.0, 3.0])
    def test_absorbing_first_state(self, l):
        """Never leaving state 1 means T(t) = t."""
        transform = OccupationTransform(l=l, eta1=0.0, eta2=1.0)
        t = np.linspace(0.0, 5.0, 11)
        np.testing.assert_allclose(psi(transform, 1, t), np.exp(-l * t), rtol=1e-9, atol=1e-15)

    @pytest.mark.parametrize("l", [-1.5, 0.7, 2.0])
    def test_absorbing_second_state(self, l):
        """Starting in an absorbing state 2 means T(t) = 0."""
        transform = OccupationTransform(l=l, eta1=0.8, eta2=0.0)
        np.testing.assert_allclose(psi(transform, 2, np.linspace(0.0, 5.0, 11)), 1.0, rtol=1e-12)

    def test_polynomial_branch_continuity(self):
        # eta1 = 0 and l = eta2 puts omega exactly at zero
        exact = OccupationTransform(l=1.0, eta1=0.0, eta2=1.0)
        assert exact.branch == POLYNOMIAL
        near = OccupationTransform(l=1.0 + 2e-4, eta1=0.0, eta2=1.0)
        assert near.branch == HYPERBOLIC
        assert near.omega == pytest.approx(-1e-8, rel=1e-6)
        t = np.linspace(0.0, 10.0, 41)
        gain = near.gain(1)
        polynomial = np.exp(-near.alpha * t) * (1.0 + gain * t)
        bound = abs(near.omega) * t ** 2 * (1.0 + abs(gain) * t) + 1e-15
        assert np.all(np.abs(psi(near, 1, t) - polynomial) <= bound)

    def test_bounded_and_monotone(self):
        t = np.linspace(0.0, 6.0, 61)
        previous = None
        for l in (0.1, 0.5, 2.0, 8.0):
            for eta1, eta2 in ((1.0, 1.0), (2.0, 0.5), (0.3, 3.0)):
                transform = OccupationTransform(l=l, eta1=eta1, eta2=eta2)
                for i in (1, 2):
                    values = psi(transform, i, t)
                    assert np.all(values > 0) and np.all(values <= 1.0 + 1e-12)
                    assert np.all(np.diff(values) <= 1e-12)
            current = psi(OccupationTransform(l=l, eta1=1.0, eta2=1.0), 1, t)
            if previous is not None:
                assert np.all(current <= previous + 1e-12)
            previous = current

    @pytest.mark.parametrize("l,eta1,eta2", [(1.0, 1.0, 1.0), (1.0, 0.0, 1.0), (-0.8, 2.0, 0.5), (5.0, 0.2, 0.1)])
    def test_derivative_matches_finite_difference(self, l, eta1, eta2):
        transform = OccupationTransform(l=l, eta1=eta1, eta2=eta2)
        h = 1e-6
        for i in (1, 2):
            for t in (0.3, 1.0, 4.0):
                fd = (psi(transform, i, t + h) - psi(transform, i, t - h)) / (2 * h)
                assert psi_derivative(transform, i, t) == pytest.approx(fd, rel=1e-6, abs=1e-9)

    def test_rejects_negative_time(self):
        with pytest.raises(InvalidParameterError):
            psi(OccupationTransform(l=1.0, eta1=1.0, eta2=1.0), 1, -0.1)

    def test_rejects_unknown_state(self):
        with pytest.raises(InvalidParameterError):
            psi(OccupationTransform(l=1.0, eta1=1.0, eta2=1.0), 3, 0.5)


class TestKthDefaultRegimeSwitching:

    def test_constant_level_survival(self):
        spec = TwoStateSpec(x1=1.5, x2=1.5, eta1=0.7, eta2=2.0, initial_state=2, n=5, c=0.7)
        mixture = kth_default_mixture(HomogeneousSpec(n=5, a=1.5, c=0.7), 3)
        t = np.linspace(0.0, 3.0, 13)
        np.testing.assert_allclose(kth_survival_rs(spec, 3, t), mixture.survival(t), atol=1e-12)
        np.testing.assert_allclose(kth_density_rs(spec, 3, t), mixture.density(t), atol=1e-10)
        np.testing.assert_allclose(constant_level_mixture(spec, 3).weights, mixture.weights)

    def test_constant_level_mixture_needs_equal_levels(self, switching_spec):
        with pytest.raises(InvalidParameterError):
            constant_level_mixture(switching_spec, 1)

    def test_survival_at_zero(self, switching_spec):
        for k in range(1, 5):
            assert kth_survival_rs(switching_spec, k, 0.0) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("k", [1, 2, 4])
    def test_density_is_minus_survival_slope(self, switching_spec, k):
        h = 1e-5
        for t in (0.2, 0.5, 1.0):
            fd = -(kth_survival_rs(switching_spec, k, t + h) - kth_survival_rs(switching_spec, k, t - h)) / (2 * h)
            assert kth_density_rs(switching_spec, k, t) == pytest.approx(fd, rel=1e-5, abs=1e-9)

    def test_survival_density_consistency(self, switching_spec):
        law = kth_default_law_rs(switching_spec, 2)
        t = 1.3
        grid = np.linspace(0.0, t, 4001)
        mass = np.sum(np.diff(grid) * 0.5 * (kth_density_rs(switching_spec, 2, grid[1:])
                                             + kth_density_rs(switching_spec, 2, grid[:-1])))
        assert law.survival(t) == pytest.approx(1.0 - mass, abs=1e-6)

    def test_absorbing_state_two(self):
        spec = TwoStateSpec(x1=1.0, x2=2.0, eta1=1.0, eta2=0.0, initial_state=2, n=4, c=0.3)
        mixture = kth_default_mixture(HomogeneousSpec(n=4, a=2.0, c=0.3), 2)
        t = np.linspace(0.1, 2.0, 9)
        np.testing.assert_allclose(kth_density_rs(spec, 2, t), mixture.density(t), rtol=1e-9, atol=1e-12)

    def test_starting_in_the_high_state_defaults_sooner(self, switching_spec):
        high = TwoStateSpec(x1=1.0, x2=2.0, eta1=1.0, eta2=1.0, initial_state=2, n=4, c=0.3)
        for t in (0.2, 1.0):
            assert kth_survival_rs(high, 2, t) < kth_survival_rs(switching_spec, 2, t)

    @pytest.mark.parametrize("k", [1, 2])
    def test_matches_simulation(self, k):
        spec = TwoStateSpec(x1=1.0, x2=2.0, eta1=1.0, eta2=1.0, initial_state=1, n=2, c=0.5)
        samples = sample_ordered_defaults(spec, SimulationPlan(paths=200_000, seed=11), stages=2)
        t = 0.5
        survived = samples.kth(k) > t
        estimate = survived.mean()
        error = np.sqrt(estimate * (1 - estimate) / survived.size)
        assert abs(kth_survival_rs(spec, k, t) - estimate) < 3 * error

    def test_table_densities_are_non_negative(self):
        t = np.linspace(0.0, 6.0, 1000)
        for _, spec in table2_specs():
            for k in range(1, spec.n + 1):
                assert np.all(kth_density_rs(spec, k, t) >= -1e-8)
