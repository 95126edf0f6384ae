"""Tests for the homogeneous exponential-mixture engine."""
import numpy as np
import pytest

from basket_cds.errors import DegenerateParameterError, InvalidParameterError
from basket_cds.mixture_core import (
    ExponentialMixture,
    HomogeneousSpec,
    beta,
    closed_form_alpha,
    convolution_density,
    kth_default_mean,
    kth_default_mixture,
    kth_default_variance,
    mean_bound_fixed_k,
    mean_bound_full_basket,
    sensitivity_coeffs,
    stage_rates,
)


@pytest.fixture
def small_spec():
    return HomogeneousSpec(n=3, a=1.0, c=2.0)


@pytest.fixture
def figure_spec():
    return HomogeneousSpec(n=10, a=0.1, c=0.3)


class TestHomogeneousSpec:
    """Spec validation."""

    @pytest.mark.parametrize("n,a,c", [(0, 1.0, 0.0), (2, 0.0, 0.1), (2, 1.0, -0.5), (2.5, 1.0, 0.0)])
    def test_rejects_invalid_parameters(self, n, a, c):
        with pytest.raises(InvalidParameterError):
            HomogeneousSpec(n=n, a=a, c=c)

    def test_invalid_parameter_is_a_value_error(self):
        with pytest.raises(ValueError):
            HomogeneousSpec(n=-1, a=1.0, c=0.0)

    def test_betas(self, small_spec):
        np.testing.assert_array_equal(small_spec.betas, [3.0, 6.0, 5.0])


class TestBeta:
    """Stage multipliers beta_j = (n - j)(1 + j c)."""

    @pytest.mark.parametrize("n,c,j,expected", [(10, 3.0, 0, 10.0), (3, 2.0, 2, 5.0), (10, 0.3, 3, 13.3)])
    def test_values(self, n, c, j, expected):
        assert beta(n, c, j) == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("j", [-1, 3])
    def test_out_of_range(self, j):
        with pytest.raises(InvalidParameterError):
            beta(3, 1.0, j)


class TestKthDefaultMixture:
    """Mixture weights from the recursion."""

    def test_first_default(self, small_spec):
        mixture = kth_default_mixture(small_spec, 1)
        np.testing.assert_allclose(mixture.weights, [3.0])
        np.testing.assert_allclose(mixture.betas, [3.0])

    def test_third_default_weights(self, small_spec):
        mixture = kth_default_mixture(small_spec, 3)
        np.testing.assert_allclose(mixture.weights, [15.0, 30.0, -45.0], rtol=1e-13)
        np.testing.assert_allclose(mixture.betas, [3.0, 6.0, 5.0])
        assert np.sum(mixture.weights / mixture.betas) == pytest.approx(1.0, abs=1e-13)
        assert np.sum(mixture.weights) == pytest.approx(0.0, abs=1e-12)

    def test_collision_names_the_pair(self):
        with pytest.raises(DegenerateParameterError) as info:
            kth_default_mixture(HomogeneousSpec(n=3, a=1.0, c=1.0), 2)
        assert info.value.pair == ('beta_0', 'beta_2')
        assert info.value.values == (3.0, 3.0)

    @pytest.mark.parametrize("k", [0, 4])
    def test_k_out_of_range(self, small_spec, k):
        with pytest.raises(InvalidParameterError):
            kth_default_mixture(small_spec, k)

    @pytest.mark.parametrize("n,c", [(5, 0.0), (5, 0.7), (10, 0.3), (10, 3.0)])
    def test_normalization_and_zero_at_origin(self, n, c):
        spec = HomogeneousSpec(n=n, a=0.4, c=c)
        for k in range(1, n + 1):
            mixture = kth_default_mixture(spec, k)
            assert mixture.total_mass() == pytest.approx(1.0, abs=1e-10)
            if k >= 2:
                assert abs(np.sum(mixture.weights)) <= 1e-10 * np.max(np.abs(mixture.weights))
                assert mixture.density(0.0) == pytest.approx(0.0, abs=1e-9)

    def test_survival_and_cdf(self, small_spec):
        mixture = kth_default_mixture(small_spec, 2)
        assert mixture.survival(0.0) == pytest.approx(1.0, abs=1e-14)
        assert mixture.survival(-1.0) == 1.0
        t = np.array([0.1, 0.5, 2.0])
        np.testing.assert_allclose(mixture.cdf(t) + mixture.survival(t), 1.0)

    def test_order_statistics_limit(self):
        """c = 0 gives the k-th order statistic of iid exponentials."""
        spec = HomogeneousSpec(n=3, a=0.7, c=0.0)
        mixture = kth_default_mixture(spec, 2)
        for t in (0.2, 0.9, 2.5):
            assert mixture.density(t) == pytest.approx(convolution_density(spec, 2, t), abs=1e-9)
        # P(tau^2 <= t) for 3 iid Exp(a): at least two of three defaulted
        t = 1.1
        p = 1.0 - np.exp(-0.7 * t)
        expected = 3 * p ** 2 * (1 - p) + p ** 3
        assert mixture.cdf(t) == pytest.approx(expected, abs=1e-12)

    def test_matches_stage_convolution_with_contagion(self, small_spec):
        mixture = kth_default_mixture(small_spec, 3)
        for t in (0.05, 0.4, 1.5):
            assert mixture.density(t) == pytest.approx(convolution_density(small_spec, 3, t), abs=1e-8)

    def test_rejects_mismatched_arrays(self):
        with pytest.raises(InvalidParameterError):
            ExponentialMixture(weights=[1.0, 2.0], betas=[1.0])


class TestClosedFormAlpha:
    """Product/factorial expression against the recursion."""

    def test_small_values(self):
        assert closed_form_alpha(3, 2.0, 1, 0) == pytest.approx(3.0)
        assert closed_form_alpha(3, 2.0, 3, 2) == pytest.approx(-45.0, rel=1e-13)

    @pytest.mark.parametrize("n", range(1, 11))
    def test_matches_recursion(self, n):
        c = 0.3
        spec = HomogeneousSpec(n=n, a=1.0, c=c)
        for k in range(1, n + 1):
            weights = kth_default_mixture(spec, k).weights
            closed = [closed_form_alpha(n, c, k, j) for j in range(k)]
            np.testing.assert_allclose(weights, closed, rtol=1e-10)

    def test_degenerate_factor(self):
        with pytest.raises(DegenerateParameterError):
            closed_form_alpha(3, 1.0, 3, 0)


class TestMoments:
    """Mean and variance of tau^k."""

    def test_mean_values(self, small_spec):
        assert kth_default_mean(small_spec, 3) == pytest.approx(0.7, rel=1e-14)
        assert kth_default_mean(HomogeneousSpec(n=1, a=2.0, c=0.0), 1) == pytest.approx(0.5)

    def test_mean_matches_mixture_moment(self):
        spec = HomogeneousSpec(n=10, a=1.0, c=3.0)
        mixture = kth_default_mixture(spec, 4)
        assert kth_default_mean(spec, 4) == pytest.approx(mixture.mean(), rel=1e-10)

    def test_variance_of_single_stage(self):
        assert kth_default_variance(HomogeneousSpec(n=1, a=2.0, c=0.0), 1) == pytest.approx(0.25)

    def test_stage_rates(self, small_spec):
        np.testing.assert_allclose(stage_rates(small_spec, 2), [3.0, 6.0])

    @pytest.mark.parametrize("c", [0.0, 0.5, 3.0])
    def test_fixed_k_bound(self, c):
        spec = HomogeneousSpec(n=20, a=0.2, c=c)
        for k in (1, 5, 19):
            assert kth_default_mean(spec, k) <= mean_bound_fixed_k(20, k, 0.2)

    @pytest.mark.parametrize("c", [0.5, 1.0, 3.0])
    def test_full_basket_bound(self, c):
        for n in (2, 5, 10, 30):
            spec = HomogeneousSpec(n=n, a=1.0, c=c)
            assert kth_default_mean(spec, n) <= mean_bound_full_basket(n, 1.0, c)

    def test_bounds_reject_invalid_input(self):
        with pytest.raises(InvalidParameterError):
            mean_bound_fixed_k(3, 3, 1.0)
        with pytest.raises(InvalidParameterError):
            mean_bound_full_basket(3, 1.0, 0.0)


class TestSensitivityCoeffs:
    """Derivatives of the mixture in a and c."""

    def test_first_default_has_zero_derivative(self, figure_spec):
        np.testing.assert_array_equal(sensitivity_coeffs(figure_spec, 1).dalpha_dc, [0.0])

    @pytest.mark.parametrize("n,a,c,k", [(3, 1.0, 2.0, 2), (3, 1.0, 2.0, 3), (10, 0.1, 0.3, 5)])
    def test_dalpha_matches_finite_difference(self, n, a, c, k):
        h = 1e-5
        up = kth_default_mixture(HomogeneousSpec(n=n, a=a, c=c + h), k).weights
        down = kth_default_mixture(HomogeneousSpec(n=n, a=a, c=c - h), k).weights
        expected = (up - down) / (2 * h)
        actual = sensitivity_coeffs(HomogeneousSpec(n=n, a=a, c=c), k).dalpha_dc
        np.testing.assert_allclose(actual, expected, rtol=1e-6, atol=1e-8 * np.max(np.abs(expected)))

    def test_density_derivative_in_a(self, figure_spec):
        sens = sensitivity_coeffs(figure_spec, 4)
        h = 1e-6
        t = np.linspace(0.1, 3.0, 12)
        up = kth_default_mixture(HomogeneousSpec(n=10, a=0.1 + h, c=0.3), 4).density(t)
        down = kth_default_mixture(HomogeneousSpec(n=10, a=0.1 - h, c=0.3), 4).density(t)
        np.testing.assert_allclose(sens.density_da(t), (up - down) / (2 * h), rtol=1e-6, atol=1e-7)

    def test_density_derivative_in_c(self, figure_spec):
        sens = sensitivity_coeffs(figure_spec, 3)
        h = 1e-6
        t = np.linspace(0.1, 3.0, 12)
        up = kth_default_mixture(HomogeneousSpec(n=10, a=0.1, c=0.3 + h), 3).density(t)
        down = kth_default_mixture(HomogeneousSpec(n=10, a=0.1, c=0.3 - h), 3).density(t)
        np.testing.assert_allclose(sens.density_dc(t), (up - down) / (2 * h), rtol=1e-5, atol=1e-7)
