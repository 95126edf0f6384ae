"""Tests for the adaptive quadrature wrapper."""
import numpy as np
import pytest

from basket_cds.errors import InvalidParameterError, QuadratureError
from basket_cds.quadrature import DEFAULT_QUADRATURE, QuadratureConfig, integrate


class TestQuadratureConfig:

    def test_defaults(self):
        assert DEFAULT_QUADRATURE.abs_tol == 1e-9
        assert DEFAULT_QUADRATURE.panel_rule == 'gk21'
        assert DEFAULT_QUADRATURE.max_nesting == 3

    @pytest.mark.parametrize("kwargs", [
        {'abs_tol': 0.0},
        {'rel_tol': -1.0},
        {'max_depth': 0},
        {'panel_rule': 'simpson'},
        {'max_nesting': -1},
    ])
    def test_rejects_invalid_settings(self, kwargs):
        with pytest.raises(InvalidParameterError):
            QuadratureConfig(**kwargs)


class TestIntegrate:

    def test_scalar_integrand(self):
        assert integrate(np.sin, 0.0, np.pi) == pytest.approx(2.0, abs=1e-12)

    def test_vector_integrand(self):
        value = integrate(lambda t: np.array([1.0, t, np.exp(-t)]), 0.0, 2.0)
        np.testing.assert_allclose(value, [2.0, 2.0, 1.0 - np.exp(-2.0)], atol=1e-12)

    def test_break_points_outside_the_interval_are_ignored(self):
        value = integrate(lambda t: abs(t - 0.3), 0.0, 1.0, points=[-1.0, 0.3, 5.0])
        assert value == pytest.approx(0.045 + 0.245, abs=1e-12)

    def test_empty_interval(self):
        assert integrate(np.exp, 1.5, 1.5) == 0.0
        np.testing.assert_array_equal(integrate(lambda t: np.array([t, t]), 1.0, 1.0), [0.0, 0.0])

    def test_reversed_limits(self):
        with pytest.raises(InvalidParameterError):
            integrate(np.exp, 1.0, 0.0)

    def test_subdivision_limit(self):
        config = QuadratureConfig(abs_tol=1e-14, rel_tol=0.0, max_depth=1)
        with pytest.raises(QuadratureError) as info:
            integrate(lambda t: np.sin(200.0 * t) ** 2, 0.0, 10.0, config)
        assert info.value.estimate is not None
        assert info.value.error > 0
