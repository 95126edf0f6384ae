"""Tests for the exception hierarchy."""
import pytest

from basket_cds.errors import (
    BasketCDSError,
    ConfigError,
    DegenerateParameterError,
    InvalidParameterError,
    NestingLimitError,
    PricingError,
    QuadratureError,
    SimulationError,
)


@pytest.mark.parametrize("cls", [
    ConfigError, DegenerateParameterError, InvalidParameterError,
    NestingLimitError, PricingError, QuadratureError, SimulationError,
])
def test_everything_derives_from_base(cls):
    assert issubclass(cls, BasketCDSError)


def test_config_error_joins_messages():
    error = ConfigError(['model.n: required', 'run.ks: required'])
    assert error.errors == ['model.n: required', 'run.ks: required']
    assert str(error) == 'model.n: required; run.ks: required'


def test_config_error_without_messages():
    assert str(ConfigError([])) == 'invalid configuration'


def test_degenerate_error_carries_pair():
    error = DegenerateParameterError('collide', pair=(0, 2), values=(3.0, 3.0))
    assert error.pair == (0, 2)
    assert error.values == (3.0, 3.0)
    assert str(error) == 'collide'
