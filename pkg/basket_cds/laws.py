"""
Dispatch from a model spec to the law of its k-th default time
"""
import logging
from typing import Union

from basket_cds.decay_density import DecaySpec, kth_default_law_decay
from basket_cds.errors import InvalidParameterError
from basket_cds.hetero_groups import TwoGroupSpec, kth_default_law_hetero
from basket_cds.mixture_core import HomogeneousSpec, kth_default_mixture
from basket_cds.montecarlo import GeneralIntensitySpec
from basket_cds.pricing import DefaultLaw
from basket_cds.quadrature import DEFAULT_QUADRATURE, QuadratureConfig
from basket_cds.regime_switch import TwoStateSpec, constant_level_mixture, kth_default_law_rs

logger = logging.getLogger(__name__)

ModelSpec = Union[HomogeneousSpec, DecaySpec, TwoStateSpec, TwoGroupSpec, GeneralIntensitySpec]


def basket_size(spec: ModelSpec) -> int:
    return spec.n


def default_law(spec: ModelSpec, k: int, quad: QuadratureConfig = DEFAULT_QUADRATURE) -> DefaultLaw:
    """
    Analytic law of tau^k for any model with one.

    Raises:
        InvalidParameterError: for specs only the simulator handles
        NestingLimitError: for decay baskets beyond the nesting cap
    """
    if isinstance(spec, HomogeneousSpec):
        return kth_default_mixture(spec, k)
    if isinstance(spec, DecaySpec):
        if spec.d == 0:
            return kth_default_mixture(spec.as_homogeneous(), k)
        return kth_default_law_decay(spec, k, quad)
    if isinstance(spec, TwoStateSpec):
        if spec.x1 == spec.x2:
            return constant_level_mixture(spec, k)
        return kth_default_law_rs(spec, k)
    if isinstance(spec, TwoGroupSpec):
        if not 1 <= k <= spec.n:
            raise InvalidParameterError(f"k must satisfy 1 <= k <= n={spec.n}, got {k!r}")
        return kth_default_law_hetero(spec, k)
    if isinstance(spec, GeneralIntensitySpec):
        raise InvalidParameterError('general intensity baskets have no analytic law; use Monte Carlo')
    raise InvalidParameterError(f"unsupported model spec {type(spec).__name__}")
