"""
Built-in parameter sets for the three reference tables and the two sensitivity
curves, with the published swap rates (in the same units as swap_rate)
"""
from typing import Dict, Iterator, Tuple

import numpy as np

from basket_cds.decay_density import DecaySpec
from basket_cds.hetero_groups import TwoGroupSpec
from basket_cds.mixture_core import HomogeneousSpec
from basket_cds.pricing import SwapContract
from basket_cds.regime_switch import TwoStateSpec

# T=3, Delta=0.5, R=0.5, r=0.05 for every table
TABLE_MATURITY = 3.0
TABLE_PERIOD = 0.5
TABLE_RECOVERY = 0.5
TABLE_RATE = 0.05


def table_contract() -> SwapContract:
    return SwapContract.regular(TABLE_MATURITY, TABLE_PERIOD, TABLE_RECOVERY, TABLE_RATE)


# Decay model, n=2, k=2
TABLE1_N = 2
TABLE1_K = 2
TABLE1_A = (0.1, 1.0)
TABLE1_C = (0.2, 1.0, 5.0)
TABLE1_D = (0.001, 0.01, 0.1, 1.0, 10.0, 100.0)

# (a, d) -> rates for c = 0.2, 1, 5
TABLE1_PUBLISHED: Dict[Tuple[float, float], Tuple[float, float, float]] = {
    (0.1, 0.001): (0.0134, 0.0211, 0.0479),
    (0.1, 0.01): (0.0134, 0.0210, 0.0477),
    (0.1, 0.1): (0.0132, 0.0203, 0.0459),
    (0.1, 1.0): (0.0123, 0.0160, 0.0322),
    (0.1, 10.0): (0.0115, 0.0120, 0.0147),
    (0.1, 100.0): (0.0114, 0.0114, 0.0117),
    (1.0, 0.001): (0.3654, 0.4961, 0.7529),
    (1.0, 0.01): (0.3651, 0.4955, 0.7526),
    (1.0, 0.1): (0.3626, 0.4898, 0.7502),
    (1.0, 1.0): (0.3464, 0.4390, 0.7184),
    (1.0, 10.0): (0.3262, 0.3447, 0.4392),
    (1.0, 100.0): (0.3222, 0.3242, 0.3342),
}

# Regime switching, n=10, c=3, X(0)=x1
TABLE2_N = 10
TABLE2_C = 3.0
TABLE2_INITIAL_STATE = 1
TABLE2_CONDITIONS: Dict[int, Dict[str, float]] = {
    1: {'x1': 1.0, 'x2': 1.0, 'eta1': 1.0, 'eta2': 1.0},
    2: {'x1': 1.0, 'x2': 2.0, 'eta1': 1.0, 'eta2': 1.0},
    3: {'x1': 1.0, 'x2': 2.0, 'eta1': 1.0, 'eta2': 2.0},
    4: {'x1': 1.0, 'x2': 2.0, 'eta1': 2.0, 'eta2': 1.0},
}

# k -> rates for conditions 1..4
TABLE2_PUBLISHED: Dict[int, Tuple[float, float, float, float]] = {
    1: (5.0242, 5.2507, 5.2409, 5.4575),
    2: (3.9288, 4.1170, 4.1087, 4.2891),
    3: (3.4456, 3.6184, 3.6106, 3.7766),
    4: (3.1369, 3.3005, 3.2930, 3.4503),
    5: (2.9035, 3.0605, 3.0532, 3.2043),
    6: (2.7070, 2.8588, 2.8516, 2.9979),
    7: (2.5270, 2.6743, 2.6672, 2.8093),
    8: (2.3473, 2.4904, 2.4833, 2.6214),
    9: (2.1459, 2.2847, 2.2775, 2.4114),
    10: (1.8608, 1.9945, 1.9870, 2.1159),
}

# Two groups, n1=n2=5, a=a~=1
TABLE3_N1 = 5
TABLE3_N2 = 5
TABLE3_A = 1.0
TABLE3_A_TILDE = 1.0
TABLE3_CONDITIONS: Dict[int, Dict[str, float]] = {
    1: {'b': 3.0, 'b_tilde': 3.0, 'c': 3.0, 'c_tilde': 3.0},
    2: {'b': 3.0, 'b_tilde': 0.3, 'c': 0.3, 'c_tilde': 3.0},
    3: {'b': 0.3, 'b_tilde': 0.3, 'c': 0.3, 'c_tilde': 0.3},
    4: {'b': 3.0, 'b_tilde': 3.0, 'c': 0.3, 'c_tilde': 0.3},
}

# k -> (analytic, simulated) rates for conditions 1..4
TABLE3_PUBLISHED: Dict[int, Tuple[Tuple[float, float], ...]] = {
    1: ((5.0242, 5.0265), (5.0242, 5.0352), (5.0242, 5.0205), (5.0242, 5.0463)),
    2: ((3.9288, 3.9352), (3.4752, 3.4692), (2.7073, 2.7167), (3.2065, 3.2167)),
    3: ((3.4456, 3.4510), (2.8287, 2.8245), (1.9036, 1.9123), (2.5866, 2.5922)),
    4: ((3.1369, 3.1417), (2.4246, 2.4209), (1.4799, 1.4860), (2.2543, 2.2567)),
    5: ((2.9035, 2.9062), (2.1161, 2.1135), (1.2081, 1.2095), (2.0302, 2.0333)),
    6: ((2.7070, 2.7068), (1.8376, 1.8366), (1.0112, 1.0116), (1.8554, 1.8549)),
    7: ((2.5270, 2.5270), (1.6445, 1.6392), (0.8550, 0.8535), (1.7036, 1.7013)),
    8: ((2.3473, 2.3477), (1.4821, 1.4757), (0.7203, 0.7205), (1.5582, 1.5545)),
    9: ((2.1459, 2.1440), (1.3215, 1.3171), (0.5921, 0.5920), (1.4015, 1.3985)),
    10: ((1.8608, 1.8625), (1.1169, 1.1096), (0.4451, 0.4448), (1.1889, 1.1851)),
}

# Sensitivity curves: n=10 with c=0.3 (sweep a) and a=0.1 (sweep c). The grids
# and the base value of the swept parameter are local choices.
FIGURE_N = 10
FIGURE_BASES = {
    'a': HomogeneousSpec(n=FIGURE_N, a=0.1, c=0.3),
    'c': HomogeneousSpec(n=FIGURE_N, a=0.1, c=0.3),
}
FIGURE_GRIDS = {
    'a': tuple(np.round(np.linspace(0.02, 0.5, 25), 10)),
    'c': tuple(np.round(np.linspace(0.0, 3.0, 31), 10)),
}


def table1_cells() -> Iterator[Tuple[float, float, float, DecaySpec, float]]:
    """(a, c, d, spec, published rate) in a, d, c order."""
    for a in TABLE1_A:
        for d in TABLE1_D:
            for c, published in zip(TABLE1_C, TABLE1_PUBLISHED[(a, d)]):
                yield a, c, d, DecaySpec(n=TABLE1_N, a=a, c=c, d=d), published


def table2_specs() -> Iterator[Tuple[int, TwoStateSpec]]:
    for condition, params in TABLE2_CONDITIONS.items():
        yield condition, TwoStateSpec(n=TABLE2_N, c=TABLE2_C, initial_state=TABLE2_INITIAL_STATE, **params)


def table3_specs() -> Iterator[Tuple[int, TwoGroupSpec]]:
    for condition, params in TABLE3_CONDITIONS.items():
        yield condition, TwoGroupSpec(n1=TABLE3_N1, n2=TABLE3_N2, a=TABLE3_A, a_tilde=TABLE3_A_TILDE, **params)
