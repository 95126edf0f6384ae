import streamlit as st
import sys
from pathlib import Path

import numpy as np

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))

from basket_cds.errors import BasketCDSError
from basket_cds.mixture_core import HomogeneousSpec
from basket_cds.results import FLOAT_FORMAT
from basket_cds.runner import figure_scenario, sensitivity_sweep

st.set_page_config(page_title="Sensitivity", layout="wide")

st.title('📈 Sensitivity')
st.markdown('Derivatives of the k-th-to-default rate in the homogeneous model, analytic next to finite differences')

with st.sidebar:
    st.header('Sweep')
    parameter = st.radio('Parameter', ['a', 'c'])
    n = st.number_input('Names (n)', min_value=1, max_value=30, value=10, step=1)
    if parameter == 'a':
        c = st.number_input('Contagion c', min_value=0.0, value=0.3, step=0.1)
        low, high = st.slider('a range', 0.01, 2.0, (0.02, 0.5))
        fixed = {'c': c}
    else:
        a = st.number_input('Base rate a', min_value=0.001, value=0.1, step=0.01)
        low, high = st.slider('c range', 0.0, 10.0, (0.0, 3.0))
        fixed = {'a': a}
    points = st.number_input('Grid points', min_value=2, max_value=200, value=25, step=1)

ks = st.multiselect('Seniorities k', list(range(1, int(n) + 1)), default=list(range(1, int(n) + 1)))

if st.button('▶️ Compute', type='primary', use_container_width=True, disabled=not ks):
    base = figure_scenario(parameter, ks=sorted(ks))
    params = {'n': int(n), 'a': 0.1, 'c': 0.3}
    params.update(fixed)
    grid = np.linspace(low, high, int(points))

    with st.spinner('Differentiating...'):
        try:
            df = sensitivity_sweep(base.with_model(HomogeneousSpec(**params)), parameter, grid=grid)
        except BasketCDSError as e:
            df = None
            st.error(f'❌ {e}')

    if df is not None:
        degenerate = int(df['degenerate'].sum())
        col1, col2 = st.columns(2)
        with col1:
            st.metric('Points', len(grid))
        with col2:
            st.metric('Degenerate rows', degenerate)
        if degenerate:
            st.warning('⚠️ Some grid points have coinciding mixture rates; their rows are flagged and left blank')

        curves = df[~df['degenerate']].pivot(index='value', columns='k', values='theta_analytic')
        st.subheader(f'dS/d{parameter}')
        st.dataframe(curves, use_container_width=True)

        st.subheader('All rows')
        st.dataframe(df, use_container_width=True, hide_index=True)
        st.download_button('📥 Download CSV', df.to_csv(index=False, float_format=FLOAT_FORMAT),
                           file_name=f'theta_{parameter}.csv', mime='text/csv')
