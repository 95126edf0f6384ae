import streamlit as st

from basket_cds.errors import BasketCDSError
from basket_cds.montecarlo import SimulationPlan
from basket_cds.runner import reproduce_table
from basket_cds.results import FLOAT_FORMAT
from basket_cds.workbook import export_tables_to_excel, summarize_table

st.set_page_config(
    page_title="BasketFlow - Basket CDS under contagion",
    page_icon="📉",
    layout="wide",
    initial_sidebar_state="expanded"
)

st.title('📉 BasketFlow')
st.markdown('### k-th-to-default swap rates under default contagion')

st.divider()

col1, col2 = st.columns([2, 1])

with col1:
    st.markdown("""
    ## What it prices

    Every name in the basket defaults with an intensity that jumps after each
    default in the basket. BasketFlow computes the fair rate of a swap that
    pays on the k-th default.

    ### Models
    - **Homogeneous** - constant contagion, exact exponential-mixture law
    - **Decay** - contagion that fades at rate d, nested quadrature
    - **Regime switching** - two-state intensity chain, closed-form transforms
    - **Two groups** - different rates and cross-effects per group
    - **General** - any rates, contagion and decay matrices, simulation only
    """)

with col2:
    st.info("""
    **Pages**

    🧮 **Scenario**
    Upload or edit a TOML scenario and price it

    📈 **Sensitivity**
    dS/da and dS/dc curves for the homogeneous model
    """)

st.divider()

st.markdown('## Reference tables')
st.caption('Contract for all tables: T=3, semi-annual fees, R=0.5, r=0.05')

with st.sidebar:
    st.header('Table settings')
    table_method = st.radio('Table 3 method', ['analytic', 'both'],
                            help='both adds simulated rates next to the analytic ones')
    paths = st.number_input('Paths', min_value=1000, max_value=1_000_000, value=100_000, step=10_000)
    seed = st.number_input('Seed', min_value=0, value=0, step=1)

tab1, tab2, tab3 = st.tabs([
    '1️⃣ Decay (n=2, k=2)',
    '2️⃣ Regime switching (n=10)',
    '3️⃣ Two groups (5 + 5)'
])

if 'tables' not in st.session_state:
    st.session_state.tables = {}

for which, tab in zip((1, 2, 3), (tab1, tab2, tab3)):
    with tab:
        if st.button(f'▶️ Reproduce table {which}', key=f'table_{which}', type='primary'):
            method = table_method if which == 3 else 'analytic'
            with st.spinner(f'Pricing table {which}...'):
                try:
                    st.session_state.tables[which] = reproduce_table(
                        which, method=method, plan=SimulationPlan(paths=int(paths), seed=int(seed)))
                except BasketCDSError as e:
                    st.error(f'❌ Table {which} failed: {e}')

        df = st.session_state.tables.get(which)
        if df is not None:
            summary = summarize_table(df)
            col1, col2 = st.columns(2)
            with col1:
                st.metric('Cells', summary['Cells'])
            with col2:
                gap = summary.get('Max |rate - published|')
                if gap is not None:
                    st.metric('Max gap to published', f'{gap:.2e}')
            st.dataframe(df, use_container_width=True, hide_index=True)
            st.download_button(
                '📥 Download CSV',
                df.to_csv(index=False, float_format=FLOAT_FORMAT),
                file_name=f'table{which}.csv',
                mime='text/csv',
                key=f'csv_{which}'
            )

if st.session_state.tables:
    st.divider()
    workbook = export_tables_to_excel(
        {f'Table {which}': df for which, df in sorted(st.session_state.tables.items())})
    st.download_button(
        '📊 Download all tables (Excel)',
        workbook,
        file_name='basket_cds_tables.xlsx',
        mime='application/vnd.openxmlformats-officedocument.spreadsheetml.sheet',
        use_container_width=True
    )
