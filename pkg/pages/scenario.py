import streamlit as st
import sys
from pathlib import Path

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))

from basket_cds.errors import BasketCDSError, ConfigError
from basket_cds.results import rows_to_frame, write_results
from basket_cds.runner import run_scenario
from basket_cds.scenario_config import parse_scenario, read_scenario_document, validate_scenario
from basket_cds.workbook import export_results_to_excel

CONFIG_DIR = Path(__file__).parent.parent / 'configs'

st.set_page_config(page_title="Scenario", layout="wide")

st.title('🧮 Scenario')
st.markdown('Price a basket from a TOML scenario (same format as the command line)')

tab1, tab2 = st.tabs(['📝 Edit', '📥 Upload'])

with tab1:
    examples = sorted(p.name for p in CONFIG_DIR.glob('*.toml'))
    example = st.selectbox('Start from example', examples) if examples else None
    initial = (CONFIG_DIR / example).read_text() if example else ''
    edited = st.text_area('Scenario TOML', value=initial, height=420, key=f'editor_{example}')

with tab2:
    uploaded_file = st.file_uploader('Choose scenario file', type=['toml'],
                                     help='Scenario with [model], [contract] and [run] tables')
    if uploaded_file:
        st.success(f'File uploaded: {uploaded_file.name}')

source = uploaded_file.getvalue() if uploaded_file else edited.encode('utf-8')

with st.sidebar:
    st.header('Run options')
    timings = st.checkbox('Record timings', value=False)
    perturb = st.checkbox('Shift c on degenerate rates', value=False,
                          help='Moves c by 1e-7 instead of failing when two mixture rates coincide')

try:
    document = read_scenario_document(source)
    is_valid, errors = validate_scenario(document)
except ConfigError as e:
    is_valid, errors = False, e.errors

if not is_valid:
    st.warning(f'⚠️ Found {len(errors)} validation errors:')
    for error in errors[:10]:
        st.error(error)
    if len(errors) > 10:
        st.info(f'...and {len(errors) - 10} more errors')

st.divider()

if st.button('🚀 Run scenario', type='primary', use_container_width=True, disabled=not is_valid):
    config = parse_scenario(document, name=Path(uploaded_file.name).stem if uploaded_file else (example or 'scenario').removesuffix('.toml'))

    col1, col2, col3 = st.columns(3)
    with col1:
        st.metric('Model', config.model_type)
    with col2:
        st.metric('Names', config.n_total)
    with col3:
        st.metric('Method', config.method)

    with st.spinner('Pricing...'):
        try:
            rows = run_scenario(config, timings=timings, perturb_degenerate=perturb)
        except BasketCDSError as e:
            rows = None
            st.error(f'❌ {e}')
            for note in getattr(e, '__notes__', []):
                st.caption(note)

    if rows:
        st.success(f'✅ Priced {len(rows)} rows')
        st.dataframe(rows_to_frame(rows, timings=timings), use_container_width=True, hide_index=True)

        col1, col2 = st.columns(2)
        with col1:
            st.download_button('📥 Download CSV', write_results(rows, timings=timings),
                               file_name=f'{config.name}.csv', mime='text/csv', use_container_width=True)
        with col2:
            st.download_button('📊 Download Excel', export_results_to_excel(rows, timings=timings),
                               file_name=f'{config.name}.xlsx',
                               mime='application/vnd.openxmlformats-officedocument.spreadsheetml.sheet',
                               use_container_width=True)
