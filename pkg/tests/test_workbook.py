"""Tests for the Excel export."""
import pandas as pd
import pytest

from basket_cds.results import ResultRow
from basket_cds.workbook import _sheet_name, export_results_to_excel, export_tables_to_excel, summarize_table


@pytest.fixture
def table():
    return pd.DataFrame({'k': [1, 2], 'rate': [5.0240, 3.9300], 'published': [5.0242, 3.9288]})


class TestSummarizeTable:

    def test_gap_to_published(self, table):
        summary = summarize_table(table)
        assert summary['Cells'] == 2
        assert summary['Max |rate - published|'] == pytest.approx(0.0012)

    def test_simulated_columns(self):
        df = pd.DataFrame({'mc_rate': [1.0, 2.0], 'published_mc': [1.1, 2.0]})
        assert summarize_table(df)['Max |mc_rate - published_mc|'] == pytest.approx(0.1)

    def test_plain_table(self):
        assert summarize_table(pd.DataFrame({'k': [1]})) == {'Cells': 1}


class TestExport:

    def test_tables_read_back(self, table):
        output = export_tables_to_excel({'Table 1': table, 'Table 2': table.head(1)})
        sheets = pd.read_excel(output, sheet_name=None)
        assert list(sheets) == ['Summary', 'Table 1', 'Table 2']
        pd.testing.assert_frame_equal(sheets['Table 1'], table)
        summary = sheets['Summary']
        assert set(summary['Table']) == {'Table 1', 'Table 2'}
        assert summary.loc[(summary['Table'] == 'Table 2') & (summary['Metric'] == 'Cells'), 'Value'].item() == 1

    def test_results_sheet(self):
        rows = [ResultRow('demo', 1, 'analytic', 0.25), ResultRow('demo', 1, 'mc', 0.26, std_error=0.01)]
        sheets = pd.read_excel(export_results_to_excel(rows), sheet_name=None)
        results = sheets['Results']
        assert list(results['method']) == ['analytic', 'mc']
        assert results['rate'].tolist() == [0.25, 0.26]

    def test_sheet_names_are_sanitized(self):
        name = _sheet_name('theta/c: [a*b]? and a rather long tail')
        assert len(name) == 31
        assert not any(ch in name for ch in '[]:*?/\\')
