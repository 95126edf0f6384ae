"""Tests for result rows and their CSV form."""
import io

import pytest

from basket_cds.errors import InvalidParameterError
from basket_cds.results import ResultRow, read_results, round_significant, rows_to_frame, write_results


@pytest.fixture
def rows():
    return [
        ResultRow('demo', 2, 'mc', 3.9352, std_error=0.0041),
        ResultRow('demo', 1, 'analytic', 1.0 / 3.0),
        ResultRow('demo', 2, 'analytic', 3.9288),
    ]


class TestResultRow:

    def test_rounds_to_ten_significant_digits(self):
        assert ResultRow('s', 1, 'analytic', 1.0 / 3.0).rate == 0.3333333333

    def test_rejects_negative_rate(self):
        with pytest.raises(InvalidParameterError):
            ResultRow('s', 1, 'analytic', -0.01)

    def test_rejects_nan_rate(self):
        with pytest.raises(InvalidParameterError):
            ResultRow('s', 1, 'analytic', float('nan'))

    def test_round_significant_passes_none(self):
        assert round_significant(None) is None
        assert round_significant(123456.789012345, digits=4) == 123500.0


class TestCsv:

    def test_round_trip(self, rows):
        text = write_results(rows)
        back = read_results(io.StringIO(text))
        assert back == sorted(rows, key=lambda r: (r.k, r.method))

    def test_sorted_by_seniority_then_method(self, rows):
        df = rows_to_frame(rows)
        assert list(zip(df['k'], df['method'])) == [(1, 'analytic'), (2, 'analytic'), (2, 'mc')]
        assert list(df.columns) == ['scenario', 'k', 'method', 'rate', 'std_error']

    def test_timing_column(self):
        rows = [ResultRow('s', 1, 'analytic', 0.5, wall_clock_ms=12.25)]
        header = write_results(rows, timings=True).splitlines()[0]
        assert header == 'scenario,k,method,rate,std_error,wall_clock_ms'
        assert read_results(io.StringIO(write_results(rows, timings=True)))[0].wall_clock_ms == 12.25

    def test_analytic_rows_leave_error_blank(self, rows):
        lines = write_results(rows).splitlines()
        assert lines[1] == 'demo,1,analytic,0.3333333333,'

    def test_writes_file(self, rows, tmp_path):
        path = tmp_path / 'rates.csv'
        text = write_results(rows, path)
        assert path.read_text() == text
        assert len(read_results(path)) == 3

    def test_missing_columns(self):
        with pytest.raises(InvalidParameterError):
            read_results(io.StringIO('scenario,k\ns,1\n'))

    def test_empty(self):
        assert write_results([]).strip() == 'scenario,k,method,rate,std_error'
