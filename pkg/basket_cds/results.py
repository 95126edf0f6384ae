"""
Result rows and their CSV form
"""
import io
import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Optional, Union

import pandas as pd

from basket_cds.errors import InvalidParameterError

logger = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 10
FLOAT_FORMAT = f"%.{SIGNIFICANT_DIGITS}g"
BASE_COLUMNS = ['scenario', 'k', 'method', 'rate', 'std_error']
TIMING_COLUMN = 'wall_clock_ms'


def round_significant(value: Optional[float], digits: int = SIGNIFICANT_DIGITS) -> Optional[float]:
    """Round to the precision the CSV keeps, so written rows read back equal."""
    if value is None or not math.isfinite(value):
        return value
    return float(f"{value:.{digits}g}")


@dataclass(frozen=True)
class ResultRow:
    """
    One priced seniority.

    Args:
        scenario: Scenario name
        k: Seniority
        method: analytic or mc
        rate: Swap rate (>= 0)
        std_error: Monte Carlo standard error, None for analytic rows
        wall_clock_ms: Engine time, None unless timings were requested
    """
    scenario: str
    k: int
    method: str
    rate: float
    std_error: Optional[float] = None
    wall_clock_ms: Optional[float] = None

    def __post_init__(self):
        if not self.rate >= 0:
            raise InvalidParameterError(f"rate must be >= 0, got {self.rate!r}")
        object.__setattr__(self, 'k', int(self.k))
        object.__setattr__(self, 'rate', round_significant(float(self.rate)))
        if self.std_error is not None:
            object.__setattr__(self, 'std_error', round_significant(float(self.std_error)))
        if self.wall_clock_ms is not None:
            object.__setattr__(self, 'wall_clock_ms', round_significant(float(self.wall_clock_ms)))


def rows_to_frame(rows: List[ResultRow], timings: bool = False) -> pd.DataFrame:
    """Rows as a DataFrame in (k, method) order."""
    columns = BASE_COLUMNS + ([TIMING_COLUMN] if timings else [])
    df = pd.DataFrame([asdict(r) for r in rows], columns=BASE_COLUMNS + [TIMING_COLUMN])
    if not df.empty:
        df = df.sort_values(['k', 'method'], kind='stable').reset_index(drop=True)
    return df[columns]


def write_results(rows: List[ResultRow], path: Optional[Union[str, Path]] = None,
                  timings: bool = False) -> str:
    """
    Write rows as CSV.

    Args:
        rows: Result rows
        path: Target file; None only renders the text
        timings: Include the wall_clock_ms column

    Returns:
        The CSV text
    """
    text = rows_to_frame(rows, timings=timings).to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    if path is not None:
        Path(path).write_text(text)
        logger.info("wrote %d rows to %s", len(rows), path)
    return text


def read_results(source: Union[str, Path, io.StringIO]) -> List[ResultRow]:
    """Parse a results CSV back into rows."""
    df = pd.read_csv(source, dtype={'scenario': str, 'method': str})
    missing = [c for c in BASE_COLUMNS if c not in df.columns]
    if missing:
        raise InvalidParameterError(f"results file lacks columns {missing}")
    rows = []
    for record in df.to_dict('records'):
        std_error = record.get('std_error')
        timing = record.get(TIMING_COLUMN)
        rows.append(ResultRow(
            scenario=record['scenario'],
            k=int(record['k']),
            method=record['method'],
            rate=float(record['rate']),
            std_error=None if pd.isna(std_error) else float(std_error),
            wall_clock_ms=None if timing is None or pd.isna(timing) else float(timing),
        ))
    return rows
