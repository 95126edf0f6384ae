"""
Excel export of reproduced tables and scenario results
"""
import logging
from io import BytesIO
from typing import Dict, List

import pandas as pd

from basket_cds.results import ResultRow, rows_to_frame

logger = logging.getLogger(__name__)

MAX_COLUMN_WIDTH = 50


def _autosize(worksheet):
    """Fit column widths to their longest cell."""
    for column in worksheet.columns:
        longest = max((len(str(cell.value)) for cell in column if cell.value is not None), default=0)
        worksheet.column_dimensions[column[0].column_letter].width = min(longest + 2, MAX_COLUMN_WIDTH)


def _sheet_name(title: str) -> str:
    # Excel allows 31 characters and no []:*?/\
    for ch in '[]:*?/\\':
        title = title.replace(ch, '-')
    return title[:31]


def summarize_table(df: pd.DataFrame) -> Dict[str, float]:
    """Cell count and largest gap to the published values, when the table has them."""
    summary = {'Cells': len(df)}
    if 'rate' in df and 'published' in df:
        summary['Max |rate - published|'] = float((df['rate'] - df['published']).abs().max())
    if 'mc_rate' in df and 'published_mc' in df:
        summary['Max |mc_rate - published_mc|'] = float((df['mc_rate'] - df['published_mc']).abs().max())
    return summary


def export_tables_to_excel(tables: Dict[str, pd.DataFrame]) -> BytesIO:
    """
    Workbook with a Summary sheet and one sheet per table.

    Args:
        tables: Sheet title -> table

    Returns:
        BytesIO positioned at the start of the .xlsx content
    """
    output = BytesIO()
    summary_rows = []
    for title, df in tables.items():
        for metric, value in summarize_table(df).items():
            summary_rows.append({'Table': title, 'Metric': metric, 'Value': value})

    with pd.ExcelWriter(output, engine='openpyxl') as writer:
        pd.DataFrame(summary_rows, columns=['Table', 'Metric', 'Value']).to_excel(
            writer, sheet_name='Summary', index=False)
        _autosize(writer.sheets['Summary'])
        for title, df in tables.items():
            name = _sheet_name(title)
            df.to_excel(writer, sheet_name=name, index=False)
            _autosize(writer.sheets[name])

    output.seek(0)
    logger.debug("workbook with %d tables written", len(tables))
    return output


def export_results_to_excel(rows: List[ResultRow], timings: bool = False) -> BytesIO:
    """Scenario rows as a single-sheet workbook."""
    return export_tables_to_excel({'Results': rows_to_frame(rows, timings=timings)})
