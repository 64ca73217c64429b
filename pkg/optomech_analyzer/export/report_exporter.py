"""
Report Exporter
Writes machine-readable JSON and CSV results, run manifests, and formatted
Excel tables for fit parameters and state metrics.
"""

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field, asdict
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Union

import numpy as np
import pandas as pd

from .. import __version__
from ..analysis import METRIC_NAMES


logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

MANIFEST_SUFFIX = '.manifest.json'


# ===================
# JSON / CSV
# ===================

def to_json_ready(value: Any) -> Any:
    """
    Convert a result structure to plain JSON types

    numpy arrays become nested lists, enums their values, and non-finite
    floats None.
    """
    if isinstance(value, Mapping):
        return {str(k): to_json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_json_ready(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_json_ready(value.tolist())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def write_json(path: PathLike, record: Mapping[str, Any]) -> Path:
    """Write a record as indented JSON with full double precision"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(to_json_ready(record), f, indent=2, allow_nan=False)
        f.write('\n')
    logger.debug("wrote %s", path)
    return path


def write_table_csv(path: PathLike, table: pd.DataFrame) -> Path:
    """
    Write a table as CSV with a header line

    Boolean columns are written as lowercase true/false and NaN as 'nan'.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table = table.copy()
    for column in table.columns:
        if pd.api.types.is_bool_dtype(table[column]):
            table[column] = table[column].map({True: 'true', False: 'false'})
    table.to_csv(path, index=False, na_rep='nan')
    logger.debug("wrote %d rows to %s", len(table), path)
    return path


def write_spectrum_csv(path: PathLike, decomposition) -> Path:
    """Spectrum decomposition with columns freq_hz,total,term_gx,term_gy,term_quantum"""
    return write_table_csv(path, decomposition.to_frame())


# ===================
# MANIFEST
# ===================

def file_digest(path: PathLike) -> str:
    """sha256 hex digest of a file"""
    h = hashlib.sha256()
    with open(path, 'rb') as f:
        for block in iter(lambda: f.read(1 << 16), b''):
            h.update(block)
    return h.hexdigest()


@dataclass
class RunManifest:
    """Provenance record written next to every output"""
    command: str
    config: Dict[str, Any]
    input_digests: Dict[str, str] = field(default_factory=dict)
    outputs: Dict[str, str] = field(default_factory=dict)
    tool_version: str = __version__
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    @classmethod
    def create(cls, command: str, config: Mapping[str, Any],
               inputs: Iterable[PathLike] = ()) -> 'RunManifest':
        digests = {str(p): file_digest(p) for p in inputs}
        return cls(command=command, config=dict(config), input_digests=digests)

    def add_output(self, path: PathLike) -> None:
        self.outputs[str(path)] = file_digest(path)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def write(self, output_path: PathLike) -> Path:
        """Write as <output_path>.manifest.json"""
        output_path = Path(output_path)
        return write_json(output_path.with_name(output_path.name + MANIFEST_SUFFIX), self.to_dict())


# ===================
# EXCEL
# ===================

def _write_sheet(sheet, title: str, subtitle: str, headers, rows, number_format: str = '0.000000E+00'):
    from openpyxl.styles import Font, PatternFill, Alignment
    from openpyxl.utils import get_column_letter

    sheet['A1'] = title
    sheet['A1'].font = Font(bold=True, size=14)
    sheet['A2'] = subtitle
    sheet['A2'].font = Font(italic=True)

    header_fill = PatternFill(start_color='DDDDDD', end_color='DDDDDD', fill_type='solid')
    for idx, header in enumerate(headers, start=1):
        cell = sheet.cell(row=4, column=idx, value=header)
        cell.font = Font(bold=True)
        cell.fill = header_fill
        cell.alignment = Alignment(horizontal='center')

    for row_num, row in enumerate(rows, start=5):
        for idx, value in enumerate(row, start=1):
            if isinstance(value, float) and not math.isfinite(value):
                value = '-'
            cell = sheet.cell(row=row_num, column=idx, value=value)
            if isinstance(value, float):
                cell.number_format = number_format

    sheet.column_dimensions['A'].width = 24
    for idx in range(2, len(headers) + 1):
        sheet.column_dimensions[get_column_letter(idx)].width = 18


def export_fit_to_excel(result, output_path: PathLike, title: str = "Fitted parameters") -> Path:
    """
    Fitted free parameters as value / stat / syst columns (Hz),
    followed by one sheet of per-acquisition values
    """
    from openpyxl import Workbook

    wb = Workbook()
    wb.remove(wb.active)

    table = result.to_frame()
    sheet = wb.create_sheet("Fit")
    _write_sheet(
        sheet, title, f"status {result.status.value}, rss {result.rss:.6g}",
        ['Parameter', 'Value (Hz)', 'Stat (Hz)', 'Syst (Hz)'],
        table[['parameter', 'value', 'stat', 'syst']].itertuples(index=False, name=None),
        number_format='#,##0.0',
    )

    if result.acquisitions:
        sheet = wb.create_sheet("Acquisitions")
        keys = list(result.values_hz)
        _write_sheet(
            sheet, "Per-acquisition fits", f"{len(result.acquisitions)} acquisitions",
            ['Acquisition'] + keys + ['Status'],
            [[a.acquisition_id] + [a.values_hz[k] for k in keys] + [a.status.value] for a in result.acquisitions],
            number_format='#,##0.0',
        )

    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    wb.save(output_path)
    logger.info("fit table exported to %s", output_path)
    return output_path


def export_metrics_to_excel(reports: Mapping[str, Any], output_path: PathLike,
                            title: str = "State metrics") -> Path:
    """
    One column per configuration, one row per metric

    Args:
        reports: Configuration label -> MetricsReport or StateMetrics
    """
    from openpyxl import Workbook

    wb = Workbook()
    wb.remove(wb.active)
    labels = list(reports)

    def scalar(report, name: str) -> float:
        metrics = getattr(report, 'central', report)
        return metrics.scalar(name)

    sheet = wb.create_sheet("Metrics")
    _write_sheet(
        sheet, title, ', '.join(labels),
        ['Metric'] + labels,
        [[name.replace('_', ' ')] + [scalar(reports[label], name) for label in labels] for name in METRIC_NAMES],
        number_format='0.0000',
    )

    with_errors = {k: r for k, r in reports.items() if getattr(r, 'errors', None)}
    if with_errors:
        sheet = wb.create_sheet("Errors")
        headers = ['Metric']
        for label in with_errors:
            headers += [f"{label} stat", f"{label} syst"]
        rows = []
        for name in METRIC_NAMES:
            row = [name.replace('_', ' ')]
            for report in with_errors.values():
                err = report.errors[name]
                row += [err.stat, err.syst]
            rows.append(row)
        _write_sheet(sheet, "Error bars", "statistical and η-systematic", headers, rows, number_format='0.0000')

    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    wb.save(output_path)
    logger.info("metrics table exported to %s", output_path)
    return output_path
