import hashlib
import json
import math

import numpy as np
import pandas as pd
import pytest
from openpyxl import load_workbook

from optomech_analyzer import __version__
from optomech_analyzer.analysis import METRIC_NAMES, StabilityStatus, characterize, characterize_group, spectrum_grid
from optomech_analyzer.fitting import FitStatus, FitResult, free_values
from optomech_analyzer.export import (
    MANIFEST_SUFFIX,
    RunManifest,
    to_json_ready,
    write_json,
    write_table_csv,
    write_spectrum_csv,
    file_digest,
    export_fit_to_excel,
    export_metrics_to_excel,
    plot_spectrum,
    plot_psd_comparison,
    plot_overlap_map,
)


def fit_result(params, acquisitions=()):
    values = free_values(params)
    return FitResult(params=params, values_hz=values, status=FitStatus.CONVERGED, rss=0.0,
                     n_iterations=3, n_bins=1201, acquisition_id='run', acquisitions=list(acquisitions))


class TestJSON:

    def test_plain_types(self):
        record = to_json_ready({
            'matrix': np.eye(2),
            'nan': float('nan'),
            'inf': np.float64(np.inf),
            'count': np.int64(3),
            'flag': np.bool_(True),
            'status': StabilityStatus.STABLE,
            'pair': (1.5, 2.5),
        })
        assert record == {
            'matrix': [[1.0, 0.0], [0.0, 1.0]],
            'nan': None,
            'inf': None,
            'count': 3,
            'flag': True,
            'status': StabilityStatus.STABLE.value,
            'pair': [1.5, 2.5],
        }
        assert type(record['count']) is int
        assert type(record['flag']) is bool

    def test_full_precision(self, tmp_path):
        value = 0.1 + 0.2
        path = write_json(tmp_path / 'sub' / 'r.json', {'value': value, 'missing': math.nan})
        loaded = json.loads(path.read_text())
        assert loaded['value'] == value
        assert loaded['missing'] is None

    def test_metrics_record(self, tmp_path, params_0v):
        path = write_json(tmp_path / 'm.json', characterize(params_0v).to_dict())
        loaded = json.loads(path.read_text())
        assert loaded['discord_sym'] == pytest.approx(0.04480, abs=3e-4)


class TestCSV:

    def test_flags_and_missing_values(self, tmp_path):
        table = pd.DataFrame({'s': [0.1, 0.2], 'purity': [0.5, math.nan], 'unstable': [False, True]})
        path = write_table_csv(tmp_path / 't.csv', table)
        lines = path.read_text().splitlines()
        assert lines == ['s,purity,unstable', '0.1,0.5,false', '0.2,nan,true']

    def test_spectrum_columns(self, tmp_path, params_0v):
        path = write_spectrum_csv(tmp_path / 'spectrum.csv', spectrum_grid(params_0v, -1e3, 1e3, 3))
        assert path.read_text().splitlines()[0] == 'freq_hz,total,term_gx,term_gy,term_quantum'
        assert len(pd.read_csv(path)) == 3

    def test_csv_bytes_are_repeatable(self, tmp_path, params_0v):
        first = write_spectrum_csv(tmp_path / 'a.csv', spectrum_grid(params_0v, -2e3, 2e3, 9))
        second = write_spectrum_csv(tmp_path / 'b.csv', spectrum_grid(params_0v, -2e3, 2e3, 9))
        assert first.read_bytes() == second.read_bytes()


class TestManifest:

    def test_digest(self, tmp_path):
        path = tmp_path / 'f.txt'
        path.write_bytes(b'heterodyne')
        assert file_digest(path) == hashlib.sha256(b'heterodyne').hexdigest()

    def test_written_next_to_output(self, tmp_path):
        source = tmp_path / 'params.json'
        source.write_text('{}')
        output = tmp_path / 'state.json'
        output.write_text('{"purity": 0.2}')

        manifest = RunManifest.create('state', {'preset': None, 'seed': 0}, inputs=[source])
        manifest.add_output(output)
        path = manifest.write(output)

        assert path.name == 'state.json' + MANIFEST_SUFFIX
        record = json.loads(path.read_text())
        assert record['command'] == 'state'
        assert record['tool_version'] == __version__
        assert record['input_digests'] == {str(source): file_digest(source)}
        assert record['outputs'] == {str(output): file_digest(output)}
        assert record['config'] == {'preset': None, 'seed': 0}


class TestExcel:

    def test_fit_workbook(self, tmp_path, params_0v):
        group = fit_result(params_0v, [fit_result(params_0v), fit_result(params_0v)])
        path = export_fit_to_excel(group, tmp_path / 'fit.xlsx')
        wb = load_workbook(path)
        assert wb.sheetnames == ['Fit', 'Acquisitions']
        sheet = wb['Fit']
        assert sheet['A4'].value == 'Parameter'
        assert sheet['A5'].value == 'omega_x_hz'
        assert sheet['B5'].value == pytest.approx(122170)

    def test_single_fit_has_no_acquisition_sheet(self, tmp_path, params_0v):
        wb = load_workbook(export_fit_to_excel(fit_result(params_0v), tmp_path / 'fit.xlsx'))
        assert wb.sheetnames == ['Fit']

    def test_metrics_workbook(self, tmp_path, params_0v):
        report = characterize_group(params_0v, [params_0v, params_0v])
        path = export_metrics_to_excel({'0V': report, 'plain': characterize(params_0v)}, tmp_path / 'm.xlsx')
        wb = load_workbook(path)
        assert wb.sheetnames == ['Metrics', 'Errors']
        sheet = wb['Metrics']
        assert [c.value for c in sheet[4]] == ['Metric', '0V', 'plain']
        assert sheet.max_row == 4 + len(METRIC_NAMES)
        assert sheet['B5'].value == pytest.approx(sheet['C5'].value)


class TestPlots:

    def test_spectrum_figure(self, tmp_path, params_0v):
        path = plot_spectrum(spectrum_grid(params_0v, -200e3, 200e3, 401), tmp_path / 'spectrum.png')
        assert path.read_bytes()[:8] == b'\x89PNG\r\n\x1a\n'

    def test_psd_comparison_figure(self, tmp_path):
        freq = np.linspace(-10, 10, 21)
        table = pd.DataFrame({'freq_hz': freq, 'psd_sim': 1 + freq ** 2, 'psd_model': 1 + freq ** 2})
        assert plot_psd_comparison(table, tmp_path / 'psd.png').stat().st_size > 0

    def test_overlap_map_figure(self, tmp_path):
        table = pd.DataFrame({
            's': [0.1, 0.1, 0.5, 0.5],
            'gamma_hz': [100.0, 1e5, 100.0, 1e5],
            'purity': [0.9, 0.1, 0.8, 0.2],
            'discord_sym': [0.01, math.nan, 0.03, 0.001],
            'unstable': [False, False, False, False],
        })
        assert plot_overlap_map(table, tmp_path / 'map.png').exists()
