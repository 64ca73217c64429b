import json

import pandas as pd
import pytest

from optomech_analyzer import __version__
from optomech_analyzer.core import PRESETS, TWO_PI, GridSpecError
from optomech_analyzer.fitting import FIXED_KEYS, free_values

from main import main, parse_range

from conftest import synthetic_spectrum_csv, write_json_file


def params_file(tmp_path, name='params.json', **changes):
    record = PRESETS['dataset_0V'].to_hz()
    record.update(changes)
    return write_json_file(tmp_path / name, record)


class TestState:

    def test_writes_metrics_and_manifest(self, tmp_path, capsys):
        out = tmp_path / 'state.json'
        assert main(['state', '--preset', 'dataset_0V', '--out', str(out)]) == 0

        record = json.loads(out.read_text())
        assert record['metrics']['purity'] == pytest.approx(0.2090, abs=5e-4)
        assert record['metrics']['p00'] == pytest.approx(0.3861, abs=5e-4)
        assert len(record['steady_state']['V']) == 6

        manifest = json.loads((tmp_path / 'state.json.manifest.json').read_text())
        assert manifest['command'] == 'state'
        assert str(out) in manifest['outputs']
        assert 'Purity' in capsys.readouterr().out

    def test_params_file_is_digested(self, tmp_path):
        source = params_file(tmp_path)
        out = tmp_path / 'state.json'
        assert main(['state', '--params', str(source), '--out', str(out), '--quiet']) == 0
        manifest = json.loads((tmp_path / 'state.json.manifest.json').read_text())
        assert list(manifest['input_digests']) == [str(source)]

    def test_quiet_prints_nothing(self, capsys):
        assert main(['state', '--preset', 'dataset_35V', '--quiet']) == 0
        assert capsys.readouterr().out == ''

    def test_excel_output(self, tmp_path):
        excel = tmp_path / 'metrics.xlsx'
        assert main(['state', '--preset', 'dataset_0V', '--excel', str(excel), '--quiet']) == 0
        assert excel.exists()

    def test_blue_detuning_is_a_numerical_failure(self, tmp_path, capsys):
        source = params_file(tmp_path, detuning_hz=111e3)
        assert main(['state', '--params', str(source), '--quiet']) == 2
        err = capsys.readouterr().err
        assert 'error kind=InstabilityError exit=2' in err
        assert 'Numerical failure' in err

    def test_unknown_key_is_invalid_input(self, tmp_path, capsys):
        source = params_file(tmp_path, omega_z_hz=1.0)
        assert main(['state', '--params', str(source), '--quiet']) == 1
        assert 'error kind=SchemaError exit=1' in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        assert main(['state', '--params', str(tmp_path / 'absent.json')]) == 1
        assert 'exit=1' in capsys.readouterr().err


class TestUsage:

    def test_missing_source(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(['state'])
        assert info.value.code == 1
        assert 'error kind=UsageError exit=1' in capsys.readouterr().err

    def test_unknown_flag(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(['state', '--preset', 'dataset_0V', '--colour'])
        assert info.value.code == 1

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(['--version'])
        assert info.value.code == 0
        assert __version__ in capsys.readouterr().out

    def test_parse_range(self):
        key, values = parse_range('Gamma_x_hz=1e3:1e5:3:log')
        assert key == 'Gamma_x_hz'
        assert list(values) == pytest.approx([1e3, 1e4, 1e5])
        with pytest.raises(GridSpecError):
            parse_range('Gamma_x_hz=1e3:1e5')
        with pytest.raises(GridSpecError):
            parse_range('Gamma_x_hz=0:1e5:3:log')


class TestSpectrum:

    def test_csv_columns(self, tmp_path):
        out = tmp_path / 'spectrum.csv'
        assert main(['spectrum', '--preset', 'dataset_0V', '--n-points', '11',
                     '--f-min=-150000', '--f-max=150000', '--out', str(out), '--quiet']) == 0
        table = pd.read_csv(out)
        assert list(table.columns) == ['freq_hz', 'total', 'term_gx', 'term_gy', 'term_quantum']
        assert len(table) == 11
        assert (table['total'] >= 1.0).all()

    def test_bad_grid(self, capsys):
        assert main(['spectrum', '--preset', 'dataset_0V', '--n-points', '1', '--quiet']) == 1
        assert 'GridSpecError' in capsys.readouterr().err


class TestFit:

    def test_round_trip_through_spectrum_file(self, tmp_path):
        params = PRESETS['dataset_0V']
        data = synthetic_spectrum_csv(tmp_path / 'acq1.csv', params)
        truth = free_values(params)
        record = params.to_hz()
        config = write_json_file(tmp_path / 'fit.json', {
            'fixed': {key: record[key] for key in FIXED_KEYS},
            'free_initial': {k: v * 1.03 for k, v in truth.items()},
        })
        out = tmp_path / 'fit_out.json'
        assert main(['fit', '--data', str(data), '--config', str(config), '--out', str(out),
                     '--metrics', '--quiet']) == 0

        result = json.loads(out.read_text())
        for key, value in truth.items():
            assert result['fit']['values_hz'][key] == pytest.approx(value, rel=1e-4), key
        assert result['fit']['syst_hz']['Gamma_x_hz'] > 0
        assert result['state_metrics']['metrics']['purity'] == pytest.approx(0.2090, abs=5e-4)
        assert result['config']['fixed']['eta'] == pytest.approx(0.32)

    def test_fits_a_spectrum_export_with_shot_noise_floor(self, tmp_path):
        params = PRESETS['dataset_0V']
        exported = tmp_path / 'exported.csv'
        assert main(['spectrum', '--preset', 'dataset_0V', '--n-points', '4001',
                     '--f-min=-200000', '--f-max=200000', '--out', str(exported), '--quiet']) == 0
        assert pd.read_csv(exported)['total'].min() > 1.0

        truth = free_values(params)
        record = params.to_hz()
        config = write_json_file(tmp_path / 'fit.json', {
            'fixed': {key: record[key] for key in FIXED_KEYS},
            'free_initial': {k: v * 1.03 for k, v in truth.items()},
        })
        out = tmp_path / 'fit_out.json'
        assert main(['fit', '--data', str(exported), '--config', str(config), '--out', str(out),
                     '--no-eta-systematic', '--quiet']) == 0

        result = json.loads(out.read_text())
        for key, value in truth.items():
            assert result['fit']['values_hz'][key] == pytest.approx(value, rel=1e-4), key

    def test_bad_config(self, tmp_path, capsys):
        data = synthetic_spectrum_csv(tmp_path / 'acq1.csv', PRESETS['dataset_0V'])
        config = write_json_file(tmp_path / 'fit.json', {'fixed': {'kappa_hz': 57e3}})
        assert main(['fit', '--data', str(data), '--config', str(config), '--quiet']) == 1
        assert 'SchemaError' in capsys.readouterr().err


class TestSimulate:

    def test_outputs(self, tmp_path):
        record = {
            'omega_x_hz': 200.0, 'omega_y_hz': 160.0,
            'g_x_hz': 10.0 / TWO_PI, 'g_y_hz': 0.0,
            'Gamma_x_hz': 500.0 / TWO_PI, 'Gamma_y_hz': 500.0 / TWO_PI,
            'kappa_hz': 500.0, 'detuning_hz': -500.0,
            'gamma_gas_x': 1e3, 'gamma_gas_y': 1e3,
        }
        source = write_json_file(tmp_path / 'params.json', record)
        sim = write_json_file(tmp_path / 'sim.json', {
            'dt': 1e-5, 'duration': 0.05, 'burn_in': 0.025, 'n_trajectories': 8, 'seed': 1,
        })
        prefix = tmp_path / 'run'
        assert main(['simulate', '--params', str(source), '--sim', str(sim), '--out', str(prefix),
                     '--seed', '9', '--threads', '2', '--quiet']) == 0

        psd = pd.read_csv(tmp_path / 'run_psd.csv')
        assert list(psd.columns) == ['freq_hz', 'psd_sim', 'psd_model']
        cov = json.loads((tmp_path / 'run_cov.json').read_text())
        assert cov['basis'] == ['Q', 'P', 'x', 'px', 'y', 'py']
        assert cov['n_samples'] in (8 * 2500, 8 * 2501)
        manifest = json.loads((tmp_path / 'run_psd.csv.manifest.json').read_text())
        assert manifest['config']['sim']['seed'] == 9
        assert len(manifest['input_digests']) == 2

    def test_coarse_step_rejected(self, tmp_path, capsys):
        sim = write_json_file(tmp_path / 'sim.json', {
            'dt': 1e-6, 'duration': 1e-3, 'burn_in': 0.0, 'n_trajectories': 1, 'seed': 1,
        })
        assert main(['simulate', '--preset', 'dataset_0V', '--sim', str(sim), '--quiet']) == 1
        assert 'ValidationError' in capsys.readouterr().err


class TestSweep:

    def test_overlap_map(self, tmp_path):
        out = tmp_path / 'map.csv'
        assert main(['sweep', 'fig3', '--s-points', '2', '--gamma-points', '3',
                     '--out', str(out), '--quiet']) == 0
        table = pd.read_csv(out)
        assert list(table.columns) == ['s', 'gamma_hz', 'purity', 'discord_sym', 'unstable']
        assert len(table) == 6
        assert (tmp_path / 'map.csv.manifest.json').exists()

    def test_grid_marks_unstable_rows(self, tmp_path):
        out = tmp_path / 'grid.csv'
        assert main(['sweep', 'grid', '--preset', 'dataset_0V', '--range', 'detuning_hz=-111e3:111e3:2',
                     '--out', str(out), '--quiet']) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == 'detuning_hz,purity,discord_sym,unstable'
        assert lines[1].endswith(',false')
        assert lines[2] == '111000.0,nan,nan,true'

    def test_unknown_metric(self, capsys):
        assert main(['sweep', 'grid', '--preset', 'dataset_0V', '--range', 'g_x_hz=1e4:2e4:2',
                     '--metrics', 'entanglement', '--quiet']) == 1
        assert 'GridSpecError' in capsys.readouterr().err
