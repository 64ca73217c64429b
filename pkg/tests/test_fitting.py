import math

import numpy as np
import pytest

from optomech_analyzer.core import (
    TWO_PI,
    SchemaError,
    ValidationError,
    EmptyWindowError,
    InstabilityError,
)
from optomech_analyzer.analysis import heterodyne_psd
from optomech_analyzer.ingestion import SpectrumData
from optomech_analyzer.fitting import (
    FREE_KEYS,
    FitConfig,
    FitStatus,
    SpectrumFitter,
    free_values,
    included_mask,
    residuals,
    objective,
    initial_guesses,
    fit,
    systematic_eta,
)


FIXED = {'kappa_hz': 57e3, 'detuning_hz': -111e3}


def synthetic(params, step=100.0, f_min=-200e3, f_max=200e3, acquisition_id='synthetic'):
    freq = np.arange(f_min, f_max + step / 2, step)
    psd = heterodyne_psd(TWO_PI * freq, params, shot_subtracted=True)
    return SpectrumData(freq, psd, acquisition_id=acquisition_id)


def perturbed(values, omega=0.02, coupling=0.2, decoherence=0.2):
    return {
        'omega_x_hz': values['omega_x_hz'] * (1 + omega),
        'omega_y_hz': values['omega_y_hz'] * (1 - omega),
        'g_x_hz': values['g_x_hz'] * (1 + coupling),
        'g_y_hz': values['g_y_hz'] * (1 - coupling),
        'Gamma_x_hz': values['Gamma_x_hz'] * (1 - decoherence),
        'Gamma_y_hz': values['Gamma_y_hz'] * (1 + decoherence),
    }


class TestFitConfig:

    def test_defaults_are_materialized(self):
        config = FitConfig.from_dict({'fixed': FIXED})
        assert config.eta == 0.32
        assert config.fit_window_hz == (60e3, 180e3)
        assert config.bound('g_x_hz') == (0.0, math.inf)

    def test_dict_round_trip(self):
        record = {
            'fixed': {**FIXED, 'eta': 0.3},
            'fit_window_hz': [70e3, 170e3],
            'exclusion_bands_hz': [[99e3, 101e3]],
            'bounds': {'g_x_hz': [1e3, None]},
            'max_iter': 50,
        }
        config = FitConfig.from_dict(record)
        assert config.bound('g_x_hz') == (1e3, math.inf)
        assert FitConfig.from_dict(config.to_dict()) == config

    @pytest.mark.parametrize('record', [
        {'fixed': FIXED, 'window': [1, 2]},
        {'fit_window_hz': [1, 2]},
        {'fixed': {'kappa_hz': 57e3}},
        {'fixed': {**FIXED, 'omega_x_hz': 1.0}},
        {'fixed': FIXED, 'fit_window_hz': [2e3, 1e3]},
        {'fixed': FIXED, 'bounds': {'g_x_hz': [-1.0, 2.0]}},
        {'fixed': FIXED, 'bounds': {'g_x_hz': [1.0, 2.0]}, 'free_initial': {'g_x_hz': 5.0}},
        {'fixed': FIXED, 'max_iter': 0},
        {'fixed': FIXED, 'tol': -1e-6},
    ])
    def test_bad_records(self, record):
        with pytest.raises(SchemaError):
            FitConfig.from_dict(record)

    def test_for_params_takes_fixed_block(self, params_0v):
        config = FitConfig.for_params(params_0v)
        assert config.fixed['kappa_hz'] == pytest.approx(57e3)
        assert config.build_params(free_values(params_0v)).omega_x == pytest.approx(params_0v.omega_x)

    def test_build_params_needs_every_free_key(self):
        with pytest.raises(SchemaError):
            FitConfig.from_dict({'fixed': FIXED}).build_params({'omega_x_hz': 1e5})


class TestObjective:

    def test_window_and_exclusions_are_inclusive(self):
        config = FitConfig.from_dict({'fixed': FIXED, 'fit_window_hz': [10, 20],
                                      'exclusion_bands_hz': [[14, 16]]})
        freq = np.arange(8, 23)
        assert list(freq[included_mask(freq, config)]) == [10, 11, 12, 13, 17, 18, 19, 20]

    def test_empty_window(self, params_0v):
        config = FitConfig.for_params(params_0v, fit_window_hz=(500e3, 600e3))
        data = synthetic(params_0v)
        with pytest.raises(EmptyWindowError):
            residuals(params_0v, data.freq_hz, data.psd, config)

    def test_objective_vanishes_at_truth(self, params_0v):
        config = FitConfig.for_params(params_0v)
        data = synthetic(params_0v)
        assert objective(free_values(params_0v), data, config) == pytest.approx(0.0, abs=1e-20)


    def test_objective_ignores_bin_order(self, params_0v):
        config = FitConfig.for_params(params_0v)
        data = synthetic(params_0v)
        trial = perturbed(free_values(params_0v))
        order = np.random.default_rng(8).permutation(len(data))
        r = residuals(config.build_params(trial), data.freq_hz[order], data.psd[order], config)
        assert float(np.dot(r, r)) == pytest.approx(objective(trial, data, config), rel=1e-12)

    def test_constant_offset_adds_its_square_per_bin(self, params_0v):
        config = FitConfig.for_params(params_0v)
        data = synthetic(params_0v)
        offset = SpectrumData(data.freq_hz, data.psd + 0.01)
        n_bins = int(np.count_nonzero(included_mask(data.freq_hz, config)))
        assert n_bins == 1201
        assert objective(free_values(params_0v), offset, config) == pytest.approx(n_bins * 1e-4, rel=1e-9)

class TestSpectrumFitter:

    def test_recovers_noiseless_parameters(self, params_0v):
        truth = free_values(params_0v)
        config = FitConfig.for_params(params_0v, free_initial=perturbed(truth))
        result = fit(synthetic(params_0v), config)
        assert result.status is FitStatus.CONVERGED
        for key in FREE_KEYS:
            assert result.values_hz[key] == pytest.approx(truth[key], rel=1e-4), key
        assert result.rss < 1e-8
        assert result.n_bins == 1201
        assert result.other_sideband_rss < 1e-6

    def test_efficiency_systematic(self, params_0v):
        truth = free_values(params_0v)
        config = FitConfig.for_params(params_0v, free_initial=perturbed(truth))
        data = synthetic(params_0v)
        result = fit(data, config)

        five = systematic_eta(data, config, result)
        ten = systematic_eta(data, config, result, relative=0.10)
        for key in ('Gamma_x_hz', 'Gamma_y_hz'):
            fraction = five.half_range_hz[key] / result.values_hz[key]
            assert 0.01 < fraction < 0.08
            assert 1.7 < ten.half_range_hz[key] / five.half_range_hz[key] < 2.3
        assert five.low.params.eta == pytest.approx(0.32 * 0.95)
        assert five.high.params.eta == pytest.approx(0.32 * 1.05)

    def test_group_fit_aggregates_acquisitions(self, params_0v):
        truth = free_values(params_0v)
        shifted = params_0v.with_changes(Gamma_x=1.02 * params_0v.Gamma_x)
        config = FitConfig.for_params(params_0v, free_initial=perturbed(truth, 0.01, 0.1, 0.1))
        group = [synthetic(params_0v, acquisition_id='a'), synthetic(shifted, acquisition_id='b')]
        result = SpectrumFitter(config, threads=2).fit(group)

        assert len(result.acquisitions) == 2
        assert result.acquisition_id == 'a+b'
        gammas = [a.values_hz['Gamma_x_hz'] for a in result.acquisitions]
        assert result.values_hz['Gamma_x_hz'] == pytest.approx(np.mean(gammas))
        assert result.stat_hz['Gamma_x_hz'] == pytest.approx(abs(gammas[1] - gammas[0]) / math.sqrt(2))
        assert result.stat_hz['Gamma_x_hz'] == pytest.approx(0.02 * 4030 / math.sqrt(2), rel=1e-2)
        assert set(result.to_frame().columns) == {'parameter', 'value', 'stat', 'syst'}

    def test_noisy_acquisitions_average_to_truth(self, params_0v):
        truth = free_values(params_0v)
        rng = np.random.default_rng(12)
        clean = synthetic(params_0v)
        group = [
            SpectrumData(clean.freq_hz, clean.psd * (1 + 0.01 * rng.standard_normal(len(clean))),
                         acquisition_id=f'acq{i}')
            for i in range(5)
        ]
        config = FitConfig.for_params(params_0v, free_initial=perturbed(truth, 0.01, 0.1, 0.1))
        result = SpectrumFitter(config).fit(group)

        assert len(result.acquisitions) == 5
        for key in FREE_KEYS:
            assert result.values_hz[key] == pytest.approx(truth[key], rel=0.02), key
            assert result.stat_hz[key] > 0, key

    def test_swapping_modes_swaps_the_fit(self, params_0v):
        swapped_params = params_0v.swapped()
        truth = free_values(params_0v)
        initial = perturbed(truth, 0.01, 0.1, 0.1)
        swapped_initial = {
            'omega_x_hz': initial['omega_y_hz'], 'omega_y_hz': initial['omega_x_hz'],
            'g_x_hz': initial['g_y_hz'], 'g_y_hz': initial['g_x_hz'],
            'Gamma_x_hz': initial['Gamma_y_hz'], 'Gamma_y_hz': initial['Gamma_x_hz'],
        }
        direct = fit(synthetic(params_0v), FitConfig.for_params(params_0v, free_initial=initial, tol=1e-12))
        mirrored = fit(synthetic(swapped_params),
                       FitConfig.for_params(swapped_params, free_initial=swapped_initial, tol=1e-12))

        for key in ('omega', 'g', 'Gamma'):
            assert mirrored.values_hz[f'{key}_x_hz'] == pytest.approx(direct.values_hz[f'{key}_y_hz'], rel=1e-8)
            assert mirrored.values_hz[f'{key}_y_hz'] == pytest.approx(direct.values_hz[f'{key}_x_hz'], rel=1e-8)

    def test_peak_finding_guesses(self, params_0v):
        weak = params_0v.with_changes(g_x=TWO_PI * 3e3, g_y=TWO_PI * 3e3)
        truth = free_values(weak)
        config = FitConfig.for_params(weak)
        guesses = initial_guesses(synthetic(weak, step=50.0), config)
        for key in ('omega_x_hz', 'omega_y_hz'):
            assert guesses[key] == pytest.approx(truth[key], rel=0.03), key
        for key in ('g_x_hz', 'g_y_hz', 'Gamma_x_hz', 'Gamma_y_hz'):
            assert truth[key] / 3 < guesses[key] < 3 * truth[key], key

    def test_zero_signal_ends_at_coupling_bound(self, params_0v):
        freq = np.arange(-200e3, 200e3 + 50, 100.0)
        data = SpectrumData(freq, np.zeros_like(freq))
        result = fit(data, FitConfig.for_params(params_0v))
        assert result.status is FitStatus.AT_BOUND
        assert result.values_hz['g_x_hz'] == 0.0
        assert result.values_hz['g_y_hz'] == 0.0
        assert result.rss == 0.0

    def test_too_few_bins(self, params_0v):
        config = FitConfig.for_params(params_0v, fit_window_hz=(100e3, 102e3))
        with pytest.raises(ValidationError):
            fit(synthetic(params_0v), config)

    def test_unnormalized_data_rejected(self, params_0v):
        data = synthetic(params_0v)
        data.shot_normalized = False
        with pytest.raises(ValidationError):
            fit(data, FitConfig.for_params(params_0v))

    def test_unstable_initial_guess(self, params_0v):
        blue = FitConfig.from_dict({
            'fixed': {'kappa_hz': 57e3, 'detuning_hz': 111e3},
            'free_initial': free_values(params_0v),
        })
        with pytest.raises(InstabilityError):
            fit(synthetic(params_0v), blue)

    def test_result_record(self, params_0v):
        truth = free_values(params_0v)
        config = FitConfig.for_params(params_0v, free_initial=truth)
        record = fit(synthetic(params_0v), config).to_dict()
        assert record['status'] == 'converged'
        assert set(record['values_hz']) == set(FREE_KEYS)
        assert record['acquisitions'] == []
