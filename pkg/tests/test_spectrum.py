import numpy as np
import pytest
from scipy.integrate import trapezoid

from optomech_analyzer.core import SystemParams, TWO_PI, GridSpecError, InstabilityError
from optomech_analyzer.analysis import (
    SPECTRUM_COLUMNS,
    compute_steady_state,
    weighted_bright_psd,
    symmetrized_bright_psd,
    heterodyne_decomposition,
    heterodyne_psd,
    transfer_matrix_psd,
    spectrum_grid,
    sideband_labels,
    sideband_peaks,
)
from optomech_analyzer.core import bright_mode_params

from conftest import random_stable_params


@pytest.fixture
def grid_0v(params_0v):
    return spectrum_grid(params_0v, -200e3, 200e3, 40001, shot_subtracted=True)


class TestClosedForm:

    def test_sideband_peaks_of_0v_data_set(self, params_0v, grid_0v):
        peaks = sideband_peaks(grid_0v, params_0v)
        freq, height = peaks['anti-Stokes']
        assert freq == pytest.approx(112.0e3, abs=500)
        assert height == pytest.approx(0.7728, rel=0.02)
        freq, height = peaks['Stokes']
        assert freq == pytest.approx(-124.5e3, abs=500)
        assert height == pytest.approx(0.03051, rel=0.02)

    def test_stokes_sideband_is_quantum_dominated(self, params_0v, grid_0v):
        freq, _ = sideband_peaks(grid_0v, params_0v)['Stokes']
        omega = TWO_PI * freq
        full = heterodyne_psd(omega, params_0v, shot_subtracted=True)
        classical = heterodyne_psd(omega, params_0v, shot_subtracted=True, include_quantum=False)
        mirrored = heterodyne_psd(omega, params_0v, shot_subtracted=True, mirrored=True)
        assert full / classical == pytest.approx(4.27, rel=0.03)
        assert full / mirrored == pytest.approx(4.04, rel=0.03)

    def test_quantum_term_asymmetry(self, params_0v):
        # only |χ_c(−ω)|² breaks the ±ω symmetry of the quantum term
        delta = abs(params_0v.detuning)
        _, (_, _, q_stokes) = weighted_bright_psd(-delta, params_0v)
        _, (_, _, q_anti) = weighted_bright_psd(delta, params_0v)
        expected = 1 + 16 * params_0v.detuning ** 2 / params_0v.kappa ** 2
        assert q_stokes / q_anti == pytest.approx(expected, rel=1e-9)
        assert q_stokes / q_anti == pytest.approx(61.68, rel=1e-3)

    def test_decoherence_terms_are_even(self, params_0v):
        omega = TWO_PI * np.linspace(20e3, 180e3, 50)
        _, (x_pos, y_pos, _) = weighted_bright_psd(omega, params_0v)
        _, (x_neg, y_neg, _) = weighted_bright_psd(-omega, params_0v)
        assert np.allclose(x_pos, x_neg, rtol=1e-10)
        assert np.allclose(y_pos, y_neg, rtol=1e-10)

    def test_shot_noise_floor(self, params_0v):
        omega = TWO_PI * np.linspace(-150e3, 150e3, 31)
        with_floor = heterodyne_psd(omega, params_0v)
        without = heterodyne_psd(omega, params_0v, shot_subtracted=True)
        assert np.allclose(with_floor - without, 1.0)

    def test_signal_scales_with_efficiency(self, params_0v):
        omega = TWO_PI * np.linspace(-150e3, 150e3, 31)
        base = heterodyne_psd(omega, params_0v, shot_subtracted=True)
        doubled = heterodyne_psd(omega, params_0v.with_changes(eta=0.64), shot_subtracted=True)
        assert np.allclose(doubled, 2 * base)

    def test_terms_add_up(self, params_0v):
        decomposition = heterodyne_decomposition(TWO_PI * np.linspace(-150e3, 150e3, 31), params_0v)
        parts = decomposition.term_gamma_x + decomposition.term_gamma_y + decomposition.term_quantum
        assert np.allclose(decomposition.total, 1.0 + parts)
        assert np.allclose(decomposition.signal, parts)

    def test_classical_only_drops_quantum_term(self, params_0v):
        decomposition = heterodyne_decomposition(TWO_PI * np.linspace(-150e3, 150e3, 31), params_0v,
                                                 include_quantum=False)
        assert np.all(decomposition.term_quantum == 0)

    def test_uncoupled_system_shows_shot_noise_only(self, uncoupled_params):
        omega = TWO_PI * np.linspace(-1e3, 1e3, 11)
        assert np.allclose(heterodyne_psd(omega, uncoupled_params), 1.0)

    def test_scalar_input(self, params_0v):
        value = heterodyne_psd(TWO_PI * 112e3, params_0v)
        assert np.ndim(value) == 0

    def test_symmetrized_spectrum_integrates_to_variance(self, params_0v):
        # ∫ S dω/2π equals the steady-state variance of x_b
        omega = TWO_PI * np.linspace(-2e6, 2e6, 400001)
        spectrum = symmetrized_bright_psd(omega, params_0v)
        variance = trapezoid(spectrum, omega) / TWO_PI

        V = compute_steady_state(params_0v).covariance
        _, g_b = bright_mode_params(params_0v)
        weights = np.array([params_0v.g_x, params_0v.g_y]) / g_b
        expected = weights @ V[np.ix_([2, 4], [2, 4])] @ weights
        assert variance == pytest.approx(expected, rel=1e-3)


class TestTransferMatrix:

    @pytest.mark.parametrize('preset', ['dataset_0V', 'dataset_35V'])
    def test_agrees_with_closed_form(self, preset):
        from optomech_analyzer.core import get_preset
        params = get_preset(preset)
        omega = TWO_PI * np.linspace(-190e3, 190e3, 77)
        assert np.allclose(transfer_matrix_psd(omega, params), heterodyne_psd(omega, params), rtol=1e-6)

    def test_agrees_with_closed_form_over_random_parameters(self):
        rng = np.random.default_rng(2024)
        # without gas damping the input-output relation of the closed form is exact
        for params in random_stable_params(seed=17, count=50, vary_eta=True):
            params = params.with_changes(gamma_x=0.0, gamma_y=0.0)
            omega = TWO_PI * rng.uniform(-300e3, 300e3, 1000)
            closed = heterodyne_psd(omega, params)
            oracle = transfer_matrix_psd(omega, params)
            assert np.max(np.abs(oracle / closed - 1)) < 1e-9

    def test_requires_stable_system(self, params_0v):
        with pytest.raises(InstabilityError):
            transfer_matrix_psd(0.0, params_0v.with_changes(detuning=TWO_PI * 111e3))


class TestGrid:

    def test_frame_columns(self, params_0v):
        frame = spectrum_grid(params_0v, -1e3, 1e3, 5).to_frame()
        assert list(frame.columns) == SPECTRUM_COLUMNS
        assert np.allclose(frame['freq_hz'], [-1e3, -500, 0, 500, 1e3])

    @pytest.mark.parametrize('f_min, f_max, n_points', [
        (1e3, -1e3, 10),
        (0.0, 0.0, 10),
        (-1e3, 1e3, 1),
        (-np.inf, 1e3, 10),
    ])
    def test_bad_grid(self, params_0v, f_min, f_max, n_points):
        with pytest.raises(GridSpecError):
            spectrum_grid(params_0v, f_min, f_max, n_points)

    def test_sideband_labels_follow_detuning(self, params_0v):
        assert sideband_labels(params_0v).stokes_sign == -1
        blue = params_0v.with_changes(detuning=-params_0v.detuning)
        assert sideband_labels(blue).stokes_sign == 1

    def test_lo_referenced_axis(self, params_0v):
        decomposition = spectrum_grid(params_0v, -1e3, 1e3, 3)
        assert np.allclose(decomposition.lo_referenced_freq_hz(params_0v), [901e3, 900e3, 899e3])


def test_uncoupled_bright_spectrum_is_zero():
    params = SystemParams(omega_x=10.0, omega_y=8.0, g_x=0.0, g_y=0.0,
                          Gamma_x=1.0, Gamma_y=1.0, kappa=5.0, detuning=-9.0)
    total, _ = weighted_bright_psd(np.linspace(-20, 20, 9), params)
    assert np.all(total == 0)
