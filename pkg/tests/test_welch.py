import numpy as np
import pytest

from optomech_analyzer.core import ShapeError, ValidationError
from optomech_analyzer.simulation import welch_psd


@pytest.fixture
def white_noise():
    rng = np.random.default_rng(2024)
    return rng.standard_normal((16, 8192))


class TestWelchPSD:

    def test_one_sided_white_noise_level(self, white_noise):
        estimate = welch_psd(white_noise, dt=0.01, segment_length=512)
        interior = (estimate.freq_hz > 1.0) & (estimate.freq_hz < 49.0)
        assert np.mean(estimate.psd[interior]) == pytest.approx(0.02, rel=0.02)
        assert estimate.one_sided
        assert estimate.freq_hz[0] == 0.0

    def test_two_sided_white_noise_level(self, white_noise):
        estimate = welch_psd(white_noise, dt=0.01, segment_length=512, one_sided=False)
        assert np.all(np.diff(estimate.freq_hz) > 0)
        assert estimate.freq_hz[0] == pytest.approx(-50.0)
        interior = np.abs(estimate.freq_hz) > 1.0
        assert np.mean(estimate.psd[interior]) == pytest.approx(0.01, rel=0.02)

    @pytest.mark.parametrize('one_sided', [True, False])
    def test_integrates_to_variance(self, white_noise, one_sided):
        estimate = welch_psd(white_noise, dt=0.01, segment_length=512, one_sided=one_sided)
        assert estimate.integrated_power() == pytest.approx(1.0, rel=0.03)

    def test_sine_power_lands_in_its_band(self):
        dt = 1e-3
        t = dt * np.arange(20000)
        tone = np.sqrt(2) * np.sin(2 * np.pi * 50.0 * t)
        estimate = welch_psd(tone, dt, segment_length=2000)
        assert estimate.band_power(45.0, 55.0) == pytest.approx(1.0, rel=0.02)
        assert estimate.freq_hz[np.argmax(estimate.psd)] == pytest.approx(50.0)

    def test_segment_bookkeeping(self, white_noise):
        estimate = welch_psd(white_noise, dt=0.01, segment_length=1024, overlap=0.5)
        assert estimate.n_segments == 16 * 15
        assert estimate.sample_rate == pytest.approx(100.0)
        assert estimate.resolution_hz == pytest.approx(100.0 / 1024)

    def test_default_segment_is_an_eighth(self, white_noise):
        estimate = welch_psd(white_noise[0], dt=0.01)
        assert estimate.resolution_hz == pytest.approx(100.0 / 1024)

    def test_frame(self, white_noise):
        frame = welch_psd(white_noise[0], dt=0.01).to_frame()
        assert list(frame.columns) == ['freq_hz', 'psd']

    def test_three_dimensional_input(self):
        with pytest.raises(ShapeError):
            welch_psd(np.zeros((2, 2, 64)), dt=1.0)

    def test_segment_longer_than_signal(self):
        with pytest.raises(ShapeError):
            welch_psd(np.zeros(64), dt=1.0, segment_length=128)

    @pytest.mark.parametrize('overlap', [1.0, -0.1])
    def test_bad_overlap(self, overlap):
        with pytest.raises(ValidationError):
            welch_psd(np.zeros(64), dt=1.0, segment_length=16, overlap=overlap)

    def test_bad_sampling_interval(self):
        with pytest.raises(ValidationError):
            welch_psd(np.zeros(64), dt=0.0)
