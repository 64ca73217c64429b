"""
Welch PSD estimation
Hann-windowed averaged periodogram normalized so that the PSD integrates
to the signal variance.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd
from scipy import signal as sp_signal

from ..core import ShapeError, ValidationError


logger = logging.getLogger(__name__)

DEFAULT_SEGMENT_FRACTION = 8    # default segment length is 1/8 of the record


@dataclass
class WelchEstimate:
    """
    Averaged periodogram

    psd is in signal units² per Hz. For a two-sided estimate the frequencies
    run from −fs/2 upwards in increasing order.
    """
    freq_hz: np.ndarray
    psd: np.ndarray
    one_sided: bool
    n_segments: int
    sample_rate: float

    @property
    def resolution_hz(self) -> float:
        return float(self.freq_hz[1] - self.freq_hz[0])

    def integrated_power(self) -> float:
        """Σ PSD·df, the variance estimate"""
        return float(np.sum(self.psd) * self.resolution_hz)

    def band_power(self, f_low: float, f_high: float) -> float:
        mask = (self.freq_hz >= f_low) & (self.freq_hz <= f_high)
        return float(np.sum(self.psd[mask]) * self.resolution_hz)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({'freq_hz': self.freq_hz, 'psd': self.psd})


def welch_psd(samples: np.ndarray, dt: float,
              segment_length: Optional[int] = None,
              overlap: float = 0.5,
              one_sided: bool = True) -> WelchEstimate:
    """
    Welch estimate of a real signal, averaged over rows for a 2-D input

    Args:
        samples: 1-D signal, or 2-D array with one trajectory per row
        dt: Sampling interval (s)
        segment_length: Samples per segment; defaults to an eighth of the record
        overlap: Fractional segment overlap in [0, 1)
        one_sided: Fold negative frequencies onto positive ones

    Returns:
        WelchEstimate

    Raises:
        ShapeError: If the signal is not 1-D or 2-D, or shorter than a segment
        ValidationError: On a bad overlap or sampling interval
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim not in (1, 2):
        raise ShapeError(f"signal must be 1-D or 2-D, got shape {samples.shape}")
    if not dt > 0:
        raise ValidationError(f"sampling interval must be > 0, got {dt}")
    if not 0 <= overlap < 1:
        raise ValidationError(f"overlap must lie in [0, 1), got {overlap}")

    n_samples = samples.shape[-1]
    if segment_length is None:
        segment_length = max(n_samples // DEFAULT_SEGMENT_FRACTION, 2)
    if not 2 <= segment_length <= n_samples:
        raise ShapeError(f"segment_length {segment_length} must lie in [2, {n_samples}]")

    noverlap = int(overlap * segment_length)
    fs = 1.0 / dt
    freq, psd = sp_signal.welch(
        samples,
        fs=fs,
        window='hann',
        nperseg=segment_length,
        noverlap=noverlap,
        detrend='constant',
        return_onesided=one_sided,
        scaling='density',
        axis=-1,
    )
    if psd.ndim == 2:
        psd = psd.mean(axis=0)
    if not one_sided:
        freq = np.fft.fftshift(freq)
        psd = np.fft.fftshift(psd)

    rows = 1 if samples.ndim == 1 else samples.shape[0]
    per_row = 1 + (n_samples - segment_length) // (segment_length - noverlap)
    logger.debug("Welch estimate: %d segments of %d samples per row, %d row(s)", per_row, segment_length, rows)

    return WelchEstimate(
        freq_hz=freq,
        psd=psd,
        one_sided=one_sided,
        n_segments=per_row * rows,
        sample_rate=fs,
    )
