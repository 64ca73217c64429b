"""Least-squares fitting of the heterodyne model to measured spectra"""

from .fit_config import (
    FREE_KEYS,
    FIXED_KEYS,
    DEFAULT_FIT_WINDOW_HZ,
    FitConfig,
    free_values,
)

from .spectrum_fitter import (
    MIN_INCLUDED_BINS,
    ETA_RELATIVE_UNCERTAINTY,
    FitStatus,
    FitResult,
    EtaSystematic,
    SpectrumFitter,
    included_mask,
    model_psd,
    residuals,
    objective,
    initial_guesses,
    fit,
    systematic_eta,
)

__all__ = [
    'FREE_KEYS',
    'FIXED_KEYS',
    'DEFAULT_FIT_WINDOW_HZ',
    'FitConfig',
    'free_values',
    'MIN_INCLUDED_BINS',
    'ETA_RELATIVE_UNCERTAINTY',
    'FitStatus',
    'FitResult',
    'EtaSystematic',
    'SpectrumFitter',
    'included_mask',
    'model_psd',
    'residuals',
    'objective',
    'initial_guesses',
    'fit',
    'systematic_eta',
]
