"""
Optomechanical State Analyzer
Two-dimensional levitated-particle cavity optomechanics: heterodyne spectra,
Gaussian steady states and their quantum correlations, spectrum fitting,
stochastic simulation and parameter sweeps
"""

__version__ = '0.1.0'

from .core import SystemParams, get_preset, PRESETS
from .ingestion import SpectrumData, load_psd, load_params
from .analysis import (
    compute_steady_state,
    heterodyne_psd,
    transfer_matrix_psd,
    StateMetricsCalculator,
    characterize,
)
from .fitting import FitConfig, SpectrumFitter
from .simulation import SimConfig, integrate, sample_covariance, welch_psd
from .sweep import grid_sweep, overlap_sweep

__all__ = [
    'SystemParams',
    'get_preset',
    'PRESETS',
    'SpectrumData',
    'load_psd',
    'load_params',
    'compute_steady_state',
    'heterodyne_psd',
    'transfer_matrix_psd',
    'StateMetricsCalculator',
    'characterize',
    'FitConfig',
    'SpectrumFitter',
    'SimConfig',
    'integrate',
    'sample_covariance',
    'welch_psd',
    'grid_sweep',
    'overlap_sweep',
]
