"""Shared fixtures"""

import json

import numpy as np
import pandas as pd
import pytest

from optomech_analyzer.core import SystemParams, PRESETS, TWO_PI
from optomech_analyzer.analysis import heterodyne_psd, spectral_abscissa


# V^M of the 0 V data set as printed, two decimals
PRINTED_VM_0V = np.array([
    [2.13, 0.00, -0.32, -0.59],
    [0.00, 2.07, 0.52, -0.34],
    [-0.32, 0.52, 2.47, 0.00],
    [-0.59, -0.34, 0.00, 2.48],
])

# same matrix recomputed to four decimals
VM_0V = np.array([
    [2.1341, 0.0, -0.3211, -0.5865],
    [0.0, 2.0683, 0.5250, -0.3357],
    [-0.3211, 0.5250, 2.4672, 0.0],
    [-0.5865, -0.3357, 0.0, 2.4840],
])


@pytest.fixture
def params_0v() -> SystemParams:
    return PRESETS['dataset_0V']


@pytest.fixture
def uncoupled_params() -> SystemParams:
    """No optomechanical coupling; mechanical variances are exactly 1"""
    return SystemParams(
        omega_x=TWO_PI * 200, omega_y=TWO_PI * 160,
        g_x=0.0, g_y=0.0,
        Gamma_x=500.0, Gamma_y=500.0,
        kappa=TWO_PI * 500, detuning=-TWO_PI * 500,
        gamma_x=1e3, gamma_y=1e3,
    )


@pytest.fixture
def slow_system() -> SystemParams:
    """Six-dimensional system with rates of order one, in rad/s"""
    return SystemParams(
        omega_x=5.0, omega_y=4.0,
        g_x=0.5, g_y=0.4,
        Gamma_x=0.5, Gamma_y=0.5,
        kappa=4.0, detuning=-4.5,
        gamma_x=2.0, gamma_y=2.0,
        eta=1.0,
    )


def write_psd_csv(path, freq_hz, psd):
    pd.DataFrame({'freq_hz': freq_hz, 'psd': psd}).to_csv(path, index=False, float_format='%.17g')
    return path


def synthetic_spectrum_csv(path, params: SystemParams, f_min=-200e3, f_max=200e3, step=100.0):
    freq = np.arange(f_min, f_max + step / 2, step)
    psd = heterodyne_psd(TWO_PI * freq, params, shot_subtracted=True)
    return write_psd_csv(path, freq, psd)


def write_json_file(path, record):
    with open(path, 'w') as f:
        json.dump(record, f)
    return path




def random_stable_params(seed: int, count: int, vary_eta: bool = False):
    """Stable parameter sets scattered around the 0 V data set"""
    rng = np.random.default_rng(seed)
    base = PRESETS['dataset_0V']
    draws = []
    while len(draws) < count:
        changes = dict(
            omega_x=base.omega_x * rng.uniform(0.95, 1.05),
            omega_y=base.omega_y * rng.uniform(0.95, 1.05),
            g_x=base.g_x * rng.uniform(0.8, 1.2),
            g_y=base.g_y * rng.uniform(0.8, 1.2),
            Gamma_x=base.Gamma_x * rng.uniform(0.8, 1.2),
            Gamma_y=base.Gamma_y * rng.uniform(0.8, 1.2),
            kappa=base.kappa * rng.uniform(0.9, 1.1),
            detuning=base.detuning * rng.uniform(0.9, 1.1),
        )
        if vary_eta:
            changes['eta'] = rng.uniform(0.1, 1.0)
        params = base.with_changes(**changes)
        if spectral_abscissa(params) < -1e-6:
            draws.append(params)
    return draws
