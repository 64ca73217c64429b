"""Stochastic simulation of the Langevin system and spectral estimation"""

from .sim_config import SimConfig

from .langevin import (
    Trajectory,
    Ensemble,
    CovarianceEstimate,
    LangevinIntegrator,
    trajectory_generator,
    integrate,
    covariance_estimate,
    sample_covariance,
    bright_mode_signal,
)

from .welch import (
    WelchEstimate,
    welch_psd,
)

__all__ = [
    'SimConfig',
    'Trajectory',
    'Ensemble',
    'CovarianceEstimate',
    'LangevinIntegrator',
    'trajectory_generator',
    'integrate',
    'covariance_estimate',
    'sample_covariance',
    'bright_mode_signal',
    'WelchEstimate',
    'welch_psd',
]
