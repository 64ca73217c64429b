"""
Optical and mechanical susceptibilities
Response functions shared by the spectrum, steady-state and fitting layers.
All functions accept scalars or numpy arrays of angular frequency (rad/s).
"""

import numpy as np
from typing import Tuple, Union

from .system_params import SystemParams
from .errors import PoleError, DegenerateCouplingError, UndefinedAngleError


ArrayLike = Union[float, np.ndarray]


def _scalar_or_array(value: np.ndarray):
    return value if np.ndim(value) else np.asarray(value)[()]


def chi_mech(omega: ArrayLike, Omega_j: float, gamma_j: float) -> np.ndarray:
    """
    Mechanical susceptibility χ_j(ω) = Ω_j / (Ω_j² − ω² − iγ_jω)

    Args:
        omega: Angular frequency (rad/s)
        Omega_j: Mechanical angular frequency (rad/s), > 0
        gamma_j: Damping rate (1/s), >= 0

    Returns:
        Complex response, same shape as omega

    Raises:
        PoleError: If gamma_j = 0 and |omega| = Omega_j
    """
    omega = np.asarray(omega, dtype=float)
    if gamma_j == 0 and np.any(np.abs(omega) == Omega_j):
        raise PoleError(f"undamped mechanical susceptibility evaluated at its pole ω = ±{Omega_j}")
    return _scalar_or_array(Omega_j / (Omega_j ** 2 - omega ** 2 - 1j * gamma_j * omega))


def chi_cav(omega: ArrayLike, params: SystemParams) -> np.ndarray:
    """Optical susceptibility χ_c(ω) = 1 / (−i(Δ + ω) + κ/2)"""
    omega = np.asarray(omega, dtype=float)
    return _scalar_or_array(1.0 / (-1j * (params.detuning + omega) + params.kappa / 2))


def chi_cav_minus(omega: ArrayLike, params: SystemParams) -> np.ndarray:
    """χ_c⁻(ω) = χ_c(ω) − conj(χ_c(−ω))"""
    omega = np.asarray(omega, dtype=float)
    return _scalar_or_array(chi_cav(omega, params) - np.conj(chi_cav(-omega, params)))


def bright_mode_params(params: SystemParams) -> Tuple[float, float]:
    """
    Frequency and coupling of the mode along the cavity axis

    Returns:
        (Omega_b, g_b) in rad/s

    Raises:
        DegenerateCouplingError: If g_x = g_y = 0
    """
    wx = params.g_x ** 2
    wy = params.g_y ** 2
    if wx + wy == 0:
        raise DegenerateCouplingError("bright mode undefined: g_x = g_y = 0")

    first = wx * params.omega_x + wy * params.omega_y
    third = wx * params.omega_x ** 3 + wy * params.omega_y ** 3
    omega_b = np.sqrt(third / first)
    g_b = np.sqrt(first / omega_b)
    return float(omega_b), float(g_b)


def polarization_angle(params: SystemParams) -> float:
    """
    Angle θ between the Y axis and the cavity axis, tan θ = g_x / g_y

    Raises:
        UndefinedAngleError: If g_y = 0
    """
    if params.g_y == 0:
        raise UndefinedAngleError("polarization angle undefined for g_y = 0")
    return float(np.arctan(params.g_x / params.g_y))
