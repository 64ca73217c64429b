"""
Heterodyne Spectrum
Closed-form heterodyne spectrum with its Γx / Γy / quantum-noise decomposition,
plus an independent frequency-domain transfer-matrix evaluation.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Tuple, Union

import numpy as np
import pandas as pd

from ..core import (
    SystemParams,
    TWO_PI,
    GridSpecError,
    InstabilityError,
    SingularResponseError,
    chi_mech,
    chi_cav,
    chi_cav_minus,
    bright_mode_params,
)
from .steady_state import build_drift, check_stability


logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

SPECTRUM_COLUMNS = ['freq_hz', 'total', 'term_gx', 'term_gy', 'term_quantum']


@dataclass
class SpectrumDecomposition:
    """
    Model PSD on a frequency grid, split into its three noise contributions.

    Terms are shot-noise-normalized; total is their sum, plus 1 unless
    shot_subtracted is set.
    """
    freq_grid: np.ndarray          # rad/s, relative to the local oscillator
    term_gamma_x: np.ndarray
    term_gamma_y: np.ndarray
    term_quantum: np.ndarray
    total: np.ndarray
    shot_subtracted: bool

    @property
    def freq_hz(self) -> np.ndarray:
        return self.freq_grid / TWO_PI

    @property
    def signal(self) -> np.ndarray:
        """Shot-noise-subtracted total"""
        return self.total if self.shot_subtracted else self.total - 1.0

    def lo_referenced_freq_hz(self, params: SystemParams) -> np.ndarray:
        """Alternative abscissa (Ω_LO − ω)/2π"""
        return (params.omega_lo - self.freq_grid) / TWO_PI

    def to_frame(self) -> pd.DataFrame:
        """DataFrame with the CSV export columns"""
        return pd.DataFrame({
            'freq_hz': self.freq_hz,
            'total': self.total,
            'term_gx': self.term_gamma_x,
            'term_gy': self.term_gamma_y,
            'term_quantum': self.term_quantum,
        }, columns=SPECTRUM_COLUMNS)


@dataclass(frozen=True)
class SidebandLabels:
    """Which sign of ω carries the Stokes and the anti-Stokes sideband"""
    stokes_sign: int
    anti_stokes_sign: int

    def label(self, omega: float) -> str:
        return 'Stokes' if np.sign(omega) == self.stokes_sign else 'anti-Stokes'


def _scalar_or_array(value):
    return value if np.ndim(value) else np.asarray(value)[()]


# ===================
# CLOSED FORM
# ===================

def weighted_bright_psd(omega: ArrayLike, params: SystemParams,
                        symmetrized: bool = False) -> Tuple[np.ndarray, Tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """
    Bright-mode displacement spectrum multiplied by g_b²

    The g_b² prefactor is fused in, so the uncoupled case evaluates to zero
    instead of 0/0.

    Args:
        omega: Angular frequency relative to the local oscillator (rad/s)
        params: System parameters
        symmetrized: Replace the vacuum correlator by its symmetrized form,
            i.e. the spectrum a classical-noise model of the cavity input produces

    Returns:
        (total, (term_gamma_x, term_gamma_y, term_quantum))
    """
    omega = np.asarray(omega, dtype=float)
    chi_x = chi_mech(omega, params.omega_x, params.gamma_x)
    chi_y = chi_mech(omega, params.omega_y, params.gamma_y)
    coupled = params.g_x ** 2 * chi_x + params.g_y ** 2 * chi_y

    denominator = np.abs(1 - 2j * chi_cav_minus(omega, params) * coupled) ** 2

    term_x = 4 * params.g_x ** 2 * params.Gamma_x * np.abs(chi_x) ** 2 / denominator
    term_y = 4 * params.g_y ** 2 * params.Gamma_y * np.abs(chi_y) ** 2 / denominator

    if symmetrized:
        vacuum = 0.5 * (np.abs(chi_cav(omega, params)) ** 2 + np.abs(chi_cav(-omega, params)) ** 2)
    else:
        vacuum = np.abs(chi_cav(-omega, params)) ** 2
    term_q = 4 * np.abs(coupled) ** 2 * params.kappa * vacuum / denominator

    total = term_x + term_y + term_q
    parts = (_scalar_or_array(term_x), _scalar_or_array(term_y), _scalar_or_array(term_q))
    return _scalar_or_array(total), parts


def symmetrized_bright_psd(omega: ArrayLike, params: SystemParams) -> np.ndarray:
    """
    Symmetrized bright-mode spectrum S_xbxb(ω), per unit angular bandwidth / 2π

    This is what a classical stochastic simulation of the Langevin system
    reproduces for x_b = (g_x x + g_y y) / g_b.
    """
    _, g_b = bright_mode_params(params)
    total, _ = weighted_bright_psd(omega, params, symmetrized=True)
    return total / g_b ** 2


def heterodyne_decomposition(omega: ArrayLike, params: SystemParams,
                             shot_subtracted: bool = False,
                             include_quantum: bool = True,
                             mirrored: bool = False) -> SpectrumDecomposition:
    """
    Heterodyne spectrum S_out(Ω_LO + ω) = 1 + ηκ|χ_c(ω)|² g_b² S_xbxb(ω), term by term

    Args:
        omega: Angular frequencies relative to the local oscillator (rad/s)
        params: System parameters
        shot_subtracted: Drop the shot-noise floor of 1
        include_quantum: Keep the quantum-noise term; False gives the
            classical-only prediction
        mirrored: Evaluate the displacement spectrum at −ω, the signal a
            classically dominated oscillator would produce

    Returns:
        SpectrumDecomposition on the given grid
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    bright_arg = -omega if mirrored else omega
    _, (term_x, term_y, term_q) = weighted_bright_psd(bright_arg, params)

    filtering = params.eta * params.kappa * np.abs(chi_cav(omega, params)) ** 2
    term_x = filtering * term_x
    term_y = filtering * term_y
    term_q = filtering * term_q if include_quantum else np.zeros_like(omega)

    total = term_x + term_y + term_q
    if not shot_subtracted:
        total = 1.0 + total

    return SpectrumDecomposition(
        freq_grid=omega,
        term_gamma_x=term_x,
        term_gamma_y=term_y,
        term_quantum=term_q,
        total=total,
        shot_subtracted=shot_subtracted,
    )


def heterodyne_psd(omega: ArrayLike, params: SystemParams,
                   shot_subtracted: bool = False,
                   include_quantum: bool = True,
                   mirrored: bool = False) -> np.ndarray:
    """Heterodyne output spectrum normalized to shot noise (see heterodyne_decomposition)"""
    scalar = np.ndim(omega) == 0
    decomposition = heterodyne_decomposition(
        omega, params,
        shot_subtracted=shot_subtracted,
        include_quantum=include_quantum,
        mirrored=mirrored,
    )
    return decomposition.total[0] if scalar else decomposition.total


# ===================
# TRANSFER-MATRIX ORACLE
# ===================

def noise_input_matrix(params: SystemParams) -> np.ndarray:
    """
    6x4 map from noise inputs (a_in, a_in†, ξ_x, ξ_y) to the quadrature equations
    """
    root_kappa = np.sqrt(params.kappa)
    B = np.zeros((6, 4), dtype=complex)
    B[0, 0] = root_kappa
    B[0, 1] = root_kappa
    B[1, 0] = -1j * root_kappa
    B[1, 1] = 1j * root_kappa
    B[3, 2] = 2 * np.sqrt(params.Gamma_x)
    B[5, 3] = 2 * np.sqrt(params.Gamma_y)
    return B


def transfer_matrix_psd(omega: ArrayLike, params: SystemParams) -> np.ndarray:
    """
    Heterodyne spectrum from the 6x6 frequency response M(ω) = (−iωI − A)⁻¹

    The output field a_out = √κ a − a_in is expanded on the noise inputs with
    normally ordered vacuum correlators (⟨a_in a_in†⟩ = 1, ⟨a_in† a_in⟩ = 0)
    and unit white mechanical noise.

    Args:
        omega: Angular frequencies relative to the local oscillator (rad/s)
        params: System parameters with a stable drift matrix

    Returns:
        Shot-noise-normalized spectrum, same quantity as heterodyne_psd

    Raises:
        InstabilityError: If the drift matrix is not stable
        SingularResponseError: If −iω is an eigenvalue of A
    """
    scalar = np.ndim(omega) == 0
    omega = np.atleast_1d(np.asarray(omega, dtype=float))

    A = build_drift(params)
    stability = check_stability(A)
    if not stability.stable:
        raise InstabilityError(
            f"transfer-matrix spectrum requires a stable drift matrix "
            f"(spectral abscissa {stability.spectral_abscissa:.6g} rad/s)",
            spectral_abscissa=stability.spectral_abscissa,
        )

    B = noise_input_matrix(params)
    system = -1j * omega[:, None, None] * np.eye(6)[None, :, :] - A[None, :, :]
    try:
        response = np.linalg.solve(system, np.broadcast_to(B, (omega.size, 6, 4)))
    except np.linalg.LinAlgError as e:
        raise SingularResponseError("frequency response matrix is singular") from e

    # a = (Q + iP)/2
    readout = np.array([0.5, 0.5j, 0, 0, 0, 0])
    coefficients = np.sqrt(params.kappa) * np.einsum('i,nij->nj', readout, response)
    coefficients[:, 0] -= 1.0

    # the a_in† coefficient multiplies ⟨a_in† a_in⟩ = 0
    antinormal = (np.abs(coefficients[:, 0]) ** 2
                  + np.abs(coefficients[:, 2]) ** 2
                  + np.abs(coefficients[:, 3]) ** 2)
    spectrum = 1.0 + params.eta * (antinormal - 1.0)
    return spectrum[0] if scalar else spectrum


# ===================
# GRIDS AND SIDEBANDS
# ===================

def spectrum_grid(params: SystemParams, f_min: float, f_max: float, n_points: int,
                  shot_subtracted: bool = False,
                  include_quantum: bool = True,
                  mirrored: bool = False) -> SpectrumDecomposition:
    """
    Evaluate the decomposed heterodyne spectrum on a uniform grid

    Args:
        params: System parameters
        f_min: First grid frequency relative to the local oscillator (Hz)
        f_max: Last grid frequency (Hz)
        n_points: Number of grid points, >= 2

    Returns:
        SpectrumDecomposition

    Raises:
        GridSpecError: If the grid is ill-specified
    """
    if not (np.isfinite(f_min) and np.isfinite(f_max)):
        raise GridSpecError(f"grid limits must be finite, got [{f_min}, {f_max}]")
    if not f_min < f_max:
        raise GridSpecError(f"f_min must be below f_max, got [{f_min}, {f_max}]")
    if isinstance(n_points, bool) or int(n_points) != n_points or n_points < 2:
        raise GridSpecError(f"n_points must be an integer >= 2, got {n_points}")

    freq_hz = np.linspace(f_min, f_max, int(n_points))
    logger.debug("evaluating spectrum on %d points in [%g, %g] Hz", n_points, f_min, f_max)
    return heterodyne_decomposition(
        TWO_PI * freq_hz, params,
        shot_subtracted=shot_subtracted,
        include_quantum=include_quantum,
        mirrored=mirrored,
    )


def sideband_labels(params: SystemParams) -> SidebandLabels:
    """
    Locate the Stokes sideband, i.e. the side where the quantum term dominates

    The quantum term carries |χ_c(−ω)|², which peaks at ω = Δ; for red
    detuning this is the negative-frequency side.
    """
    stokes = -1 if params.detuning <= 0 else 1
    return SidebandLabels(stokes_sign=stokes, anti_stokes_sign=-stokes)


def sideband_peaks(decomposition: SpectrumDecomposition,
                   params: SystemParams) -> Dict[str, Tuple[float, float]]:
    """
    Peak position (Hz) and shot-subtracted height of each sideband

    Returns:
        {'Stokes': (freq_hz, height), 'anti-Stokes': (freq_hz, height)};
        a side with no grid points is omitted
    """
    labels = sideband_labels(params)
    signal = decomposition.signal
    freq_hz = decomposition.freq_hz
    peaks = {}
    for name, sign in (('Stokes', labels.stokes_sign), ('anti-Stokes', labels.anti_stokes_sign)):
        side = np.sign(freq_hz) == sign
        if not np.any(side):
            continue
        idx = np.flatnonzero(side)[np.argmax(signal[side])]
        peaks[name] = (float(freq_hz[idx]), float(signal[idx]))
    return peaks
