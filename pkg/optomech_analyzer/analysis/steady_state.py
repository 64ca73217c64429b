"""
Steady State
Drift and diffusion matrices of the linearized Langevin system and the
Lyapunov solve for the 6x6 steady-state covariance.
Basis ordering is u = (Q, P, x, p_x, y, p_y).
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict

import numpy as np

from ..core import (
    SystemParams,
    InstabilityError,
    NotPositiveDefiniteError,
    ShapeError,
)
from ..utils import symmetrize


logger = logging.getLogger(__name__)

BASIS = ('Q', 'P', 'x', 'px', 'y', 'py')
MECHANICAL_BASIS = BASIS[2:]

STABILITY_MARGIN = 1e-6         # rad/s
LYAPUNOV_RESIDUAL_TOL = 1e-10


class StabilityStatus(Enum):
    """Classification of the drift matrix spectrum"""
    STABLE = "stable"
    MARGINAL = "marginal"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class StabilityReport:
    """Result of check_stability"""
    stable: bool
    spectral_abscissa: float
    status: StabilityStatus

    def __bool__(self) -> bool:
        return self.stable


def build_drift(params: SystemParams) -> np.ndarray:
    """
    Drift matrix A of du/dt = A u + noise

    Args:
        params: System parameters

    Returns:
        6x6 real matrix; entries not listed below are zero
    """
    A = np.zeros((6, 6))
    A[0, 0] = -params.kappa / 2
    A[0, 1] = -params.detuning
    A[1, 0] = params.detuning
    A[1, 1] = -params.kappa / 2
    A[1, 2] = 2 * params.g_x
    A[1, 4] = 2 * params.g_y
    A[2, 3] = params.omega_x
    A[3, 0] = 2 * params.g_x
    A[3, 2] = -params.omega_x
    A[3, 3] = -params.gamma_x
    A[4, 5] = params.omega_y
    A[5, 0] = 2 * params.g_y
    A[5, 4] = -params.omega_y
    A[5, 5] = -params.gamma_y
    return A


def build_diffusion(params: SystemParams) -> np.ndarray:
    """Diffusion matrix D = Diag[κ, κ, 0, 4Γ_x, 0, 4Γ_y]"""
    return np.diag([
        params.kappa, params.kappa, 0.0,
        4 * params.Gamma_x, 0.0, 4 * params.Gamma_y,
    ])


def check_stability(A: np.ndarray, margin: float = STABILITY_MARGIN) -> StabilityReport:
    """
    Classify the drift matrix by its spectral abscissa

    Args:
        A: Drift matrix
        margin: Width of the marginal band around zero (rad/s)

    Returns:
        StabilityReport; stable only when the abscissa is below -margin
    """
    abscissa = float(np.max(np.linalg.eigvals(A).real))
    if abscissa < -margin:
        status = StabilityStatus.STABLE
    elif abscissa <= margin:
        status = StabilityStatus.MARGINAL
    else:
        status = StabilityStatus.UNSTABLE
    return StabilityReport(
        stable=status is StabilityStatus.STABLE,
        spectral_abscissa=abscissa,
        status=status,
    )


def lyapunov_residual(A: np.ndarray, D: np.ndarray, V: np.ndarray) -> float:
    """Relative residual max|AV + VAᵀ + D| / max|D|"""
    residual = np.max(np.abs(A @ V + V @ A.T + D))
    scale = np.max(np.abs(D))
    return float(residual / scale) if scale > 0 else float(residual)


def solve_lyapunov(A: np.ndarray, D: np.ndarray) -> np.ndarray:
    """
    Solve AV + VAᵀ = −D by vectorization

    Uses vec(AV + VAᵀ) = (I ⊗ A + A ⊗ I) vec(V) with column-major vec,
    then symmetrizes the result.

    Args:
        A: Stable n x n drift matrix
        D: n x n diffusion matrix

    Returns:
        Symmetric covariance matrix V

    Raises:
        InstabilityError: If A is not stable
        ShapeError: If A and D are not square and of equal size
    """
    A = np.asarray(A, dtype=float)
    D = np.asarray(D, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n) or D.shape != (n, n):
        raise ShapeError(f"A and D must be square and equal-sized, got {A.shape} and {D.shape}")

    stability = check_stability(A)
    if not stability.stable:
        raise InstabilityError(
            f"drift matrix is {stability.status.value} "
            f"(spectral abscissa {stability.spectral_abscissa:.6g} rad/s); no steady state",
            spectral_abscissa=stability.spectral_abscissa,
        )

    eye = np.eye(n)
    operator = np.kron(eye, A) + np.kron(A, eye)
    vec_v = np.linalg.solve(operator, -D.reshape(-1, order='F'))
    V = vec_v.reshape((n, n), order='F')
    V = symmetrize(V)

    residual = lyapunov_residual(A, D, V)
    if residual > LYAPUNOV_RESIDUAL_TOL:
        logger.warning("Lyapunov solve ill-conditioned: relative residual %.3e exceeds %.0e",
                       residual, LYAPUNOV_RESIDUAL_TOL)
    return V


def mechanical_block(V: np.ndarray) -> np.ndarray:
    """4x4 mechanical block V^M: rows/columns (x, p_x, y, p_y) of V"""
    V = np.asarray(V)
    if V.shape != (6, 6):
        raise ShapeError(f"expected a 6x6 covariance matrix, got {V.shape}")
    return V[2:, 2:].copy()


@dataclass
class SteadyState:
    """Drift, diffusion and steady-state covariance of one configuration"""
    params: SystemParams
    drift: np.ndarray
    diffusion: np.ndarray
    covariance: np.ndarray
    stability: StabilityReport
    residual: float

    @property
    def mechanical(self) -> np.ndarray:
        return mechanical_block(self.covariance)

    def to_dict(self) -> Dict:
        """JSON-ready record with row-major nested arrays"""
        return {
            'basis': list(BASIS),
            'V': self.covariance.tolist(),
            'mechanical_basis': list(MECHANICAL_BASIS),
            'V_M': self.mechanical.tolist(),
            'spectral_abscissa': self.stability.spectral_abscissa,
            'stability': self.stability.status.value,
            'lyapunov_residual': self.residual,
        }


def compute_steady_state(params: SystemParams) -> SteadyState:
    """
    Build A and D, solve the Lyapunov equation and check positivity

    Raises:
        InstabilityError: If the drift matrix is not stable
        NotPositiveDefiniteError: If the covariance fails a Cholesky factorization
    """
    A = build_drift(params)
    D = build_diffusion(params)
    stability = check_stability(A)
    V = solve_lyapunov(A, D)
    try:
        np.linalg.cholesky(V)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefiniteError("steady-state covariance is not positive definite") from e

    state = SteadyState(
        params=params,
        drift=A,
        diffusion=D,
        covariance=V,
        stability=stability,
        residual=lyapunov_residual(A, D, V),
    )
    logger.debug("steady state solved: abscissa %.4g rad/s, residual %.3e",
                 stability.spectral_abscissa, state.residual)
    return state


def spectral_abscissa(params: SystemParams) -> float:
    """Largest real part of the drift-matrix eigenvalues"""
    return check_stability(build_drift(params)).spectral_abscissa
