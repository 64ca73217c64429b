"""
Gaussian-state information measures
Occupancies, purity, symplectic invariants, quantum discord, ground-state
probability and rotated-frame analysis of the 4x4 mechanical covariance V^M.
Covariances are in vacuum units (vacuum = identity); logarithms are natural,
so entropies and discords are in nats.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Tuple, Union

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy.optimize import minimize_scalar

from ..core import (
    SystemParams,
    ShapeError,
    ValidationError,
    NotPositiveDefiniteError,
    UnphysicalStateError,
    ComplexEigenvalueError,
    DiscordConditionError,
    DegenerateDiscordError,
    DegenerateSplittingError,
)


logger = logging.getLogger(__name__)

PHYSICALITY_TOL = 1e-9
EIGENVALUE_TOL = 1e-12
FLAT_LANDSCAPE_TOL = 1e-6

ANGLE_GRID_STEP = np.deg2rad(0.5)
ANGLE_REFINE_TOL = np.deg2rad(0.01)


class Mode(Enum):
    X = "x"
    Y = "y"


class DiscordDirection(Enum):
    """Which subsystem is measured: X_FROM_Y measures Y to learn about X"""
    X_FROM_Y = "X_from_Y"
    Y_FROM_X = "Y_from_X"


@dataclass(frozen=True)
class SymplecticData:
    """Symplectic invariants and eigenvalues of a two-mode covariance matrix"""
    I1: float
    I2: float
    I3: float
    I4: float
    d_plus: float
    d_minus: float
    physical: bool

    @property
    def invariants(self) -> Tuple[float, float, float, float]:
        return (self.I1, self.I2, self.I3, self.I4)


@dataclass(frozen=True)
class AngleMaximum:
    """Result of the rotated-frame discord maximization"""
    phi: float
    value: float
    flat: bool

    @property
    def phi_deg(self) -> float:
        return float(np.rad2deg(self.phi))


def _check_covariance(Vm: np.ndarray) -> np.ndarray:
    Vm = np.asarray(Vm, dtype=float)
    if Vm.shape != (4, 4):
        raise ShapeError(f"expected a 4x4 mechanical covariance, got {Vm.shape}")
    return Vm


def _require_positive_definite(Vm: np.ndarray) -> None:
    try:
        np.linalg.cholesky(Vm)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefiniteError("covariance matrix is not positive definite") from e


# ===================
# SINGLE-MODE AND GLOBAL MEASURES
# ===================

def occupancy(Vm: np.ndarray, mode: Union[Mode, str]) -> float:
    """
    Thermal occupancy of one mode seen as a one-dimensional oscillator

    (2n + 1) = √(⟨q²⟩⟨p²⟩); the raw value is returned even when slightly negative.
    """
    Vm = _check_covariance(Vm)
    mode = Mode(mode)
    i = 0 if mode is Mode.X else 2
    n = (np.sqrt(Vm[i, i] * Vm[i + 1, i + 1]) - 1) / 2
    if n < -PHYSICALITY_TOL:
        logger.warning("unphysical occupancy n_%s = %.3e", mode.value, n)
    return float(n)


def purity(Vm: np.ndarray) -> Tuple[float, float]:
    """
    State purity μ = 1/√det(V^M) and the product of single-mode purities

    Returns:
        (purity, purity_independent) where purity_independent = 1/((2n_x+1)(2n_y+1))

    Raises:
        NotPositiveDefiniteError: If V^M is not positive definite
    """
    Vm = _check_covariance(Vm)
    _require_positive_definite(Vm)
    mu = 1.0 / np.sqrt(np.linalg.det(Vm))
    n_x = occupancy(Vm, Mode.X)
    n_y = occupancy(Vm, Mode.Y)
    independent = 1.0 / ((2 * n_x + 1) * (2 * n_y + 1))
    return float(mu), float(independent)


def symplectic_data(Vm: np.ndarray) -> SymplecticData:
    """
    Block determinants and symplectic eigenvalues

    With V^M = [[α, γ], [γᵀ, β]]: I1 = det α, I2 = det β, I3 = det γ,
    I4 = det V^M and d±² = (Δ ± √(Δ² − 4 I4))/2 where Δ = I1 + I2 + 2 I3.

    Raises:
        ComplexEigenvalueError: If the eigenvalues come out complex
    """
    Vm = _check_covariance(Vm)
    I1 = float(np.linalg.det(Vm[:2, :2]))
    I2 = float(np.linalg.det(Vm[2:, 2:]))
    I3 = float(np.linalg.det(Vm[:2, 2:]))
    I4 = float(np.linalg.det(Vm))

    seralian = I1 + I2 + 2 * I3
    discriminant = seralian ** 2 - 4 * I4
    if discriminant < -EIGENVALUE_TOL:
        raise ComplexEigenvalueError(
            f"symplectic eigenvalues are complex (discriminant {discriminant:.3e})")
    root = np.sqrt(max(discriminant, 0.0))
    d_plus_sq = (seralian + root) / 2
    d_minus_sq = (seralian - root) / 2
    if d_minus_sq < -EIGENVALUE_TOL:
        raise ComplexEigenvalueError(
            f"smallest symplectic eigenvalue is imaginary (d-^2 = {d_minus_sq:.3e})")

    d_plus = float(np.sqrt(d_plus_sq))
    d_minus = float(np.sqrt(max(d_minus_sq, 0.0)))
    physical = (I1 >= 1 - PHYSICALITY_TOL and I2 >= 1 - PHYSICALITY_TOL
                and d_minus >= 1 - PHYSICALITY_TOL)
    return SymplecticData(I1, I2, I3, I4, d_plus, d_minus, physical)


def entropy_function(x: float) -> float:
    """
    f(x) = ((x+1)/2) ln((x+1)/2) − ((x−1)/2) ln((x−1)/2), with f(1) = 0

    Raises:
        UnphysicalStateError: If x < 1 beyond tolerance
    """
    if x < 1 - PHYSICALITY_TOL:
        raise UnphysicalStateError(f"entropy argument {x:.12g} is below 1")
    if x <= 1:
        return 0.0
    upper = (x + 1) / 2
    lower = (x - 1) / 2
    return float(upper * np.log(upper) - lower * np.log(lower))


def mutual_information(Vm: np.ndarray) -> float:
    """Total mutual information between X and Y, in nats"""
    data = symplectic_data(Vm)
    return (entropy_function(np.sqrt(data.I1)) + entropy_function(np.sqrt(data.I2))
            - entropy_function(data.d_plus) - entropy_function(data.d_minus))


def discord_condition(I1: float, I2: float, I3: float, I4: float) -> bool:
    """Applicability of the closed form: (I4 − I1 I2)² ≤ (1 + I2) I3² (I1 + I4)"""
    lhs = (I4 - I1 * I2) ** 2
    rhs = (1 + I2) * I3 ** 2 * (I1 + I4)
    return lhs <= rhs * (1 + 1e-12) + 1e-15


def discord(Vm: np.ndarray, direction: Union[DiscordDirection, str] = DiscordDirection.X_FROM_Y) -> float:
    """
    Gaussian quantum discord 𝒟 = f(√I2) − f(d+) − f(d−) + f(E)

    E = (|I3| + √(I3² + (I2 − 1)(I4 − I1))) / (I2 − 1). The Y_FROM_X
    direction swaps I1 and I2.

    Args:
        Vm: 4x4 mechanical covariance
        direction: Measurement direction

    Returns:
        Discord in nats

    Raises:
        DegenerateDiscordError: If the measured subsystem has I2 <= 1 within tolerance
        DiscordConditionError: If the closed form does not apply to this state
    """
    direction = DiscordDirection(direction)
    Vm = _check_covariance(Vm)
    data = symplectic_data(Vm)
    I1, I2, I3, I4 = data.invariants
    alpha, beta, gamma = Vm[:2, :2], Vm[2:, 2:], Vm[:2, 2:]
    if direction is DiscordDirection.Y_FROM_X:
        I1, I2 = I2, I1
        alpha, beta, gamma = beta, alpha, gamma.T

    if I2 <= 1 + PHYSICALITY_TOL:
        raise DegenerateDiscordError(
            f"measured subsystem is pure (I2 = {I2:.12g}); closed-form discord undefined")
    if not discord_condition(I1, I2, I3, I4):
        raise DiscordConditionError(
            "closed-form Gaussian discord not applicable: (I4 - I1 I2)^2 > (1 + I2) I3^2 (I1 + I4); "
            "the general-case optimization is required for this state")

    # I4 - I1 through the Schur complement of the unmeasured block; exact for product states
    try:
        schur = beta - gamma.T @ np.linalg.solve(alpha, gamma)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefiniteError("singular block of the covariance matrix") from e
    excess = I1 * (np.linalg.det(schur) - 1)
    radicand = max(I3 ** 2 + (I2 - 1) * excess, 0.0)
    E = (abs(I3) + np.sqrt(radicand)) / (I2 - 1)
    value = (entropy_function(np.sqrt(I2)) - entropy_function(data.d_plus)
             - entropy_function(data.d_minus) + entropy_function(E))
    if value < -PHYSICALITY_TOL:
        logger.warning("negative discord %.3e for direction %s", value, direction.value)
    elif value < 0:
        value = 0.0
    return float(value)


def ground_state_probability(Vm: np.ndarray) -> float:
    """
    Probability of the two-dimensional ground state, P(0,0) = 4/√det(V^M + I)

    Raises:
        NotPositiveDefiniteError: If V^M is not positive definite
    """
    Vm = _check_covariance(Vm)
    _require_positive_definite(Vm)
    return float(4.0 / np.sqrt(np.linalg.det(Vm + np.eye(4))))


def ground_state_probability_quadrature(Vm: np.ndarray, n_nodes: int = 24) -> Tuple[float, float]:
    """
    P(0,0) = ∫ W(R) g(R) d⁴R by tensor Gauss-Hermite quadrature

    W(R) = exp(−½ R V⁻¹ Rᵀ) / ((2π)² √det V) is the Wigner function and
    g(R) = 4 exp(−½ R Rᵀ) the ground-state projector. Substituting R = √2 t
    turns exp(−½ R Rᵀ) into the Hermite weight.

    Args:
        Vm: 4x4 mechanical covariance
        n_nodes: Nodes per dimension

    Returns:
        (value, error estimate from a coarser rule with n_nodes - 6 nodes)
    """
    Vm = _check_covariance(Vm)
    _require_positive_definite(Vm)
    inverse = np.linalg.inv(Vm)
    prefactor = 16.0 / ((2 * np.pi) ** 2 * np.sqrt(np.linalg.det(Vm)))

    def rule(n: int) -> float:
        nodes, weights = hermgauss(n)
        grid = np.stack(np.meshgrid(nodes, nodes, nodes, nodes, indexing='ij'), axis=-1).reshape(-1, 4)
        w = np.einsum('i,j,k,l->ijkl', weights, weights, weights, weights).reshape(-1)
        exponent = np.einsum('ni,ij,nj->n', grid, inverse, grid)
        return float(prefactor * np.sum(w * np.exp(-exponent)))

    value = rule(n_nodes)
    coarse = rule(max(n_nodes - 6, 2))
    return value, abs(value - coarse)


# ===================
# ROTATED FRAMES
# ===================

def rotation_matrix(phi: float) -> np.ndarray:
    """
    Passive rotation of the reference frame by φ about Z

    Acts jointly on the position pair (x, y) and the momentum pair (p_x, p_y)
    in the (x, p_x, y, p_y) ordering.
    """
    c, s = np.cos(phi), np.sin(phi)
    R = np.zeros((4, 4))
    for offset in (0, 1):
        R[offset, offset] = c
        R[offset, offset + 2] = s
        R[offset + 2, offset] = -s
        R[offset + 2, offset + 2] = c
    return R


def normalization_matrix(Omega_x: float, Omega_y: float) -> np.ndarray:
    """N = Diag[1/√Ω_x, √Ω_x, 1/√Ω_y, √Ω_y]"""
    if Omega_x <= 0 or Omega_y <= 0:
        raise ValidationError(f"frequencies must be > 0, got {Omega_x}, {Omega_y}")
    return np.diag([1 / np.sqrt(Omega_x), np.sqrt(Omega_x), 1 / np.sqrt(Omega_y), np.sqrt(Omega_y)])


def rotate_frame(Vm: np.ndarray, Omega_x: float, Omega_y: float, phi: float) -> np.ndarray:
    """
    Covariance in a reference frame rotated by φ: V_φ = R(φ) N V^M N Rᵀ(φ)

    N removes the per-mode zero-point normalization so that X and Y
    coordinates can be mixed.
    """
    Vm = _check_covariance(Vm)
    N = normalization_matrix(Omega_x, Omega_y)
    R = rotation_matrix(phi)
    return R @ N @ Vm @ N @ R.T


def max_discord_over_angle(Vm: np.ndarray, Omega_x: float, Omega_y: float,
                           direction: Union[DiscordDirection, str] = DiscordDirection.Y_FROM_X) -> AngleMaximum:
    """
    Maximize the discord between the rotated directions φ and φ + π/2

    Grid search over [−π/2, π/2) at 0.5° resolution, then golden-section
    refinement to 0.01° around the best grid angle. Angles where the closed
    form does not apply are skipped.

    Args:
        Vm: 4x4 mechanical covariance
        Omega_x, Omega_y: Mode frequencies used in the normalization matrix
        direction: Measurement direction in the rotated frame

    Returns:
        AngleMaximum with φ in [−π/2, π/2)

    Raises:
        DegenerateDiscordError: If the measured mode is pure at every angle
        DiscordConditionError: If no angle admits the closed form
    """
    direction = DiscordDirection(direction)

    failures = set()

    def value_at(phi: float) -> float:
        try:
            return discord(rotate_frame(Vm, Omega_x, Omega_y, phi), direction)
        except (DiscordConditionError, DegenerateDiscordError) as e:
            failures.add(type(e))
            return np.nan

    grid = np.arange(-np.pi / 2, np.pi / 2, ANGLE_GRID_STEP)
    values = np.array([value_at(phi) for phi in grid])
    if np.all(np.isnan(values)):
        if failures == {DegenerateDiscordError}:
            raise DegenerateDiscordError("measured subsystem is pure at every frame angle")
        raise DiscordConditionError("closed-form discord inapplicable at every frame angle")

    best = int(np.nanargmax(values))
    spread = np.nanmax(values) - np.nanmin(values)
    if spread < FLAT_LANDSCAPE_TOL:
        logger.warning("flat discord landscape (variation %.3e over all angles)", spread)
        return AngleMaximum(phi=float(grid[best]), value=float(values[best]), flat=True)

    phi_best, value_best = grid[best], values[best]
    bracket = (phi_best - ANGLE_GRID_STEP, phi_best, phi_best + ANGLE_GRID_STEP)

    def objective(phi: float) -> float:
        value = value_at(phi)
        return np.inf if np.isnan(value) else -value

    try:
        refined = minimize_scalar(objective, bracket=bracket, method='golden',
                                  options={'xtol': ANGLE_REFINE_TOL / (abs(phi_best) + ANGLE_GRID_STEP)})
        if np.isfinite(refined.fun) and -refined.fun >= value_best:
            phi_best, value_best = float(refined.x), float(-refined.fun)
    except ValueError:
        logger.debug("golden-section bracket rejected at φ = %.4f rad; keeping grid maximum", phi_best)

    phi_best = (phi_best + np.pi / 2) % np.pi - np.pi / 2
    return AngleMaximum(phi=float(phi_best), value=float(value_best), flat=False)


def overlap_parameter(params: SystemParams) -> float:
    """
    Spectral overlap s = 2(g_x² + g_y²) / (κ|δ|), δ = Ω_x − Ω_y

    Raises:
        DegenerateSplittingError: If Ω_x = Ω_y
    """
    splitting = params.omega_x - params.omega_y
    if splitting == 0:
        raise DegenerateSplittingError("overlap parameter undefined for Ω_x = Ω_y")
    return float(2 * (params.g_x ** 2 + params.g_y ** 2) / (params.kappa * abs(splitting)))
