"""
Langevin Integrator
Euler-Maruyama ensemble integration of du = A u dt + B dW with a
classical-symmetrized noise model, B Bᵀ = D diagonal.

Every trajectory owns a counter-based random stream derived from
(seed, trajectory index), and the drift is evaluated elementwise, so an
ensemble is bit-identical for any number of worker threads.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core import (
    SystemParams,
    ValidationError,
    ShapeError,
    InstabilityError,
    SimulationDivergenceError,
    InsufficientSamplesError,
    bright_mode_params,
)
from ..analysis import build_drift, build_diffusion, check_stability
from ..utils import symmetrize
from .sim_config import SimConfig


logger = logging.getLogger(__name__)

RESOLUTION_LIMIT = 0.05         # dt times the fastest rate
BURN_IN_RELAXATION_TIMES = 10
DIVERGENCE_LIMIT = 1e9
MIN_COVARIANCE_SAMPLES = 10_000
NOISE_CHUNK = 1024              # steps of noise drawn per call


def trajectory_generator(seed: int, index: int) -> np.random.Generator:
    """Independent Philox stream of one trajectory"""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


@dataclass
class Trajectory:
    """Recorded states of one trajectory in the (Q, P, x, px, y, py) basis"""
    times: np.ndarray
    states: np.ndarray

    def __len__(self) -> int:
        return self.times.size


@dataclass
class Ensemble:
    """
    Recorded states of all trajectories

    states has shape (n_trajectories, n_records, 6); times are the record
    instants, excluding t = 0.
    """
    times: np.ndarray
    states: np.ndarray
    config: SimConfig

    @property
    def n_trajectories(self) -> int:
        return self.states.shape[0]

    def trajectory(self, index: int) -> Trajectory:
        return Trajectory(times=self.times, states=self.states[index])

    def after(self, burn_in: float) -> np.ndarray:
        """States recorded at t >= burn_in"""
        return self.states[:, self.times >= burn_in, :]


@dataclass
class CovarianceEstimate:
    """Ensemble covariance with its standard error across trajectories"""
    covariance: np.ndarray
    stderr: np.ndarray
    n_samples: int


class LangevinIntegrator:
    """
    Integrates a linear SDE with diagonal diffusion
    """

    def __init__(self, drift: np.ndarray, diffusion: np.ndarray, config: SimConfig,
                 rate_scale: Optional[float] = None):
        """
        Initialize integrator

        Args:
            drift: Stable n x n drift matrix A
            diffusion: Diagonal n x n diffusion matrix D
            config: Simulation settings
            rate_scale: Fastest rate of the system (rad/s) for the resolution
                guard; defaults to the spectral radius of A

        Raises:
            ShapeError: On inconsistent or non-diagonal matrices
            InstabilityError: If A is not stable
            ValidationError: If a time-step or burn-in guard fails
        """
        drift = np.asarray(drift, dtype=float)
        diffusion = np.asarray(diffusion, dtype=float)
        n = drift.shape[0]
        if drift.shape != (n, n) or diffusion.shape != (n, n):
            raise ShapeError(f"drift and diffusion must be square and equal-sized, got "
                             f"{drift.shape} and {diffusion.shape}")
        if np.any(diffusion != np.diag(np.diag(diffusion))) or np.any(np.diag(diffusion) < 0):
            raise ShapeError("diffusion matrix must be diagonal with nonnegative entries")

        self.drift = drift
        self.config = config
        self.noise_amplitude = np.sqrt(np.diag(diffusion) * config.dt)
        self.noisy = np.flatnonzero(self.noise_amplitude > 0)
        self.rows: List[List[Tuple[int, float]]] = [
            [(j, drift[i, j]) for j in range(n) if drift[i, j] != 0.0] for i in range(n)
        ]

        if rate_scale is None:
            rate_scale = float(np.max(np.abs(np.linalg.eigvals(drift))))
        self._check_guards(rate_scale)

    # ===================
    # GUARDS
    # ===================

    def _check_guards(self, rate_scale: float) -> None:
        config = self.config
        if config.dt * rate_scale >= RESOLUTION_LIMIT:
            raise ValidationError(
                f"time step too coarse: dt·rate = {config.dt * rate_scale:.3g} must stay below {RESOLUTION_LIMIT}")

        stability = check_stability(self.drift)
        if not stability.stable:
            raise InstabilityError(
                f"cannot simulate: drift matrix is {stability.status.value} "
                f"(spectral abscissa {stability.spectral_abscissa:.6g} rad/s)",
                spectral_abscissa=stability.spectral_abscissa,
            )

        required = BURN_IN_RELAXATION_TIMES / abs(stability.spectral_abscissa)
        if config.burn_in < required * (1 - 1e-9):
            raise ValidationError(
                f"burn_in {config.burn_in:.6g} s is shorter than {BURN_IN_RELAXATION_TIMES} "
                f"relaxation times ({required:.6g} s)")

        n = self.drift.shape[0]
        radius = float(np.max(np.abs(np.linalg.eigvals(np.eye(n) + config.dt * self.drift))))
        if radius >= 1.0:
            raise ValidationError(f"Euler-Maruyama update is unstable (spectral radius {radius:.12g})")

    # ===================
    # INTEGRATION
    # ===================

    def run(self, threads: int = 1) -> Ensemble:
        """
        Integrate all trajectories from u(0) = 0

        Args:
            threads: Worker threads; trajectories are split into contiguous
                batches and merged in index order

        Raises:
            SimulationDivergenceError: If a state exceeds the divergence limit
        """
        config = self.config
        threads = max(1, min(int(threads), config.n_trajectories))
        batches = [b.tolist() for b in np.array_split(np.arange(config.n_trajectories), threads)]

        logger.info("integrating %d trajectories of %d steps (dt = %g s) on %d thread(s)",
                    config.n_trajectories, config.n_steps, config.dt, threads)
        if threads == 1:
            parts = [self._integrate_batch(batches[0])]
        else:
            with ThreadPoolExecutor(max_workers=threads) as executor:
                parts = list(executor.map(self._integrate_batch, batches))

        n_records = config.n_steps // config.record_stride
        times = config.record_interval * np.arange(1, n_records + 1)
        return Ensemble(times=times, states=np.concatenate(parts, axis=0), config=config)

    def _integrate_batch(self, indices: Sequence[int]) -> np.ndarray:
        config = self.config
        n = self.drift.shape[0]
        count = len(indices)
        generators = [trajectory_generator(config.seed, i) for i in indices]

        n_records = config.n_steps // config.record_stride
        out = np.empty((count, n_records, n))
        u = np.zeros((n, count))
        dt = config.dt
        amplitude = self.noise_amplitude

        step = 0
        record = 0
        while step < config.n_steps:
            chunk = min(NOISE_CHUNK, config.n_steps - step)
            if self.noisy.size:
                # (chunk, n_noisy, count), each column from its own stream
                noise = np.stack([g.standard_normal((chunk, self.noisy.size)) for g in generators], axis=-1)

            for k in range(chunk):
                increment = []
                for i, row in enumerate(self.rows):
                    acc = np.zeros(count)
                    for j, a in row:
                        acc = acc + a * u[j]
                    increment.append(acc * dt)
                for i in range(n):
                    u[i] = u[i] + increment[i]
                for slot, i in enumerate(self.noisy):
                    u[i] = u[i] + amplitude[i] * noise[k, slot]

                step += 1
                if step % config.record_stride == 0:
                    out[:, record, :] = u.T
                    record += 1

            if not np.all(np.isfinite(u)) or np.max(np.abs(u)) > DIVERGENCE_LIMIT:
                raise SimulationDivergenceError(
                    f"state magnitude exceeded {DIVERGENCE_LIMIT:g} at t = {step * dt:.6g} s")
        return out


def integrate(params: SystemParams, config: SimConfig, threads: int = 1) -> Ensemble:
    """
    Simulate the linearized Langevin system of a parameter set

    The resolution guard uses the fastest of Ω_x, Ω_y, κ and |Δ|.
    """
    rate_scale = max(params.omega_x, params.omega_y, params.kappa, abs(params.detuning))
    integrator = LangevinIntegrator(build_drift(params), build_diffusion(params), config, rate_scale)
    return integrator.run(threads)


# ===================
# ENSEMBLE STATISTICS
# ===================

def covariance_estimate(ensemble: Ensemble, burn_in: Optional[float] = None) -> CovarianceEstimate:
    """
    Time-and-ensemble averaged second moments after burn-in

    Raises:
        InsufficientSamplesError: Below MIN_COVARIANCE_SAMPLES samples
    """
    burn_in = ensemble.config.burn_in if burn_in is None else burn_in
    samples = ensemble.after(burn_in)
    n_traj, n_time, n = samples.shape
    n_samples = n_traj * n_time
    if n_samples < MIN_COVARIANCE_SAMPLES:
        raise InsufficientSamplesError(
            f"{n_samples} samples after burn-in, need at least {MIN_COVARIANCE_SAMPLES}")

    per_trajectory = np.einsum('kti,ktj->kij', samples, samples) / n_time
    per_trajectory = 0.5 * (per_trajectory + np.transpose(per_trajectory, (0, 2, 1)))
    covariance = per_trajectory.mean(axis=0)
    covariance = symmetrize(covariance)

    if n_traj > 1:
        stderr = per_trajectory.std(axis=0, ddof=1) / np.sqrt(n_traj)
    else:
        stderr = np.full((n, n), np.nan)
        logger.warning("single trajectory: no standard error available")
    return CovarianceEstimate(covariance=covariance, stderr=stderr, n_samples=n_samples)


def sample_covariance(ensemble: Ensemble, burn_in: Optional[float] = None) -> np.ndarray:
    """Symmetric sampled covariance matrix (see covariance_estimate)"""
    return covariance_estimate(ensemble, burn_in).covariance


def bright_mode_signal(ensemble: Ensemble, params: SystemParams) -> np.ndarray:
    """
    x_b = (g_x x + g_y y) / g_b for every trajectory, shape (n_trajectories, n_records)
    """
    _, g_b = bright_mode_params(params)
    states = ensemble.states
    return (params.g_x * states[:, :, 2] + params.g_y * states[:, :, 4]) / g_b
