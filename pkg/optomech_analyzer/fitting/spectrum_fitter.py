"""
Spectrum Fitter
Bounded damped least-squares fit of the heterodyne model to shot-subtracted
PSD data, with group aggregation over acquisitions and the detection
efficiency systematic.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy.optimize import least_squares
from scipy.signal import find_peaks, peak_widths

from ..core import (
    SystemParams,
    TWO_PI,
    ValidationError,
    EmptyWindowError,
    InstabilityError,
)
from ..analysis import heterodyne_psd, build_drift, check_stability
from ..ingestion import SpectrumData
from ..utils import mean_and_std
from .fit_config import FitConfig, FREE_KEYS, free_values


logger = logging.getLogger(__name__)

MIN_INCLUDED_BINS = 50
ETA_RELATIVE_UNCERTAINTY = 0.05
PEAK_PROMINENCE = 0.02          # fraction of the window maximum

SpectrumInput = Union[SpectrumData, Sequence[SpectrumData]]


class FitStatus(Enum):
    """Termination state of a fit"""
    CONVERGED = "converged"
    MAX_ITER = "max_iter"
    AT_BOUND = "at_bound"


@dataclass
class FitResult:
    """
    Fitted parameters of one acquisition or the aggregate of a group

    values_hz holds the free parameters; for a group they are means over
    acquisitions and stat_hz their standard deviation (ddof=1).
    """
    params: SystemParams
    values_hz: Dict[str, float]
    status: FitStatus
    rss: float
    n_iterations: int
    n_bins: int
    acquisition_id: str = ""
    stat_hz: Dict[str, float] = field(default_factory=lambda: {k: 0.0 for k in FREE_KEYS})
    syst_hz: Dict[str, float] = field(default_factory=lambda: {k: 0.0 for k in FREE_KEYS})
    other_sideband_rss: Optional[float] = None
    acquisitions: List['FitResult'] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status is FitStatus.CONVERGED

    def with_systematic(self, syst_hz: Mapping[str, float]) -> 'FitResult':
        return replace(self, syst_hz=dict(syst_hz))

    def to_frame(self) -> pd.DataFrame:
        """One row per free parameter: value, stat, syst (Hz)"""
        return pd.DataFrame({
            'parameter': list(FREE_KEYS),
            'value': [self.values_hz[k] for k in FREE_KEYS],
            'stat': [self.stat_hz[k] for k in FREE_KEYS],
            'syst': [self.syst_hz[k] for k in FREE_KEYS],
        })

    def to_dict(self) -> Dict:
        return {
            'acquisition_id': self.acquisition_id,
            'params': self.params.to_hz(),
            'values_hz': dict(self.values_hz),
            'stat_hz': dict(self.stat_hz),
            'syst_hz': dict(self.syst_hz),
            'rss': self.rss,
            'status': self.status.value,
            'n_iterations': self.n_iterations,
            'n_bins': self.n_bins,
            'other_sideband_rss': self.other_sideband_rss,
            'acquisitions': [a.to_dict() for a in self.acquisitions],
        }


@dataclass
class EtaSystematic:
    """Refits at η(1 ∓ relative) and the per-parameter half range"""
    relative: float
    low: FitResult
    high: FitResult
    half_range_hz: Dict[str, float]


# ===================
# OBJECTIVE
# ===================

def included_mask(freq_hz: np.ndarray, config: FitConfig) -> np.ndarray:
    """Bins inside the fit window and outside every exclusion band (edges inclusive)"""
    freq_hz = np.asarray(freq_hz, dtype=float)
    low, high = config.fit_window_hz
    mask = (freq_hz >= low) & (freq_hz <= high)
    for band_low, band_high in config.exclusion_bands_hz:
        mask &= ~((freq_hz >= band_low) & (freq_hz <= band_high))
    return mask


def model_psd(freq_hz: np.ndarray, params: SystemParams) -> np.ndarray:
    """Shot-subtracted model spectrum at frequencies relative to the LO (Hz)"""
    return heterodyne_psd(TWO_PI * np.asarray(freq_hz, dtype=float), params, shot_subtracted=True)


def residuals(params: SystemParams, freq_hz: np.ndarray, psd: np.ndarray,
              config: FitConfig) -> np.ndarray:
    """
    model − data on the included bins

    Raises:
        EmptyWindowError: If no bin survives window and exclusions
    """
    freq_hz = np.asarray(freq_hz, dtype=float)
    psd = np.asarray(psd, dtype=float)
    mask = included_mask(freq_hz, config)
    if not np.any(mask):
        raise EmptyWindowError(
            f"no data bins inside fit window {config.fit_window_hz} after exclusions")
    return model_psd(freq_hz[mask], params) - psd[mask]


def objective(free_hz: Mapping[str, float], data: SpectrumData, config: FitConfig) -> float:
    """Sum of squared residuals on the linear PSD scale"""
    r = residuals(config.build_params(free_hz), data.freq_hz, data.psd, config)
    return float(np.dot(r, r))


# ===================
# INITIAL GUESSES
# ===================

def initial_guesses(data: SpectrumData, config: FitConfig) -> Dict[str, float]:
    """
    Free-parameter starting point

    Values given in config.free_initial are used as they are. The rest
    come from the two highest peaks in the window: the peak positions give
    the frequencies (higher one assigned to X), the half-maximum widths
    the optical damping 4g²/κ, and the heights the decoherence rates.

    Raises:
        ValidationError: If guesses are needed and no peak is found
    """
    guesses = dict(config.free_initial)
    if all(k in guesses for k in FREE_KEYS):
        return guesses

    mask = included_mask(data.freq_hz, config)
    freq = data.freq_hz[mask]
    psd = data.psd[mask]
    if freq.size < 3:
        raise EmptyWindowError("too few bins in the fit window to locate peaks")

    peaks, _ = find_peaks(psd, prominence=PEAK_PROMINENCE * np.max(psd))
    if peaks.size == 0:
        raise ValidationError("no spectral peak found in the fit window; give free_initial")

    chosen = peaks[np.argsort(psd[peaks])[::-1][:2]]
    if chosen.size == 1:
        chosen = np.repeat(chosen, 2)
    widths = peak_widths(psd, chosen, rel_height=0.5)[0]
    bin_hz = float(np.median(np.diff(freq)))

    kappa_hz = config.fixed['kappa_hz']
    kappa = TWO_PI * kappa_hz
    detuning = TWO_PI * config.fixed['detuning_hz']

    order = np.argsort(np.abs(freq[chosen]))[::-1]
    for label, idx in zip(('x', 'y'), order):
        peak = chosen[idx]
        linewidth_hz = max(widths[idx] * bin_hz, bin_hz)
        g_hz = np.sqrt(linewidth_hz * kappa_hz / 4)

        omega = TWO_PI * freq[peak]
        cavity_filter = 1.0 / ((detuning + omega) ** 2 + kappa ** 2 / 4)
        damping = TWO_PI * linewidth_hz
        coupling = TWO_PI * g_hz
        decoherence = psd[peak] * damping ** 2 / (4 * config.eta * kappa * cavity_filter * coupling ** 2)

        guesses.setdefault(f'omega_{label}_hz', float(abs(freq[peak])))
        guesses.setdefault(f'g_{label}_hz', float(g_hz))
        guesses.setdefault(f'Gamma_{label}_hz', float(decoherence / TWO_PI))

    for key in FREE_KEYS:
        low, high = config.bound(key)
        guesses[key] = float(np.clip(guesses[key], low, high))

    logger.debug("initial guesses: %s", guesses)
    return guesses


# ===================
# FITTER
# ===================

class SpectrumFitter:
    """
    Fits acquisitions one by one or as a group
    """

    def __init__(self, config: FitConfig, threads: int = 1):
        """
        Initialize fitter

        Args:
            config: Fit settings
            threads: Worker threads for group fits
        """
        self.config = config
        self.threads = max(int(threads), 1)

    def fit(self, data: SpectrumInput) -> FitResult:
        """
        Fit one acquisition, or fit each acquisition of a group and aggregate

        Group results carry the mean of each free parameter and the standard
        deviation over acquisitions as the statistical error.
        """
        if isinstance(data, SpectrumData):
            return self.fit_single(data)

        group = list(data)
        if not group:
            raise ValidationError("empty acquisition group")
        if len(group) == 1:
            return self.fit_single(group[0])

        with ThreadPoolExecutor(max_workers=self.threads) as executor:
            results = list(executor.map(self.fit_single, group))
        return self._aggregate(results)

    def fit_single(self, data: SpectrumData) -> FitResult:
        """
        Fit one acquisition

        Raises:
            ValidationError: If data are not normalized or the window holds
                fewer than the minimum number of bins
            InstabilityError: If the initial guess has no steady state
        """
        if not data.ready_for_fit:
            raise ValidationError(
                f"acquisition '{data.acquisition_id}' must be shot-normalized and dark-noise-subtracted")

        config = self.config
        mask = included_mask(data.freq_hz, config)
        n_bins = int(np.count_nonzero(mask))
        if n_bins == 0:
            raise EmptyWindowError(f"no data bins inside fit window {config.fit_window_hz}")
        if n_bins < MIN_INCLUDED_BINS:
            raise ValidationError(f"fit needs at least {MIN_INCLUDED_BINS} bins, window holds {n_bins}")

        freq = data.freq_hz[mask]
        psd = data.psd[mask]

        if not np.any(psd > 0):
            return self._zero_signal_result(data, n_bins)

        initial = initial_guesses(data, config)
        theta0 = np.array([initial[k] for k in FREE_KEYS])
        scale = np.where(theta0 > 0, theta0, 1.0)
        lower = np.array([config.bound(k)[0] for k in FREE_KEYS]) / scale
        upper = np.array([config.bound(k)[1] for k in FREE_KEYS]) / scale

        def trial_residuals(ratio: np.ndarray) -> np.ndarray:
            free = dict(zip(FREE_KEYS, ratio * scale))
            try:
                params = config.build_params(free)
            except ValidationError:
                return np.full(n_bins, np.inf)
            # no steady state: non-finite residuals make the solver shrink its step
            if not check_stability(build_drift(params)).stable:
                return np.full(n_bins, np.inf)
            return model_psd(freq, params) - psd

        start = theta0 / scale
        if not np.all(np.isfinite(trial_residuals(start))):
            initial_params = config.build_params(initial)
            report = check_stability(build_drift(initial_params))
            raise InstabilityError(
                "initial guess has no steady state; adjust free_initial",
                spectral_abscissa=report.spectral_abscissa,
            )

        solution = least_squares(
            trial_residuals, start,
            bounds=(lower, upper),
            method='trf',
            x_scale='jac',
            xtol=config.tol,
            ftol=1e-12,
            gtol=1e-12,
            max_nfev=config.max_iter,
        )

        values = {k: float(v) for k, v in zip(FREE_KEYS, solution.x * scale)}
        params = config.build_params(values)
        final = model_psd(freq, params) - psd

        if solution.status == 0:
            status = FitStatus.MAX_ITER
            logger.warning("fit of '%s' stopped after %d evaluations without converging",
                           data.acquisition_id, solution.nfev)
        elif np.any(solution.active_mask != 0):
            status = FitStatus.AT_BOUND
            logger.warning("fit of '%s' ended on a parameter bound", data.acquisition_id)
        else:
            status = FitStatus.CONVERGED

        logger.info("fitted '%s': %s after %d evaluations, rss %.4g",
                    data.acquisition_id, status.value, solution.nfev, float(np.dot(final, final)))

        return FitResult(
            params=params,
            values_hz=values,
            status=status,
            rss=float(np.dot(final, final)),
            n_iterations=int(solution.nfev),
            n_bins=n_bins,
            acquisition_id=data.acquisition_id,
            other_sideband_rss=self.predict_other_sideband(data, params),
        )

    def _zero_signal_result(self, data: SpectrumData, n_bins: int) -> FitResult:
        """
        Data with no positive signal are fitted exactly by vanishing
        couplings; the remaining parameters are not identifiable
        """
        logger.warning("acquisition '%s' has no signal in the fit window; couplings set to their lower bound",
                       data.acquisition_id)
        config = self.config
        center = 0.5 * sum(abs(f) for f in config.fit_window_hz)
        values = {}
        for key in FREE_KEYS:
            if key.startswith('g_'):
                values[key] = config.bound(key)[0]
            elif key.startswith('omega_'):
                values[key] = config.free_initial.get(key, center)
            else:
                values[key] = config.free_initial.get(key, config.bound(key)[0])
        params = config.build_params(values)
        r = residuals(params, data.freq_hz, data.psd, config)
        return FitResult(
            params=params,
            values_hz=values,
            status=FitStatus.AT_BOUND,
            rss=float(np.dot(r, r)),
            n_iterations=0,
            n_bins=n_bins,
            acquisition_id=data.acquisition_id,
            other_sideband_rss=self.predict_other_sideband(data, params),
        )

    def _aggregate(self, results: List[FitResult]) -> FitResult:
        values, stat = {}, {}
        for key in FREE_KEYS:
            values[key], stat[key] = mean_and_std([r.values_hz[key] for r in results])

        statuses = [r.status for r in results if not r.converged]
        other = [r.other_sideband_rss for r in results]
        return FitResult(
            params=self.config.build_params(values),
            values_hz=values,
            status=statuses[0] if statuses else FitStatus.CONVERGED,
            rss=float(sum(r.rss for r in results)),
            n_iterations=max(r.n_iterations for r in results),
            n_bins=sum(r.n_bins for r in results),
            acquisition_id='+'.join(r.acquisition_id for r in results),
            stat_hz=stat,
            other_sideband_rss=None if any(o is None for o in other) else float(sum(other)),
            acquisitions=results,
        )

    def predict_other_sideband(self, data: SpectrumData, params: SystemParams) -> Optional[float]:
        """
        Residual sum of squares on the mirror image of the fit window

        Returns:
            RSS of the prediction, or None if the data do not cover that window
        """
        low, high = self.config.fit_window_hz
        mask = (data.freq_hz >= -high) & (data.freq_hz <= -low)
        if not np.any(mask):
            return None
        r = model_psd(data.freq_hz[mask], params) - data.psd[mask]
        return float(np.dot(r, r))

    def systematic_eta(self, data: SpectrumInput, result: FitResult,
                       relative: float = ETA_RELATIVE_UNCERTAINTY) -> EtaSystematic:
        """
        Refit with η fixed at η(1 − relative) and η(1 + relative)

        Both refits start from the fitted values of result.

        Returns:
            EtaSystematic with half the absolute spread per free parameter
        """
        if not 0 < relative < 1:
            raise ValidationError(f"relative η uncertainty must lie in (0, 1), got {relative}")
        eta = self.config.eta
        start = free_values(result.params)

        shifted = []
        for factor in (1 - relative, 1 + relative):
            config = self.config.with_eta(eta * factor).with_initial(start)
            shifted.append(SpectrumFitter(config, self.threads).fit(data))
        low, high = shifted

        half_range = {k: 0.5 * abs(high.values_hz[k] - low.values_hz[k]) for k in FREE_KEYS}
        logger.info("η systematic (±%.0f%%): %s", 100 * relative, half_range)
        return EtaSystematic(relative=relative, low=low, high=high, half_range_hz=half_range)


def fit(data: SpectrumInput, config: FitConfig, threads: int = 1) -> FitResult:
    return SpectrumFitter(config, threads).fit(data)


def systematic_eta(data: SpectrumInput, config: FitConfig, fit_result: FitResult,
                   relative: float = ETA_RELATIVE_UNCERTAINTY) -> EtaSystematic:
    return SpectrumFitter(config).systematic_eta(data, fit_result, relative)
