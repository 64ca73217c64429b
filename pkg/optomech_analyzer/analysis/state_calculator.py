"""
State Metrics Calculator
Bundles every Gaussian-state characterization of one configuration and
propagates acquisition spread and detection-efficiency systematics into
value ± stat ± syst reports.
"""

import logging
from dataclasses import dataclass, field, asdict
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core import SystemParams, DiscordConditionError, DegenerateDiscordError, DegenerateSplittingError
from .steady_state import SteadyState, compute_steady_state
from .gaussian_info import (
    DiscordDirection,
    Mode,
    occupancy,
    purity,
    symplectic_data,
    discord,
    mutual_information,
    ground_state_probability,
    max_discord_over_angle,
    overlap_parameter,
    AngleMaximum,
)


logger = logging.getLogger(__name__)

METRIC_NAMES = (
    'n_x', 'n_y', 'purity', 'purity_independent', 'purity_difference',
    'discord_x_from_y', 'discord_y_from_x', 'discord_sym',
    'mutual_information', 'p00', 'overlap_s',
)


@dataclass
class StateMetrics:
    """Derived characterization of one steady state"""
    n_x: float
    n_y: float
    purity: float
    purity_independent: float
    invariants_I: Tuple[float, float, float, float]
    symplectic_d: Tuple[float, float]
    discord_x_from_y: float
    discord_y_from_x: float
    p00: float
    overlap_s: float
    mutual_information: float
    physical: bool = True

    @property
    def purity_difference(self) -> float:
        return self.purity - self.purity_independent

    @property
    def discord_sym(self) -> float:
        return 0.5 * (self.discord_x_from_y + self.discord_y_from_x)

    def scalar(self, name: str) -> float:
        return float(getattr(self, name))

    def to_dict(self) -> Dict:
        record = asdict(self)
        record['invariants_I'] = list(self.invariants_I)
        record['symplectic_d'] = list(self.symplectic_d)
        record['purity_difference'] = self.purity_difference
        record['discord_sym'] = self.discord_sym
        return record


@dataclass
class MetricWithErrors:
    """value ± stat ± syst"""
    value: float
    stat: float = 0.0
    syst: float = 0.0

    def to_dict(self) -> Dict[str, float]:
        return {'value': self.value, 'stat': self.stat, 'syst': self.syst}


@dataclass
class MetricsReport:
    """StateMetrics of the central configuration plus two-sided error bars"""
    central: StateMetrics
    errors: Dict[str, MetricWithErrors] = field(default_factory=dict)
    n_acquisitions: int = 1

    def to_dict(self) -> Dict:
        return {
            'metrics': self.central.to_dict(),
            'error_bars': {name: err.to_dict() for name, err in self.errors.items()},
            'n_acquisitions': self.n_acquisitions,
        }


class StateMetricsCalculator:
    """
    Computes state metrics from a parameter set
    Solves the steady state once and caches it
    """

    def __init__(self, params: SystemParams):
        """
        Initialize calculator

        Args:
            params: System parameters with a stable drift matrix
        """
        self.params = params
        self._state: Optional[SteadyState] = None

    @property
    def steady_state(self) -> SteadyState:
        if self._state is None:
            self._state = compute_steady_state(self.params)
        return self._state

    @property
    def mechanical(self) -> np.ndarray:
        return self.steady_state.mechanical

    # ===================
    # SINGLE-MODE MEASURES
    # ===================

    def occupancies(self) -> Tuple[float, float]:
        """(n_x, n_y)"""
        return occupancy(self.mechanical, Mode.X), occupancy(self.mechanical, Mode.Y)

    # ===================
    # TWO-MODE MEASURES
    # ===================

    def discords(self) -> Tuple[float, float]:
        """(𝒟_{X←Y}, 𝒟_{Y←X})"""
        return (discord(self.mechanical, DiscordDirection.X_FROM_Y),
                discord(self.mechanical, DiscordDirection.Y_FROM_X))

    def rotated_discord_maximum(self) -> AngleMaximum:
        """Maximum of 𝒟_{φ←φ+π/2} over frame angles"""
        return max_discord_over_angle(self.mechanical, self.params.omega_x, self.params.omega_y)

    def overlap(self) -> float:
        try:
            return overlap_parameter(self.params)
        except DegenerateSplittingError:
            return float('inf')

    def calculate_all(self) -> StateMetrics:
        """
        Compute every metric

        Raises:
            InstabilityError: If the configuration has no steady state
            DiscordConditionError: If the closed-form discord does not apply
        """
        Vm = self.mechanical
        n_x, n_y = self.occupancies()
        mu, mu_independent = purity(Vm)
        data = symplectic_data(Vm)
        d_xy, d_yx = self.discords()
        metrics = StateMetrics(
            n_x=n_x,
            n_y=n_y,
            purity=mu,
            purity_independent=mu_independent,
            invariants_I=data.invariants,
            symplectic_d=(data.d_plus, data.d_minus),
            discord_x_from_y=d_xy,
            discord_y_from_x=d_yx,
            p00=ground_state_probability(Vm),
            overlap_s=self.overlap(),
            mutual_information=mutual_information(Vm),
            physical=data.physical,
        )
        if not data.physical:
            logger.warning("steady state violates physicality (d- = %.6f)", data.d_minus)
        return metrics

    def get_metric_summary(self) -> Dict[str, float]:
        """Scalar metrics keyed by name"""
        metrics = self.calculate_all()
        return {name: metrics.scalar(name) for name in METRIC_NAMES}


def characterize(params: SystemParams) -> StateMetrics:
    """Shortcut for StateMetricsCalculator(params).calculate_all()"""
    return StateMetricsCalculator(params).calculate_all()


def characterize_group(central: SystemParams,
                       acquisitions: Sequence[SystemParams] = (),
                       eta_low: Optional[SystemParams] = None,
                       eta_high: Optional[SystemParams] = None) -> MetricsReport:
    """
    Metrics with statistical and efficiency-systematic error bars

    Args:
        central: Parameters the reported values are computed from
        acquisitions: Per-acquisition parameters; their standard deviation
            (ddof=1) is the statistical error
        eta_low, eta_high: Parameters refitted at η(1 ∓ 0.05); half the spread
            of each metric is the systematic error

    Returns:
        MetricsReport
    """
    central_metrics = characterize(central)

    samples: List[StateMetrics] = []
    for params in acquisitions:
        try:
            samples.append(characterize(params))
        except (DiscordConditionError, DegenerateDiscordError) as e:
            logger.warning("acquisition skipped in error propagation: %s", e)

    shifted = [characterize(p) for p in (eta_low, eta_high) if p is not None]

    errors = {}
    for name in METRIC_NAMES:
        value = central_metrics.scalar(name)
        stat = 0.0
        if len(samples) > 1:
            stat = float(np.std([m.scalar(name) for m in samples], ddof=1))
        syst = 0.0
        if len(shifted) == 2:
            syst = 0.5 * abs(shifted[1].scalar(name) - shifted[0].scalar(name))
        errors[name] = MetricWithErrors(value=value, stat=stat, syst=syst)

    return MetricsReport(
        central=central_metrics,
        errors=errors,
        n_acquisitions=max(len(acquisitions), 1),
    )
