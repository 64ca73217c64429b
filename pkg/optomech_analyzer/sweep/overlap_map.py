"""
Overlap / decoherence map
Parameter law that trades cavity linewidth and mean mechanical frequency
against the spectral-overlap parameter s, and the purity and symmetrized
discord evaluated along it.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from ..core import SystemParams, TWO_PI, ValidationError, DEFAULT_ETA, DEFAULT_GAS_DAMPING
from .grid import grid_sweep, evaluate_point, UNSTABLE_COLUMN


logger = logging.getLogger(__name__)

OVERLAP_COLUMNS = ['s', 'gamma_hz', 'purity', 'discord_sym', UNSTABLE_COLUMN]
OVERLAP_METRICS = ('purity', 'discord_sym')
GAMMA_REL_TOL = 1e-9


@dataclass(frozen=True)
class OverlapLaw:
    """
    Variation law of the overlap map

    With x = (s − s_pivot)/(s_min − s_pivot), the linewidth is
    κ/2π = kappa_pivot + (kappa_min_s − kappa_pivot)·x⁴ and the mean
    frequency (Ω_x+Ω_y)/4π = freq_pivot + (freq_min_s − freq_pivot)·x².
    Above s_pivot both stay at their pivot values. The splitting follows
    from s = 2(g_x²+g_y²)/(κδ) and the drive sits on the mean frequency,
    Δ = −(Ω_x+Ω_y)/2.
    """
    g_hz: float = 12400.0
    s_pivot: float = 0.7
    s_min: float = 0.07
    s_max: float = 1.0
    kappa_pivot_hz: float = 57e3
    kappa_min_s_hz: float = 330e3
    freq_pivot_hz: float = 116e3
    freq_min_s_hz: float = 246e3
    gamma_range_hz: Tuple[float, float] = (100.0, 300e3)
    eta: float = DEFAULT_ETA
    gas_damping: float = DEFAULT_GAS_DAMPING

    def x(self, s: float) -> float:
        if s >= self.s_pivot:
            return 0.0
        return (s - self.s_pivot) / (self.s_min - self.s_pivot)

    def kappa_hz(self, s: float) -> float:
        return self.kappa_pivot_hz + (self.kappa_min_s_hz - self.kappa_pivot_hz) * self.x(s) ** 4

    def mean_freq_hz(self, s: float) -> float:
        return self.freq_pivot_hz + (self.freq_min_s_hz - self.freq_pivot_hz) * self.x(s) ** 2

    def check_gamma(self, gamma_hz: float) -> None:
        low, high = self.gamma_range_hz
        if not (low * (1 - GAMMA_REL_TOL) <= gamma_hz <= high * (1 + GAMMA_REL_TOL)):
            raise ValidationError(f"Γ/2π = {gamma_hz:.6g} Hz lies outside [{low:g}, {high:g}] Hz")

    def params(self, s: float, Gamma: float) -> SystemParams:
        """
        Parameter set at overlap s with Γ_x = Γ_y = Gamma (rad/s)

        Raises:
            ValidationError: If s or Γ is out of range, or the splitting
                pushes Ω_y to zero
        """
        if not (math.isfinite(s) and 0 < s <= self.s_max):
            raise ValidationError(f"s must lie in (0, {self.s_max}], got {s}")
        self.check_gamma(Gamma / TWO_PI)

        g = TWO_PI * self.g_hz
        kappa = TWO_PI * self.kappa_hz(s)
        mean = TWO_PI * self.mean_freq_hz(s)
        splitting = 2 * (g ** 2 + g ** 2) / (kappa * s)
        omega_y = mean - splitting / 2
        if omega_y <= 0:
            raise ValidationError(f"splitting {splitting / TWO_PI:.6g} Hz at s = {s} leaves Ω_y <= 0")

        return SystemParams(
            omega_x=mean + splitting / 2,
            omega_y=omega_y,
            g_x=g,
            g_y=g,
            Gamma_x=Gamma,
            Gamma_y=Gamma,
            kappa=kappa,
            detuning=-mean,
            gamma_x=self.gas_damping,
            gamma_y=self.gas_damping,
            eta=self.eta,
        )


@dataclass
class OverlapPoint:
    """One cell of the map; NaN metrics when unstable or undefined"""
    s: float
    gamma_hz: float
    purity: float
    discord_sym: float
    unstable: bool


def overlap_point(s: float, Gamma: float, law: Optional[OverlapLaw] = None) -> OverlapPoint:
    """
    Purity and symmetrized discord at one (s, Γ) point

    Args:
        s: Overlap parameter
        Gamma: Decoherence rate Γ_x = Γ_y (rad/s)
        law: Variation law; defaults to OverlapLaw()

    Returns:
        OverlapPoint; an unstable configuration is a masked cell, not an error
    """
    law = law or OverlapLaw()
    row = evaluate_point(law.params(s, Gamma), OVERLAP_METRICS)
    return OverlapPoint(
        s=float(s),
        gamma_hz=Gamma / TWO_PI,
        purity=row['purity'],
        discord_sym=row['discord_sym'],
        unstable=row[UNSTABLE_COLUMN],
    )


def overlap_grids(s_points: int, gamma_points: int, law: OverlapLaw,
               s_range: Optional[Tuple[float, float]] = None,
               log_gamma: bool = True) -> Tuple[np.ndarray, np.ndarray]:
    """s grid (linear) and Γ/2π grid (logarithmic unless log_gamma is False)"""
    s_low, s_high = s_range or (law.s_min, law.s_max)
    low, high = law.gamma_range_hz
    s_grid = np.linspace(s_low, s_high, int(s_points))
    gamma_grid = np.geomspace(low, high, int(gamma_points)) if log_gamma else np.linspace(low, high, int(gamma_points))
    return s_grid, gamma_grid


def overlap_sweep(s_points: int = 20, gamma_points: int = 20,
               law: Optional[OverlapLaw] = None,
               s_range: Optional[Tuple[float, float]] = None,
               log_gamma: bool = True,
               threads: int = 1) -> pd.DataFrame:
    """
    Map of purity and symmetrized discord over s and Γ

    Returns:
        DataFrame with columns s, gamma_hz, purity, discord_sym, unstable;
        s varies slowest
    """
    law = law or OverlapLaw()
    s_grid, gamma_grid = overlap_grids(s_points, gamma_points, law, s_range, log_gamma)

    def build(point):
        return law.params(point['s'], TWO_PI * point['gamma_hz'])

    table = grid_sweep({'s': s_grid, 'gamma_hz': gamma_grid}, OVERLAP_METRICS, builder=build, threads=threads)
    logger.info("overlap map: %d cells, %d without discord",
                len(table), int(table['discord_sym'].isna().sum()))
    return table[OVERLAP_COLUMNS]
