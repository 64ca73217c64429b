"""
Fit configuration
Fit window, exclusion bands, fixed parameters, initial guesses and bounds.
All frequencies are quoted in Hz, like the parameter records.
"""

import math
import numbers
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Tuple, Union

from ..core import SystemParams, SchemaError, DEFAULT_GAS_DAMPING, DEFAULT_ETA, DEFAULT_LO_HZ
from ..ingestion import read_json


FREE_KEYS = ('omega_x_hz', 'omega_y_hz', 'g_x_hz', 'g_y_hz', 'Gamma_x_hz', 'Gamma_y_hz')

FIXED_DEFAULTS = {
    'eta': DEFAULT_ETA,
    'gamma_gas_x': DEFAULT_GAS_DAMPING,
    'gamma_gas_y': DEFAULT_GAS_DAMPING,
    'lo_hz': DEFAULT_LO_HZ,
}
FIXED_REQUIRED = ('kappa_hz', 'detuning_hz')
FIXED_KEYS = FIXED_REQUIRED + tuple(FIXED_DEFAULTS)

CONFIG_KEYS = ('fit_window_hz', 'exclusion_bands_hz', 'fixed', 'free_initial', 'bounds', 'max_iter', 'tol')

DEFAULT_FIT_WINDOW_HZ = (60e3, 180e3)
DEFAULT_MAX_ITER = 500
DEFAULT_TOL = 1e-6


def _number(value: Any, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real) or not math.isfinite(value):
        raise SchemaError(f"'{key}' must be a finite number, got {value!r}", key=key)
    return float(value)


def _band(value: Any, key: str) -> Tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise SchemaError(f"'{key}' must be a [low, high] pair, got {value!r}", key=key)
    low, high = _number(value[0], key), _number(value[1], key)
    if not low < high:
        raise SchemaError(f"'{key}' must satisfy low < high, got [{low}, {high}]", key=key)
    return low, high


def _bound_pair(value: Any, key: str) -> Tuple[float, float]:
    """[low, high] with high allowed to be null or inf"""
    if isinstance(value, (list, tuple)) and len(value) == 2 and (value[1] is None or value[1] == math.inf):
        return _number(value[0], key), math.inf
    return _band(value, key)


@dataclass(frozen=True)
class FitConfig:
    """
    Settings of one spectrum fit

    fixed holds Hz-quoted kappa_hz and detuning_hz plus optional eta,
    gamma_gas_x, gamma_gas_y and lo_hz. free_initial may be empty, in which
    case guesses come from peak finding. bounds map a free key to
    (low, high) in Hz; unlisted keys are bounded by [0, inf).
    """
    fixed: Dict[str, float]
    fit_window_hz: Tuple[float, float] = DEFAULT_FIT_WINDOW_HZ
    exclusion_bands_hz: List[Tuple[float, float]] = field(default_factory=list)
    free_initial: Dict[str, float] = field(default_factory=dict)
    bounds: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    max_iter: int = DEFAULT_MAX_ITER
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        fixed = dict(FIXED_DEFAULTS)
        for key, value in self.fixed.items():
            if key not in FIXED_KEYS:
                raise SchemaError(f"unknown fixed parameter '{key}'", key=key)
            fixed[key] = _number(value, key)
        for key in FIXED_REQUIRED:
            if key not in fixed:
                raise SchemaError(f"missing fixed parameter '{key}'", key=key)
        object.__setattr__(self, 'fixed', fixed)

        object.__setattr__(self, 'fit_window_hz', _band(self.fit_window_hz, 'fit_window_hz'))
        object.__setattr__(self, 'exclusion_bands_hz',
                           [_band(b, 'exclusion_bands_hz') for b in self.exclusion_bands_hz])

        bounds = {}
        for key, pair in self.bounds.items():
            if key not in FREE_KEYS:
                raise SchemaError(f"bounds given for unknown free parameter '{key}'", key=key)
            low, high = _bound_pair(pair, key)
            if low < 0:
                raise SchemaError(f"lower bound of '{key}' must be >= 0, got {low}", key=key)
            bounds[key] = (low, high)
        object.__setattr__(self, 'bounds', bounds)

        initial = {}
        for key, value in self.free_initial.items():
            if key not in FREE_KEYS:
                raise SchemaError(f"unknown free parameter '{key}'", key=key)
            value = _number(value, key)
            low, high = self.bound(key)
            if not low <= value <= high:
                raise SchemaError(f"initial guess {value} of '{key}' lies outside [{low}, {high}]", key=key)
            initial[key] = value
        object.__setattr__(self, 'free_initial', initial)

        if isinstance(self.max_iter, bool) or not isinstance(self.max_iter, numbers.Integral) or self.max_iter < 1:
            raise SchemaError(f"'max_iter' must be a positive integer, got {self.max_iter!r}", key='max_iter')
        if _number(self.tol, 'tol') <= 0:
            raise SchemaError(f"'tol' must be > 0, got {self.tol}", key='tol')

    # ===================
    # CONSTRUCTION
    # ===================

    @classmethod
    def from_dict(cls, record: Mapping[str, Any]) -> 'FitConfig':
        """
        Build from a fit-config JSON record

        Raises:
            SchemaError: On unknown keys or bad values
        """
        unknown = sorted(set(record) - set(CONFIG_KEYS))
        if unknown:
            raise SchemaError(f"unknown fit config key '{unknown[0]}'", key=unknown[0])
        if 'fixed' not in record:
            raise SchemaError("missing fit config key 'fixed'", key='fixed')

        kwargs = {k: record[k] for k in CONFIG_KEYS if k in record}
        for key in ('fixed', 'free_initial', 'bounds'):
            if key in kwargs and not isinstance(kwargs[key], dict):
                raise SchemaError(f"'{key}' must be an object", key=key)
        if 'exclusion_bands_hz' in kwargs and not isinstance(kwargs['exclusion_bands_hz'], list):
            raise SchemaError("'exclusion_bands_hz' must be a list of [low, high] pairs", key='exclusion_bands_hz')
        return cls(**kwargs)

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> 'FitConfig':
        return cls.from_dict(read_json(path))

    @classmethod
    def for_params(cls, params: SystemParams, **kwargs) -> 'FitConfig':
        """Config whose fixed block is taken from a parameter set"""
        record = params.to_hz()
        fixed = {key: record[key] for key in FIXED_KEYS}
        return cls(fixed=fixed, **kwargs)

    def to_dict(self) -> Dict[str, Any]:
        """Resolved record with every default materialized; infinite bounds become null"""
        return {
            'fit_window_hz': list(self.fit_window_hz),
            'exclusion_bands_hz': [list(b) for b in self.exclusion_bands_hz],
            'fixed': dict(self.fixed),
            'free_initial': dict(self.free_initial),
            'bounds': {k: [low, None if math.isinf(high) else high] for k, (low, high) in self.bounds.items()},
            'max_iter': self.max_iter,
            'tol': self.tol,
        }

    # ===================
    # ACCESSORS
    # ===================

    @property
    def eta(self) -> float:
        return self.fixed['eta']

    def bound(self, key: str) -> Tuple[float, float]:
        return self.bounds.get(key, (0.0, math.inf))

    def with_eta(self, eta: float) -> 'FitConfig':
        fixed = dict(self.fixed)
        fixed['eta'] = eta
        return replace(self, fixed=fixed)

    def with_initial(self, initial: Mapping[str, float]) -> 'FitConfig':
        return replace(self, free_initial=dict(initial))

    def build_params(self, free_hz: Mapping[str, float]) -> SystemParams:
        """
        Combine free values with the fixed block

        Raises:
            SchemaError: If a free key is missing
        """
        missing = [k for k in FREE_KEYS if k not in free_hz]
        if missing:
            raise SchemaError(f"missing free parameter '{missing[0]}'", key=missing[0])
        record = dict(self.fixed)
        record.update({k: free_hz[k] for k in FREE_KEYS})
        return SystemParams.from_hz(record)


def free_values(params: SystemParams) -> Dict[str, float]:
    """Hz-quoted free parameters of a parameter set"""
    record = params.to_hz()
    return {key: record[key] for key in FREE_KEYS}
