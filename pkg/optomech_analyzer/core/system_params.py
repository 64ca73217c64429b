"""
System Parameters
Defines the physical parameter set of the levitated-particle / cavity system.
Internal unit is angular frequency (rad/s); every record read or written
quotes ordinary frequency in Hz.
"""

import math
import numbers
from dataclasses import dataclass, replace, fields
from typing import Dict, Mapping, Tuple, Any

from .errors import SchemaError, ValidationError


TWO_PI = 2.0 * math.pi

DEFAULT_GAS_DAMPING = 1e-4      # 1/s, nominal value for the gas damping
DEFAULT_ETA = 0.32
DEFAULT_LO_HZ = 900e3

# Hz-quoted record key -> (internal field, scaled by 2π)
PARAM_KEY_MAP: Dict[str, Tuple[str, bool]] = {
    'omega_x_hz': ('omega_x', True),
    'omega_y_hz': ('omega_y', True),
    'g_x_hz': ('g_x', True),
    'g_y_hz': ('g_y', True),
    'gamma_gas_x': ('gamma_x', False),
    'gamma_gas_y': ('gamma_y', False),
    'Gamma_x_hz': ('Gamma_x', True),
    'Gamma_y_hz': ('Gamma_y', True),
    'kappa_hz': ('kappa', True),
    'detuning_hz': ('detuning', True),
    'eta': ('eta', False),
    'lo_hz': ('omega_lo', True),
}

REQUIRED_KEYS = (
    'omega_x_hz', 'omega_y_hz', 'g_x_hz', 'g_y_hz',
    'Gamma_x_hz', 'Gamma_y_hz', 'kappa_hz', 'detuning_hz',
)

FIELD_TO_KEY = {name: key for key, (name, _) in PARAM_KEY_MAP.items()}


@dataclass(frozen=True)
class SystemParams:
    """
    Full physical parameter set defining one configuration.

    Frequencies, couplings and decoherence rates are angular (rad/s);
    gas damping rates are plain rates (1/s). Red detuning is negative.
    """

    omega_x: float
    omega_y: float
    g_x: float
    g_y: float
    Gamma_x: float
    Gamma_y: float
    kappa: float
    detuning: float
    gamma_x: float = DEFAULT_GAS_DAMPING
    gamma_y: float = DEFAULT_GAS_DAMPING
    eta: float = DEFAULT_ETA
    omega_lo: float = TWO_PI * DEFAULT_LO_HZ

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, numbers.Real) or isinstance(value, bool):
                raise ValidationError(f"{f.name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise ValidationError(f"{f.name} must be finite, got {value}")
            object.__setattr__(self, f.name, float(value))

        for name in ('omega_x', 'omega_y', 'kappa'):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be > 0, got {getattr(self, name)}")
        for name in ('g_x', 'g_y', 'Gamma_x', 'Gamma_y', 'gamma_x', 'gamma_y'):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0, got {getattr(self, name)}")
        if not 0 < self.eta <= 1:
            raise ValidationError(f"eta must lie in (0, 1], got {self.eta}")

    # ===================
    # CONSTRUCTION
    # ===================

    @classmethod
    def from_hz(cls, record: Mapping[str, Any]) -> 'SystemParams':
        """
        Build parameters from a Hz-quoted record

        Args:
            record: Mapping with the keys of PARAM_KEY_MAP; gamma_gas_*, eta
                and lo_hz are optional

        Returns:
            SystemParams in internal units

        Raises:
            SchemaError: On a missing, unknown or non-numeric key
        """
        unknown = sorted(set(record) - set(PARAM_KEY_MAP))
        if unknown:
            raise SchemaError(f"unknown parameter key '{unknown[0]}'", key=unknown[0])
        for key in REQUIRED_KEYS:
            if key not in record:
                raise SchemaError(f"missing required parameter key '{key}'", key=key)

        kwargs = {}
        for key, value in record.items():
            name, angular = PARAM_KEY_MAP[key]
            if isinstance(value, bool) or not isinstance(value, numbers.Real):
                raise SchemaError(f"parameter '{key}' must be a number, got {value!r}", key=key)
            kwargs[name] = TWO_PI * value if angular else float(value)

        try:
            return cls(**kwargs)
        except SchemaError:
            raise
        except ValidationError as e:
            field_name = str(e).split(' ')[0]
            raise SchemaError(str(e), key=FIELD_TO_KEY.get(field_name)) from e

    def to_hz(self) -> Dict[str, float]:
        """Hz-quoted record, inverse of from_hz"""
        record = {}
        for key, (name, angular) in PARAM_KEY_MAP.items():
            value = getattr(self, name)
            record[key] = value / TWO_PI if angular else value
        return record

    def with_changes(self, **changes) -> 'SystemParams':
        """Copy with some internal-unit fields replaced"""
        return replace(self, **changes)

    def swapped(self) -> 'SystemParams':
        """Copy with the X and Y mode parameters interchanged"""
        return replace(
            self,
            omega_x=self.omega_y, omega_y=self.omega_x,
            g_x=self.g_y, g_y=self.g_x,
            Gamma_x=self.Gamma_y, Gamma_y=self.Gamma_x,
            gamma_x=self.gamma_y, gamma_y=self.gamma_x,
        )


@dataclass(frozen=True)
class PublishedDataSet:
    """Fitted parameters of one published data set with their uncertainties"""

    name: str
    voltage: float
    params_hz: Dict[str, float]
    stat_hz: Dict[str, float]
    syst_hz: Dict[str, float]

    @property
    def params(self) -> SystemParams:
        return SystemParams.from_hz(self.params_hz)


def _dataset(name, voltage, omega_x, omega_y, g_x, g_y, Gamma_x, Gamma_y,
             detuning, stat, syst) -> PublishedDataSet:
    params_hz = {
        'omega_x_hz': omega_x, 'omega_y_hz': omega_y,
        'g_x_hz': g_x, 'g_y_hz': g_y,
        'Gamma_x_hz': Gamma_x, 'Gamma_y_hz': Gamma_y,
        'kappa_hz': 57e3, 'detuning_hz': detuning,
        'gamma_gas_x': DEFAULT_GAS_DAMPING, 'gamma_gas_y': DEFAULT_GAS_DAMPING,
        'eta': DEFAULT_ETA, 'lo_hz': DEFAULT_LO_HZ,
    }
    keys = ('omega_x_hz', 'omega_y_hz', 'g_x_hz', 'g_y_hz', 'Gamma_x_hz', 'Gamma_y_hz')
    return PublishedDataSet(
        name=name,
        voltage=voltage,
        params_hz=params_hz,
        stat_hz=dict(zip(keys, stat)),
        syst_hz={'Gamma_x_hz': syst[0], 'Gamma_y_hz': syst[1]},
    )


# Detuning is printed only for the first set; the other two use the value
# that reproduces their published occupancies.
PUBLISHED_DATASETS: Dict[str, PublishedDataSet] = {
    'dataset_0V': _dataset(
        'dataset_0V', 0.0, 122170, 109370, 14130, 10370, 4030, 3050, -111e3,
        stat=(120, 150, 220, 160, 200, 170), syst=(120, 90)),
    'dataset_22p5V': _dataset(
        'dataset_22p5V', 22.5, 122290, 108970, 14420, 10300, 3890, 2990, -111e3,
        stat=(280, 220, 230, 190, 220, 160), syst=(150, 70)),
    'dataset_35V': _dataset(
        'dataset_35V', 35.0, 121610, 107640, 15160, 10060, 3250, 2520, -110e3,
        stat=(160, 150, 310, 110, 180, 140), syst=(100, 70)),
}

PRESETS: Dict[str, SystemParams] = {
    name: dataset.params for name, dataset in PUBLISHED_DATASETS.items()
}


def get_preset(name: str) -> SystemParams:
    """
    Look up a named parameter preset

    Raises:
        SchemaError: If the name is unknown
    """
    if name not in PRESETS:
        choices = ', '.join(sorted(PRESETS))
        raise SchemaError(f"unknown preset '{name}' (choose from {choices})", key=name)
    return PRESETS[name]
