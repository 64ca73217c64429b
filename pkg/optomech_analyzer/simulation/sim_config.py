"""
Simulation configuration
"""

import math
import numbers
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from ..core import SchemaError
from ..ingestion import read_json


SIM_KEYS = ('dt', 'duration', 'burn_in', 'n_trajectories', 'seed',
            'record_stride', 'segment_length', 'overlap')
SIM_REQUIRED = ('dt', 'duration', 'burn_in', 'n_trajectories', 'seed')

MAX_SEED = 2 ** 64 - 1


def _positive(value: Any, key: str, allow_zero: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real) or not math.isfinite(value):
        raise SchemaError(f"'{key}' must be a finite number, got {value!r}", key=key)
    if value < 0 or (value == 0 and not allow_zero):
        raise SchemaError(f"'{key}' must be {'>= 0' if allow_zero else '> 0'}, got {value}", key=key)
    return float(value)


def _count(value: Any, key: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < minimum:
        raise SchemaError(f"'{key}' must be an integer >= {minimum}, got {value!r}", key=key)
    return int(value)


@dataclass(frozen=True)
class SimConfig:
    """
    Euler-Maruyama ensemble settings

    Times are in seconds. States are recorded every record_stride steps;
    segment_length (in recorded samples) and overlap configure the Welch
    estimate of the simulated spectrum.
    """
    dt: float
    duration: float
    burn_in: float
    n_trajectories: int
    seed: int
    record_stride: int = 1
    segment_length: Optional[int] = None
    overlap: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, 'dt', _positive(self.dt, 'dt'))
        object.__setattr__(self, 'duration', _positive(self.duration, 'duration'))
        object.__setattr__(self, 'burn_in', _positive(self.burn_in, 'burn_in', allow_zero=True))
        object.__setattr__(self, 'n_trajectories', _count(self.n_trajectories, 'n_trajectories'))
        object.__setattr__(self, 'seed', _count(self.seed, 'seed', minimum=0))
        object.__setattr__(self, 'record_stride', _count(self.record_stride, 'record_stride'))
        if self.segment_length is not None:
            object.__setattr__(self, 'segment_length', _count(self.segment_length, 'segment_length', minimum=2))

        if self.seed > MAX_SEED:
            raise SchemaError(f"'seed' must fit in 64 bits, got {self.seed}", key='seed')
        if not self.burn_in < self.duration:
            raise SchemaError(f"'burn_in' ({self.burn_in}) must be shorter than 'duration' ({self.duration})",
                              key='burn_in')
        if self.n_steps < self.record_stride:
            raise SchemaError("duration is shorter than one recording interval", key='duration')
        overlap = _positive(self.overlap, 'overlap', allow_zero=True)
        if not overlap < 1:
            raise SchemaError(f"'overlap' must lie in [0, 1), got {overlap}", key='overlap')
        object.__setattr__(self, 'overlap', overlap)

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))

    @property
    def record_interval(self) -> float:
        return self.dt * self.record_stride

    @classmethod
    def from_dict(cls, record: Mapping[str, Any]) -> 'SimConfig':
        """
        Raises:
            SchemaError: On a missing, unknown or invalid key
        """
        unknown = sorted(set(record) - set(SIM_KEYS))
        if unknown:
            raise SchemaError(f"unknown simulation key '{unknown[0]}'", key=unknown[0])
        for key in SIM_REQUIRED:
            if key not in record:
                raise SchemaError(f"missing simulation key '{key}'", key=key)
        return cls(**dict(record))

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> 'SimConfig':
        return cls.from_dict(read_json(path))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
