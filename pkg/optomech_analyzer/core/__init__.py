"""Core parameter model, susceptibilities and error types"""

from .errors import (
    OptomechError,
    ValidationError,
    SchemaError,
    ParseError,
    MonotonicityError,
    NaNDataError,
    GridSpecError,
    GridSizeError,
    EmptyWindowError,
    DegenerateCouplingError,
    DegenerateSplittingError,
    UndefinedAngleError,
    ShapeError,
    NumericalError,
    PoleError,
    InstabilityError,
    SingularResponseError,
    NotPositiveDefiniteError,
    UnphysicalStateError,
    ComplexEigenvalueError,
    DiscordConditionError,
    DegenerateDiscordError,
    SimulationDivergenceError,
    InsufficientSamplesError,
    exit_code_for,
)

from .system_params import (
    SystemParams,
    PublishedDataSet,
    PUBLISHED_DATASETS,
    PRESETS,
    PARAM_KEY_MAP,
    REQUIRED_KEYS,
    TWO_PI,
    DEFAULT_GAS_DAMPING,
    DEFAULT_ETA,
    DEFAULT_LO_HZ,
    get_preset,
)

from .susceptibility import (
    chi_mech,
    chi_cav,
    chi_cav_minus,
    bright_mode_params,
    polarization_angle,
)

__all__ = [
    'OptomechError',
    'ValidationError',
    'SchemaError',
    'ParseError',
    'MonotonicityError',
    'NaNDataError',
    'GridSpecError',
    'GridSizeError',
    'EmptyWindowError',
    'DegenerateCouplingError',
    'DegenerateSplittingError',
    'UndefinedAngleError',
    'ShapeError',
    'NumericalError',
    'PoleError',
    'InstabilityError',
    'SingularResponseError',
    'NotPositiveDefiniteError',
    'UnphysicalStateError',
    'ComplexEigenvalueError',
    'DiscordConditionError',
    'DegenerateDiscordError',
    'SimulationDivergenceError',
    'InsufficientSamplesError',
    'exit_code_for',
    'SystemParams',
    'PublishedDataSet',
    'PUBLISHED_DATASETS',
    'PRESETS',
    'PARAM_KEY_MAP',
    'REQUIRED_KEYS',
    'TWO_PI',
    'DEFAULT_GAS_DAMPING',
    'DEFAULT_ETA',
    'DEFAULT_LO_HZ',
    'get_preset',
    'chi_mech',
    'chi_cav',
    'chi_cav_minus',
    'bright_mode_params',
    'polarization_angle',
]
