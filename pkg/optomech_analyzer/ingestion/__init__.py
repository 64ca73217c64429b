"""Data and configuration ingestion"""

from .psd_reader import (
    FREQ_COLUMN,
    SpectrumData,
    PSDReader,
    validate_samples,
    load_psd,
)

from .config_reader import (
    read_json,
    load_params,
)

__all__ = [
    'FREQ_COLUMN',
    'SpectrumData',
    'PSDReader',
    'validate_samples',
    'load_psd',
    'read_json',
    'load_params',
]
