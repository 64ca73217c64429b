"""Utility functions for matrices and report formatting"""

from .numeric_utils import (
    symmetrize,
    mean_and_std,
)

from .text_utils import (
    HUMAN_DIGITS,
    format_sig,
    format_with_errors,
    format_hz,
    format_angle_deg,
    banner,
)

__all__ = [
    'symmetrize',
    'mean_and_std',
    'HUMAN_DIGITS',
    'format_sig',
    'format_with_errors',
    'format_hz',
    'format_angle_deg',
    'banner',
]
