"""
Numeric utility functions for matrices and repeated measurements
"""
from typing import Sequence

import numpy as np


def symmetrize(matrix: np.ndarray) -> np.ndarray:
    """(M + Mᵀ)/2, exactly symmetric"""
    matrix = np.asarray(matrix, dtype=float)
    return 0.5 * (matrix + matrix.T)


def mean_and_std(values: Sequence[float]) -> tuple:
    """
    Mean and sample standard deviation (ddof=1); std is 0 for a single value
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("mean_and_std needs at least one value")
    std = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
    return float(np.mean(values)), std
