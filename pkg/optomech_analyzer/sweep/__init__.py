"""Parameter sweeps and the overlap / decoherence map"""

from .grid import (
    MAX_GRID_POINTS,
    METRIC_SELECTORS,
    UNSTABLE_COLUMN,
    record_builder,
    evaluate_point,
    grid_sweep,
)

from .overlap_map import (
    OVERLAP_COLUMNS,
    OverlapLaw,
    OverlapPoint,
    overlap_point,
    overlap_grids,
    overlap_sweep,
)

__all__ = [
    'MAX_GRID_POINTS',
    'METRIC_SELECTORS',
    'UNSTABLE_COLUMN',
    'record_builder',
    'evaluate_point',
    'grid_sweep',
    'OVERLAP_COLUMNS',
    'OverlapLaw',
    'OverlapPoint',
    'overlap_point',
    'overlap_grids',
    'overlap_sweep',
]
