"""
Grid Sweep
Evaluates state metrics over the Cartesian product of parameter ranges.
Rows come out in row-major order over the ranges (last range fastest).
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from itertools import product
from typing import Callable, Dict, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from ..core import (
    SystemParams,
    GridSpecError,
    GridSizeError,
    InstabilityError,
    NotPositiveDefiniteError,
    DiscordConditionError,
    DegenerateDiscordError,
    DegenerateSplittingError,
)
from ..analysis import (
    StateMetricsCalculator,
    DiscordDirection,
    purity,
    discord,
    occupancy,
    mutual_information,
    ground_state_probability,
    Mode,
)


logger = logging.getLogger(__name__)

MAX_GRID_POINTS = 1_000_000
UNSTABLE_COLUMN = 'unstable'

Builder = Callable[[Dict[str, float]], SystemParams]


def _discord_sym(calc: StateMetricsCalculator) -> float:
    d_xy, d_yx = calc.discords()
    return 0.5 * (d_xy + d_yx)


METRIC_SELECTORS: Dict[str, Callable[[StateMetricsCalculator], float]] = {
    'n_x': lambda c: occupancy(c.mechanical, Mode.X),
    'n_y': lambda c: occupancy(c.mechanical, Mode.Y),
    'purity': lambda c: purity(c.mechanical)[0],
    'purity_independent': lambda c: purity(c.mechanical)[1],
    'purity_difference': lambda c: purity(c.mechanical)[0] - purity(c.mechanical)[1],
    'discord_x_from_y': lambda c: discord(c.mechanical, DiscordDirection.X_FROM_Y),
    'discord_y_from_x': lambda c: discord(c.mechanical, DiscordDirection.Y_FROM_X),
    'discord_sym': _discord_sym,
    'mutual_information': lambda c: mutual_information(c.mechanical),
    'p00': lambda c: ground_state_probability(c.mechanical),
    'overlap_s': lambda c: c.overlap(),
    'spectral_abscissa': lambda c: c.steady_state.stability.spectral_abscissa,
}

# metric-level failures that leave the rest of the row valid
_CELL_ERRORS = (DiscordConditionError, DegenerateDiscordError, DegenerateSplittingError)


def record_builder(base: SystemParams) -> Builder:
    """Builder that overrides Hz-quoted keys of a base parameter record"""
    base_record = base.to_hz()

    def build(point: Dict[str, float]) -> SystemParams:
        record = dict(base_record)
        record.update(point)
        return SystemParams.from_hz(record)

    return build


def evaluate_point(params: SystemParams, metrics: Sequence[str]) -> Dict[str, object]:
    """
    Selected metrics of one configuration

    Unstable configurations give NaN for every metric and unstable = True;
    a metric whose closed form does not apply is NaN on its own.
    """
    calc = StateMetricsCalculator(params)
    try:
        calc.steady_state
    except (InstabilityError, NotPositiveDefiniteError) as e:
        logger.debug("masked cell: %s", e)
        row = {name: math.nan for name in metrics}
        row[UNSTABLE_COLUMN] = True
        return row

    row = {}
    for name in metrics:
        try:
            row[name] = float(METRIC_SELECTORS[name](calc))
        except _CELL_ERRORS as e:
            logger.debug("metric %s undefined: %s", name, e)
            row[name] = math.nan
    row[UNSTABLE_COLUMN] = False
    return row


def _validate_ranges(param_ranges: Mapping[str, Sequence[float]]) -> Dict[str, np.ndarray]:
    if not param_ranges:
        raise GridSpecError("at least one parameter range is required")
    ranges = {}
    for name, values in param_ranges.items():
        values = np.atleast_1d(np.asarray(values, dtype=float))
        if values.ndim != 1 or values.size == 0:
            raise GridSpecError(f"range of '{name}' must be a nonempty 1-D sequence")
        if not np.all(np.isfinite(values)):
            raise GridSpecError(f"range of '{name}' holds non-finite values")
        ranges[name] = values

    size = math.prod(v.size for v in ranges.values())
    if size > MAX_GRID_POINTS:
        raise GridSizeError(f"grid holds {size} points, limit is {MAX_GRID_POINTS}")
    return ranges


def grid_sweep(param_ranges: Mapping[str, Sequence[float]],
               metrics: Sequence[str],
               builder: Optional[Builder] = None,
               base: Optional[SystemParams] = None,
               threads: int = 1) -> pd.DataFrame:
    """
    Evaluate metrics on every point of a parameter grid

    Args:
        param_ranges: Ordered mapping of parameter name to values; names are
            Hz-quoted record keys unless a custom builder interprets them
        metrics: Names from METRIC_SELECTORS
        builder: Maps a grid point to SystemParams; defaults to overriding
            the keys of base
        base: Base parameter set for the default builder
        threads: Worker threads

    Returns:
        DataFrame with one column per parameter, one per metric and the
        'unstable' flag, rows in row-major order

    Raises:
        GridSpecError: On an empty or non-finite range or unknown metric
        GridSizeError: If the grid exceeds MAX_GRID_POINTS
    """
    ranges = _validate_ranges(param_ranges)
    unknown = [m for m in metrics if m not in METRIC_SELECTORS]
    if unknown:
        raise GridSpecError(f"unknown metric '{unknown[0]}' (choose from {', '.join(METRIC_SELECTORS)})")
    if builder is None:
        if base is None:
            raise GridSpecError("grid_sweep needs a base parameter set or a builder")
        builder = record_builder(base)

    names = list(ranges)
    points: List[Dict[str, float]] = [
        dict(zip(names, (float(v) for v in combo))) for combo in product(*ranges.values())
    ]
    # parameter errors are input errors and surface before any work starts
    configurations = [builder(point) for point in points]

    logger.info("sweeping %d grid points over %s", len(points), ', '.join(names))
    evaluate = partial(evaluate_point, metrics=metrics)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as executor:
            rows = list(executor.map(evaluate, configurations))
    else:
        rows = [evaluate(params) for params in configurations]

    table = pd.DataFrame([{**point, **row} for point, row in zip(points, rows)],
                         columns=names + list(metrics) + [UNSTABLE_COLUMN])
    n_unstable = int(table[UNSTABLE_COLUMN].sum())
    if n_unstable:
        logger.warning("%d of %d grid points have no steady state", n_unstable, len(points))
    return table
