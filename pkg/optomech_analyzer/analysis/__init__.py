"""Spectrum, steady-state and Gaussian-state analysis"""

from .steady_state import (
    BASIS,
    MECHANICAL_BASIS,
    STABILITY_MARGIN,
    StabilityStatus,
    StabilityReport,
    SteadyState,
    build_drift,
    build_diffusion,
    check_stability,
    solve_lyapunov,
    lyapunov_residual,
    mechanical_block,
    compute_steady_state,
    spectral_abscissa,
)

from .spectrum import (
    SPECTRUM_COLUMNS,
    SpectrumDecomposition,
    SidebandLabels,
    weighted_bright_psd,
    symmetrized_bright_psd,
    heterodyne_decomposition,
    heterodyne_psd,
    transfer_matrix_psd,
    spectrum_grid,
    sideband_labels,
    sideband_peaks,
)

from .gaussian_info import (
    Mode,
    DiscordDirection,
    SymplecticData,
    AngleMaximum,
    occupancy,
    purity,
    symplectic_data,
    entropy_function,
    mutual_information,
    discord_condition,
    discord,
    ground_state_probability,
    ground_state_probability_quadrature,
    rotation_matrix,
    normalization_matrix,
    rotate_frame,
    max_discord_over_angle,
    overlap_parameter,
)

from .state_calculator import (
    METRIC_NAMES,
    StateMetrics,
    MetricWithErrors,
    MetricsReport,
    StateMetricsCalculator,
    characterize,
    characterize_group,
)

__all__ = [
    'BASIS',
    'MECHANICAL_BASIS',
    'STABILITY_MARGIN',
    'StabilityStatus',
    'StabilityReport',
    'SteadyState',
    'build_drift',
    'build_diffusion',
    'check_stability',
    'solve_lyapunov',
    'lyapunov_residual',
    'mechanical_block',
    'compute_steady_state',
    'spectral_abscissa',
    'SPECTRUM_COLUMNS',
    'SpectrumDecomposition',
    'SidebandLabels',
    'weighted_bright_psd',
    'symmetrized_bright_psd',
    'heterodyne_decomposition',
    'heterodyne_psd',
    'transfer_matrix_psd',
    'spectrum_grid',
    'sideband_labels',
    'sideband_peaks',
    'Mode',
    'DiscordDirection',
    'SymplecticData',
    'AngleMaximum',
    'occupancy',
    'purity',
    'symplectic_data',
    'entropy_function',
    'mutual_information',
    'discord_condition',
    'discord',
    'ground_state_probability',
    'ground_state_probability_quadrature',
    'rotation_matrix',
    'normalization_matrix',
    'rotate_frame',
    'max_discord_over_angle',
    'overlap_parameter',
    'METRIC_NAMES',
    'StateMetrics',
    'MetricWithErrors',
    'MetricsReport',
    'StateMetricsCalculator',
    'characterize',
    'characterize_group',
]
