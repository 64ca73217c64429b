"""
Plots
PNG figures of spectra, simulated PSDs and overlap maps for quick checks.
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd


logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _save(fig, output_path: PathLike) -> Path:
    plt = _pyplot()
    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(output_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    logger.info("figure saved to %s", output_path)
    return output_path


def plot_spectrum(decomposition, output_path: PathLike, title: str = "Heterodyne spectrum") -> Path:
    """Total spectrum and its three terms on a log scale, frequency in kHz"""
    plt = _pyplot()
    table = decomposition.to_frame()
    freq_khz = table['freq_hz'] / 1e3

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.semilogy(freq_khz, table['total'], color='black', label='total')
    for column, label in (('term_gx', 'Γ_x'), ('term_gy', 'Γ_y'), ('term_quantum', 'quantum')):
        values = table[column].to_numpy()
        if np.any(values > 0):
            ax.semilogy(freq_khz, np.where(values > 0, values, np.nan), lw=0.8, label=label)
    ax.set_xlabel("Frequency from LO (kHz)")
    ax.set_ylabel("PSD (shot-noise units)")
    ax.set_title(title)
    ax.legend()
    return _save(fig, output_path)


def plot_psd_comparison(table: pd.DataFrame, output_path: PathLike,
                        title: str = "Simulated bright-mode PSD") -> Path:
    """Columns freq_hz, psd_sim, psd_model"""
    plt = _pyplot()
    positive = table['freq_hz'] > 0
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.loglog(table.loc[positive, 'freq_hz'], table.loc[positive, 'psd_sim'], label='Welch estimate')
    ax.loglog(table.loc[positive, 'freq_hz'], table.loc[positive, 'psd_model'], 'k--', label='steady-state model')
    ax.set_xlabel("Frequency (Hz)")
    ax.set_ylabel("One-sided PSD")
    ax.set_title(title)
    ax.legend()
    return _save(fig, output_path)


def plot_overlap_map(table: pd.DataFrame, output_path: PathLike) -> Path:
    """
    Purity and symmetrized discord over overlap s and decoherence rate Γ

    NaN cells (unstable, or no closed-form discord) are left blank.
    """
    plt = _pyplot()
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
    for ax, column, label in ((axes[0], 'purity', 'Purity'), (axes[1], 'discord_sym', 'Discord (symmetrized)')):
        grid = table.pivot(index='gamma_hz', columns='s', values=column)
        mesh = ax.pcolormesh(grid.columns, grid.index, grid.to_numpy(dtype=float), shading='auto')
        fig.colorbar(mesh, ax=ax, label=label)
        ax.set_xlabel("Overlap s")
        ax.set_title(label)
    gammas = table['gamma_hz'].to_numpy()
    if gammas.min() > 0 and gammas.max() / gammas.min() > 100:
        axes[0].set_yscale('log')
    axes[0].set_ylabel("Γ (Hz)")
    return _save(fig, output_path)
