"""
PSD file reader for heterodyne spectra
Reads shot-noise-normalized, shot-subtracted PSD samples from CSV files
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from ..core import (
    ParseError,
    SchemaError,
    MonotonicityError,
    NaNDataError,
)


logger = logging.getLogger(__name__)

FREQ_COLUMN = 'freq_hz'
PSD_COLUMNS = ('psd', 'total')
TOTAL_COLUMN = 'total'
TERM_COLUMNS = ('term_gx', 'term_gy', 'term_quantum')
SHOT_FLOOR_TOL = 1e-9


@dataclass
class SpectrumData:
    """
    Measured or synthetic heterodyne PSD of one acquisition

    Frequencies are relative to the local oscillator (Hz). The PSD is
    normalized to shot noise with the shot-noise floor subtracted.
    """
    freq_hz: np.ndarray
    psd: np.ndarray
    acquisition_id: str = ""
    dark_noise_subtracted: bool = True
    shot_normalized: bool = True

    def __post_init__(self):
        self.freq_hz = np.asarray(self.freq_hz, dtype=float)
        self.psd = np.asarray(self.psd, dtype=float)
        if self.freq_hz.shape != self.psd.shape or self.freq_hz.ndim != 1:
            raise ParseError(
                f"frequency and PSD columns must be 1-D and equal length, "
                f"got {self.freq_hz.shape} and {self.psd.shape}")
        validate_samples(self.freq_hz, self.psd)

    def __len__(self) -> int:
        return self.freq_hz.size

    @property
    def ready_for_fit(self) -> bool:
        return self.dark_noise_subtracted and self.shot_normalized

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({FREQ_COLUMN: self.freq_hz, 'psd': self.psd})


def validate_samples(freq_hz: np.ndarray, psd: np.ndarray, first_line: int = 2) -> None:
    """
    Check finiteness and strict monotonicity

    Args:
        freq_hz: Frequencies
        psd: PSD values
        first_line: File line number of the first sample, for messages

    Raises:
        NaNDataError: On a NaN or infinite value
        MonotonicityError: If frequencies are not strictly increasing
    """
    for name, column in ((FREQ_COLUMN, freq_hz), ('psd', psd)):
        bad = np.flatnonzero(~np.isfinite(column))
        if bad.size:
            raise NaNDataError(f"non-finite {name} value {column[bad[0]]}", line=first_line + int(bad[0]))

    steps = np.diff(freq_hz)
    bad = np.flatnonzero(steps <= 0)
    if bad.size:
        i = int(bad[0]) + 1
        raise MonotonicityError(
            f"frequency {freq_hz[i]} does not exceed previous value {freq_hz[i - 1]}",
            line=first_line + i)


class PSDReader:
    """
    Reads PSD CSV files with a header line and a 'freq_hz' column plus
    either a 'psd' column or the 'total' column of a spectrum export
    """

    def __init__(self, file_path: Union[str, Path]):
        """
        Initialize reader

        Args:
            file_path: Path to CSV file
        """
        self.file_path = Path(file_path)
        self.raw_df: Optional[pd.DataFrame] = None

    def read(self) -> pd.DataFrame:
        """
        Read the CSV file with round-trip float parsing

        Returns:
            Raw DataFrame

        Raises:
            FileNotFoundError: If file doesn't exist
            ParseError: If the file cannot be parsed
        """
        if not self.file_path.exists():
            raise FileNotFoundError(f"File not found: {self.file_path}")

        try:
            self.raw_df = pd.read_csv(self.file_path, float_precision='round_trip')
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            raise ParseError(f"cannot parse {self.file_path}: {e}") from e
        return self.raw_df

    def psd_column(self) -> str:
        """Name of the PSD column to use"""
        columns = [str(c).strip() for c in self.raw_df.columns]
        if FREQ_COLUMN not in columns:
            raise SchemaError(f"{self.file_path}: missing '{FREQ_COLUMN}' column in header", key=FREQ_COLUMN)
        for name in PSD_COLUMNS:
            if name in columns:
                return name
        raise SchemaError(f"{self.file_path}: missing 'psd' column in header", key='psd')

    def _numeric_column(self, name: str) -> np.ndarray:
        column = self.raw_df[name]
        if pd.api.types.is_numeric_dtype(column):
            return column.to_numpy(dtype=float)

        # locate the first entry that is neither a number nor a NaN marker
        for idx, raw in enumerate(column):
            if isinstance(raw, float):
                continue
            try:
                float(str(raw).strip())
            except ValueError:
                raise ParseError(f"cannot parse {name} value {raw!r}", line=idx + 2)
        return pd.to_numeric(column).to_numpy(dtype=float)

    def _export_signal(self, total: np.ndarray) -> np.ndarray:
        """
        Shot-subtracted signal of a spectrum export

        The 'total' column of an export holds the sum of the three term
        columns, plus the shot-noise floor of 1 unless the export was
        shot-subtracted. Both layouts return the bare sum of the terms.

        Raises:
            SchemaError: If a term column is missing
            NaNDataError: On a non-finite term value
            ParseError: If 'total' matches neither layout
        """
        missing = [name for name in TERM_COLUMNS if name not in self.raw_df.columns]
        if missing:
            raise SchemaError(
                f"{self.file_path}: a '{TOTAL_COLUMN}' column needs the term columns; "
                f"missing '{missing[0]}'", key=missing[0])

        terms = [self._numeric_column(name) for name in TERM_COLUMNS]
        for name, column in zip(TERM_COLUMNS, terms):
            bad = np.flatnonzero(~np.isfinite(column))
            if bad.size:
                raise NaNDataError(f"non-finite {name} value {column[bad[0]]}", line=2 + int(bad[0]))
        signal = terms[0] + terms[1] + terms[2]

        floor = total - signal
        atol = SHOT_FLOOR_TOL * max(1.0, float(np.max(np.abs(total))))
        if np.allclose(floor, 1.0, rtol=0.0, atol=atol):
            logger.info("%s: removed the shot-noise floor from the '%s' column", self.file_path, TOTAL_COLUMN)
        elif not np.allclose(floor, 0.0, rtol=0.0, atol=atol):
            raise ParseError(
                f"{self.file_path}: '{TOTAL_COLUMN}' is neither the sum of the term columns "
                f"nor that sum plus the shot-noise floor")
        return signal

    def to_spectrum(self, acquisition_id: Optional[str] = None) -> SpectrumData:
        """
        Convert the raw frame to validated SpectrumData

        Raises:
            ParseError, NaNDataError, MonotonicityError, SchemaError
        """
        if self.raw_df is None:
            self.read()
        self.raw_df.columns = [str(c).strip() for c in self.raw_df.columns]
        psd_name = self.psd_column()

        freq = self._numeric_column(FREQ_COLUMN)
        psd = self._numeric_column(psd_name)
        validate_samples(freq, psd)
        if psd_name == TOTAL_COLUMN:
            psd = self._export_signal(psd)

        logger.debug("loaded %d samples from %s (column '%s')", freq.size, self.file_path, psd_name)
        return SpectrumData(
            freq_hz=freq,
            psd=psd,
            acquisition_id=acquisition_id or self.file_path.stem,
        )


def load_psd(path: Union[str, Path], acquisition_id: Optional[str] = None) -> SpectrumData:
    """
    Load one acquisition from CSV

    Args:
        path: CSV file with header 'freq_hz,psd'
        acquisition_id: Label; defaults to the file stem

    Returns:
        SpectrumData
    """
    return PSDReader(path).to_spectrum(acquisition_id)
