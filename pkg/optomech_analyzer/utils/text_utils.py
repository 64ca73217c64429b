"""
Text utility functions for human-readable reports
"""
import math
from typing import Optional


HUMAN_DIGITS = 6


def format_sig(value: Optional[float], digits: int = HUMAN_DIGITS) -> str:
    """
    Format a number with a fixed count of significant digits

    Args:
        value: Number to format
        digits: Significant digits

    Returns:
        Formatted string, 'N/A' for None and 'nan'/'inf' passed through
    """
    if value is None:
        return 'N/A'
    value = float(value)
    if not math.isfinite(value):
        return str(value)
    return f"{value:.{digits}g}"


def format_with_errors(value: float, stat: float = 0.0, syst: float = 0.0,
                       digits: int = HUMAN_DIGITS) -> str:
    """value ± stat (± syst when nonzero), as quoted in the fit tables"""
    text = f"{format_sig(value, digits)} ± {format_sig(stat, 2)}"
    if syst:
        text += f" ± {format_sig(syst, 2)}"
    return text


def format_hz(value_hz: float, digits: int = HUMAN_DIGITS) -> str:
    """Frequency with a kHz suffix when large"""
    if abs(value_hz) >= 1e3:
        return f"{format_sig(value_hz / 1e3, digits)} kHz"
    return f"{format_sig(value_hz, digits)} Hz"


def format_angle_deg(angle_rad: float, digits: int = 4) -> str:
    return f"{format_sig(math.degrees(angle_rad), digits)}°"


def banner(title: str, width: int = 60) -> str:
    """Title block framed by '=' rules"""
    rule = "=" * width
    return f"{rule}\n{title}\n{rule}"
