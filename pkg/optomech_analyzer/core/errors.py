"""
Error hierarchy
Validation problems derive from ValueError, numerical failures from ArithmeticError
"""

from typing import Optional


class OptomechError(Exception):
    """Base class for every error raised by the package"""


# ===================
# VALIDATION ERRORS (exit code 1)
# ===================

class ValidationError(OptomechError, ValueError):
    """Input does not satisfy a documented precondition"""


class SchemaError(ValidationError):
    """A JSON record is missing a key, carries an unknown key, or has a bad value"""

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(message)
        self.key = key


class ParseError(ValidationError):
    """A data file could not be parsed"""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MonotonicityError(ParseError):
    """Frequencies are not strictly increasing"""


class NaNDataError(ParseError):
    """A data value is NaN or infinite"""


class GridSpecError(ValidationError):
    """Frequency or parameter grid is ill-specified"""


class GridSizeError(GridSpecError):
    """Requested sweep grid is too large"""


class EmptyWindowError(ValidationError):
    """No data bins survive the fit window and exclusion bands"""


class DegenerateCouplingError(ValidationError):
    """Both optomechanical couplings vanish"""


class DegenerateSplittingError(ValidationError):
    """The two mechanical frequencies coincide"""


class UndefinedAngleError(ValidationError):
    """Polarization angle is undefined for g_y = 0"""


class ShapeError(ValidationError):
    """Array shapes are inconsistent with the requested operation"""


# ===================
# NUMERICAL ERRORS (exit code 2)
# ===================

class NumericalError(OptomechError, ArithmeticError):
    """A computation failed or produced a result outside its domain"""


class PoleError(NumericalError):
    """Undamped susceptibility evaluated on its pole"""


class InstabilityError(NumericalError):
    """Drift matrix is not stable, so no steady state exists"""

    def __init__(self, message: str, spectral_abscissa: Optional[float] = None):
        super().__init__(message)
        self.spectral_abscissa = spectral_abscissa


class SingularResponseError(NumericalError):
    """Frequency response matrix is singular"""


class NotPositiveDefiniteError(NumericalError):
    """Covariance matrix is not positive definite"""


class UnphysicalStateError(NumericalError):
    """Covariance matrix violates the uncertainty principle"""


class ComplexEigenvalueError(UnphysicalStateError):
    """Symplectic eigenvalues are complex"""


class DiscordConditionError(NumericalError):
    """Closed-form Gaussian discord is not applicable to this state"""


class DegenerateDiscordError(NumericalError):
    """Measured subsystem is pure, so the closed-form discord is undefined"""


class SimulationDivergenceError(NumericalError):
    """Stochastic integration left the finite range"""


class InsufficientSamplesError(NumericalError):
    """Too few samples for a reliable estimate"""


def exit_code_for(error: BaseException) -> int:
    """
    Map an exception to the command-line exit code

    Args:
        error: Raised exception

    Returns:
        1 for validation problems, 2 for numerical failures
    """
    if isinstance(error, NumericalError):
        return 2
    return 1
