"""
Exception hierarchy for the GvM symmetry toolkit

Every error carries the process exit code the CLI reports for it.
"""

from typing import List, Optional


class GvMError(Exception):
    """Base class for all toolkit errors"""
    exit_code: int = 1


class ConfigError(GvMError):
    """Invalid configuration file or run options"""
    exit_code = 2


class DataFileError(GvMError):
    """Angle file could not be read"""
    exit_code = 3


class AngleParseError(GvMError):
    """Angle file was read but holds no usable angles"""
    exit_code = 4


class ConvergenceError(GvMError):
    """Likelihood maximization did not converge"""
    exit_code = 5


class NumericalError(GvMError):
    """A numerical routine could not produce a trustworthy value"""
    exit_code = 6


class BesselOverflowError(NumericalError):
    """Argument too large for an unscaled Bessel value"""


class SeriesConvergenceError(NumericalError):
    """Fourier-Bessel series terms failed to decay"""


class DegenerateEstimateError(NumericalError):
    """Every Monte Carlo draw fell inside the null neighbourhood"""


class RejectionCapError(NumericalError):
    """Rejection sampler hit its consecutive-rejection cap"""


class MissingNuisanceError(GvMError):
    """A test was requested without the fixed nuisance values it needs"""
    exit_code = 7


class UnknownCaseError(GvMError, KeyError):
    """Study case name is not one of the built-in cases"""
    exit_code = 8

    def __str__(self) -> str:
        return Exception.__str__(self)


class InvalidOrderError(GvMError, ValueError):
    """Bessel order is negative or not an integer"""
    exit_code = 2


class DomainError(GvMError, ValueError):
    """Argument lies outside the domain of the function"""
    exit_code = 2


class PriorMismatchError(GvMError, ValueError):
    """Prior variant does not fit the requested test"""
    exit_code = 2


class UnsupportedCaseError(GvMError, ValueError):
    """Operation is only defined for a special parameter configuration"""
    exit_code = 2


class InsufficientDataError(GvMError, ValueError):
    """Too few values for the requested summary"""
    exit_code = 6


class StudyInterrupted(GvMError):
    """A study run was interrupted; keeps what was computed so far"""
    exit_code = 130

    def __init__(self, case: str, completed: int, partial_b01: List[float],
                 sequence: Optional[int] = None):
        super().__init__(f"Study {case} interrupted after {completed} replicates")
        self.case = case
        self.completed = completed
        self.partial_b01 = partial_b01
        self.sequence = sequence


class RecordParseError(GvMError, ValueError):
    """Structured output line could not be parsed"""
    exit_code = 4
