"""
Circular models: von Mises, axial von Mises and generalized von Mises

Parameter types validate their ranges on construction. Densities are
evaluated in log space and accept numpy arrays of angles.
"""

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import NamedTuple, Optional, Tuple, Union

import numpy as np
from scipy import special

from .special_functions import log_bessel_i0
from ..utils.exceptions import DomainError, SeriesConvergenceError, UnsupportedCaseError

ArrayLike = Union[float, np.ndarray]
Angle = ArrayLike

TWO_PI = 2.0 * np.pi
LOG_TWO_PI = float(np.log(TWO_PI))

SERIES_TOL = 1e-16
MAX_SERIES_TERMS = 500
_SERIES_BLOCK = 8
# series sums whose absolute terms exceed the result by this factor fall back to quadrature
CANCELLATION_RATIO = 1e2
QUADRATURE_NODES = 2048
_QUADRATURE_CHUNK = 256

DELTA_ZERO_TOL = 1e-12


def _scalar_or_array(value):
    return float(value) if np.ndim(value) == 0 else value


def _reduce(x, period: float):
    wrapped = np.mod(np.asarray(x, dtype=float), period)
    # np.mod can round tiny negative inputs up to the period itself
    wrapped = np.where(wrapped >= period, 0.0, wrapped)
    return _scalar_or_array(wrapped)


def reduce_2pi(x: Angle) -> Angle:
    """Map angles into [0, 2*pi)"""
    return _reduce(x, TWO_PI)


def reduce_pi(x: Angle) -> Angle:
    """Map angles into [0, pi)"""
    return _reduce(x, np.pi)


def circular_distance_pi(x: Angle, y: float) -> Angle:
    """Distance between points of the circle of circumference pi"""
    d = np.abs(np.asarray(reduce_pi(x)) - reduce_pi(y))
    return _scalar_or_array(np.minimum(d, np.pi - d))


def _check_kappa(name: str, value: float) -> None:
    if not np.isfinite(value) or value <= 0:
        raise DomainError(f"{name} must be a finite positive number, got {value!r}")


def _check_range(name: str, value: float, upper: float, label: str) -> None:
    if not (0.0 <= value < upper):
        raise DomainError(f"{name} must lie in [0, {label}), got {value!r}")


@dataclass(frozen=True)
class VMParams:
    """von Mises vM(mu, kappa)"""
    mu: float
    kappa: float

    def __post_init__(self):
        _check_range("mu", self.mu, TWO_PI, "2*pi")
        _check_kappa("kappa", self.kappa)

    @classmethod
    def from_unreduced(cls, mu: float, kappa: float) -> "VMParams":
        return cls(mu=reduce_2pi(mu), kappa=float(kappa))


@dataclass(frozen=True)
class VM2Params:
    """Axial von Mises vM2(mu, kappa) on [0, pi)"""
    mu: float
    kappa: float

    def __post_init__(self):
        _check_range("mu", self.mu, np.pi, "pi")
        _check_kappa("kappa", self.kappa)

    @classmethod
    def from_unreduced(cls, mu: float, kappa: float) -> "VM2Params":
        return cls(mu=reduce_pi(mu), kappa=float(kappa))


@dataclass(frozen=True)
class GvMParams:
    """Generalized von Mises GvM(mu1, mu2, kappa1, kappa2)"""
    mu1: float
    mu2: float
    kappa1: float
    kappa2: float

    def __post_init__(self):
        _check_range("mu1", self.mu1, TWO_PI, "2*pi")
        _check_range("mu2", self.mu2, np.pi, "pi")
        _check_kappa("kappa1", self.kappa1)
        _check_kappa("kappa2", self.kappa2)

    @classmethod
    def from_unreduced(cls, mu1: float, mu2: float, kappa1: float, kappa2: float) -> "GvMParams":
        """Build parameters from angles on the full line, e.g. GvM(pi, pi, 0.1, 5.5)"""
        return cls(mu1=reduce_2pi(mu1), mu2=reduce_pi(mu2),
                   kappa1=float(kappa1), kappa2=float(kappa2))

    @classmethod
    def from_delta(cls, mu1: float, delta: float, kappa1: float, kappa2: float) -> "GvMParams":
        """Parameters with mu2 = (mu1 - delta) mod pi"""
        return cls.from_unreduced(mu1, mu1 - delta, kappa1, kappa2)

    @property
    def delta(self) -> float:
        """Shift between the cosines, (mu1 - mu2) mod pi"""
        return reduce_pi(self.mu1 - self.mu2)


class ModeKind(str, Enum):
    UNIMODAL = "unimodal"
    BIMODAL = "bimodal"


@dataclass(frozen=True)
class ModeStructure:
    """Number and location of the modes of a GvM density"""
    kind: ModeKind
    modes: Tuple[float, ...]

    def __post_init__(self):
        expected = 1 if self.kind == ModeKind.UNIMODAL else 2
        if len(self.modes) != expected:
            raise ValueError(f"{self.kind.value} structure needs {expected} modes")


class SymmetryResidual(NamedTuple):
    """Coefficients of the trigonometric polynomial f(theta) - f(alpha - theta) in the exponent"""
    a1: float
    b1: float
    a2: float
    b2: float

    def max_abs(self) -> float:
        return max(abs(self.a1), abs(self.b1), abs(self.a2), abs(self.b2))


class AxialSymmetry(NamedTuple):
    symmetric: bool
    axis: Optional[float]


# ---------------------------------------------------------------------------
# Normalizing constant
# ---------------------------------------------------------------------------

def _series_coefficients(kappa1, kappa2) -> Tuple[np.ndarray, np.ndarray]:
    """Scaled Fourier-Bessel coefficients of G0.

    Returns ``base = e^{-k1-k2} I0(k1) I0(k2)`` and the matrix of
    ``e^{-k1-k2} I_2j(k1) I_j(k2)`` for j = 1..J, where the series is cut at the
    first term below SERIES_TOL times the partial sum.
    """
    k1 = np.asarray(kappa1, dtype=float)
    k2 = np.asarray(kappa2, dtype=float)
    base = special.i0e(k1) * special.i0e(k2)
    bound = np.array(base, dtype=float)
    alive = np.ones(bound.shape, dtype=bool)
    blocks = []

    for start in range(1, MAX_SERIES_TERMS + 1, _SERIES_BLOCK):
        j = np.arange(start, min(start + _SERIES_BLOCK, MAX_SERIES_TERMS + 1))
        terms = special.ive(2 * j, k1[..., None]) * special.ive(j, k2[..., None])
        partial = bound[..., None] + 2.0 * np.cumsum(terms, axis=-1)
        small = terms < SERIES_TOL * partial
        keep = alive[..., None] & (np.cumsum(small, axis=-1) == 0)
        terms = np.where(keep, terms, 0.0)
        bound = bound + 2.0 * terms.sum(axis=-1)
        blocks.append(terms)
        alive = alive & ~small.any(axis=-1)
        if not alive.any():
            return base, np.concatenate(blocks, axis=-1)

    raise SeriesConvergenceError(
        f"G0 series did not converge within {MAX_SERIES_TERMS} terms "
        f"(kappa1={kappa1!r}, kappa2={kappa2!r})"
    )


@lru_cache(maxsize=256)
def _cached_coefficients(kappa1: float, kappa2: float) -> Tuple[float, np.ndarray]:
    base, coeffs = _series_coefficients(kappa1, kappa2)
    coeffs.setflags(write=False)
    return float(base), coeffs


def _log_norm_const_quadrature(delta: np.ndarray, kappa1: np.ndarray, kappa2: np.ndarray,
                               nodes: int = QUADRATURE_NODES) -> np.ndarray:
    """log G0 by the max-shifted periodic trapezoid rule; 1-D arguments of equal length"""
    theta = np.arange(nodes) * (TWO_PI / nodes)
    out = np.empty(delta.shape, dtype=float)
    for start in range(0, delta.size, _QUADRATURE_CHUNK):
        sl = slice(start, start + _QUADRATURE_CHUNK)
        exponent = (kappa1[sl, None] * np.cos(theta)
                    + kappa2[sl, None] * np.cos(2.0 * (theta - delta[sl, None])))
        peak = exponent.max(axis=-1)
        out[sl] = peak + np.log(np.mean(np.exp(exponent - peak[:, None]), axis=-1))
    return out


def log_gvm_norm_const(delta, kappa1, kappa2) -> ArrayLike:
    """log G0(delta, kappa1, kappa2); kappas may be zero, all arguments broadcast.

    The Fourier-Bessel series is used unless its alternating terms cancel
    (delta near pi/2 with both kappas large); those entries are evaluated by
    the periodic trapezoid rule instead.
    """
    k1 = np.asarray(kappa1, dtype=float)
    k2 = np.asarray(kappa2, dtype=float)
    if np.any(k1 < 0) or np.any(k2 < 0):
        raise DomainError("Concentrations must be non-negative")
    d = np.asarray(delta, dtype=float)

    if k1.ndim == 0 and k2.ndim == 0:
        base, coeffs = _cached_coefficients(float(k1), float(k2))
    else:
        base, coeffs = _series_coefficients(k1, k2)

    j = np.arange(1, coeffs.shape[-1] + 1)
    scaled = base + 2.0 * np.sum(coeffs * np.cos(2.0 * j * d[..., None]), axis=-1)
    magnitude = base + 2.0 * np.sum(coeffs, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_value = k1 + k2 + np.log(scaled)
        cancelled = ~(scaled * CANCELLATION_RATIO > magnitude)

    if not np.any(cancelled):
        return _scalar_or_array(log_value)

    shape = np.broadcast(d, k1, k2).shape
    flat = np.array(np.broadcast_to(log_value, shape), dtype=float).reshape(-1)
    mask = np.broadcast_to(cancelled, shape).reshape(-1)
    d_c, k1_c, k2_c = (np.broadcast_to(a, shape).reshape(-1)[mask] for a in (d, k1, k2))
    flat[mask] = _log_norm_const_quadrature(d_c, k1_c, k2_c)
    return _scalar_or_array(flat.reshape(shape))


def gvm_norm_const(delta, kappa1, kappa2) -> ArrayLike:
    """G0(delta, kappa1, kappa2) by its Fourier-Bessel series"""
    return _scalar_or_array(np.exp(log_gvm_norm_const(delta, kappa1, kappa2)))


# ---------------------------------------------------------------------------
# Densities
# ---------------------------------------------------------------------------

def gvm_log_density(theta: Angle, p: GvMParams) -> ArrayLike:
    """Log density of GvM(mu1, mu2, kappa1, kappa2) at theta"""
    theta = np.asarray(theta, dtype=float)
    log_norm = LOG_TWO_PI + log_gvm_norm_const(p.delta, p.kappa1, p.kappa2)
    value = (p.kappa1 * np.cos(theta - p.mu1)
             + p.kappa2 * np.cos(2.0 * (theta - p.mu2))
             - log_norm)
    return _scalar_or_array(value)


def vm_log_density(theta: Angle, p: VMParams) -> ArrayLike:
    """Log density of vM(mu, kappa) at theta"""
    theta = np.asarray(theta, dtype=float)
    value = p.kappa * np.cos(theta - p.mu) - LOG_TWO_PI - log_bessel_i0(p.kappa)
    return _scalar_or_array(value)


def vm2_log_density(theta: Angle, p: VM2Params) -> ArrayLike:
    """Log density of vM2(mu, kappa) on [0, pi)"""
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < 0) or np.any(theta >= np.pi):
        raise DomainError("vM2 density is defined on [0, pi) only")
    return _scalar_or_array(_vm2_log_density_periodic(theta, p.mu, p.kappa))


def _vm2_log_density_periodic(theta, mu: float, kappa: float):
    # pi-periodic extension, used for integrating over neighbourhoods that wrap
    return kappa * np.cos(2.0 * (np.asarray(theta, dtype=float) - mu)) - np.log(np.pi) - log_bessel_i0(kappa)


def trig_moment(p: GvMParams, order: int = 1, nodes: int = 4096) -> complex:
    """E[exp(i*order*theta)] under GvM by the periodic trapezoid rule"""
    theta = np.arange(nodes) * (TWO_PI / nodes)
    weights = np.exp(gvm_log_density(theta, p))
    return complex(np.mean(weights * np.exp(1j * order * theta)) * TWO_PI)


# ---------------------------------------------------------------------------
# Structure
# ---------------------------------------------------------------------------

def _delta_is_zero(delta: float) -> bool:
    return delta <= DELTA_ZERO_TOL or np.pi - delta <= DELTA_ZERO_TOL


def classify_modes(p: GvMParams) -> ModeStructure:
    """Unimodal or bimodal structure of a GvM with no shift between cosines"""
    if not _delta_is_zero(p.delta):
        raise UnsupportedCaseError(
            f"Mode classification is only available for delta = 0, got {p.delta!r}"
        )
    if p.kappa1 < 4.0 * p.kappa2:
        return ModeStructure(ModeKind.BIMODAL, (p.mu1, reduce_2pi(p.mu1 + np.pi)))
    return ModeStructure(ModeKind.UNIMODAL, (p.mu1,))


def axial_symmetry_residual(p: GvMParams, alpha: float) -> SymmetryResidual:
    """Coefficients that all vanish iff the density is symmetric about alpha/2"""
    a1 = p.kappa1 * (np.cos(p.mu1) - np.cos(alpha - p.mu1))
    b1 = p.kappa1 * (np.sin(p.mu1) - np.sin(alpha - p.mu1))
    a2 = p.kappa2 * (np.cos(2 * p.mu2) - np.cos(2 * (alpha - p.mu2)))
    b2 = p.kappa2 * (np.sin(2 * p.mu2) - np.sin(2 * (alpha - p.mu2)))
    return SymmetryResidual(float(a1), float(b1), float(a2), float(b2))


def is_axially_symmetric(p: GvMParams, tol: float) -> AxialSymmetry:
    """GvM is axially symmetric iff delta is 0 or pi/2; the axis is then mu1"""
    if tol <= 0:
        raise DomainError(f"Tolerance must be positive, got {tol!r}")
    delta = p.delta
    gap = min(delta, abs(delta - np.pi / 2), np.pi - delta)
    if gap <= tol:
        return AxialSymmetry(True, p.mu1)
    return AxialSymmetry(False, None)
