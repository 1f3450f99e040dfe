"""
Modified Bessel functions of the first kind for integer order

Thin guards around the exponentially scaled Cephes routines of
``scipy.special``, which switch between the power series and the large-argument
expansion internally. Only non-negative real arguments are supported.
"""

from typing import Union

import numpy as np
from scipy import special

from ..utils.exceptions import BesselOverflowError, DomainError, InvalidOrderError

ArrayLike = Union[float, np.ndarray]

# exp(700) is close to the largest finite double
MAX_UNSCALED_ARGUMENT = 700.0


def _check_order(nu) -> np.ndarray:
    order = np.asarray(nu)
    if order.dtype.kind not in "iu":
        if not np.all(np.equal(np.mod(order, 1), 0)):
            raise InvalidOrderError(f"Bessel order must be an integer, got {nu!r}")
        order = order.astype(np.int64)
    if np.any(order < 0):
        raise InvalidOrderError(f"Bessel order must be non-negative, got {nu!r}")
    return order


def _check_argument(z) -> np.ndarray:
    arg = np.asarray(z, dtype=float)
    if np.any(~np.isfinite(arg)) or np.any(arg < 0):
        raise DomainError(f"Bessel argument must be finite and non-negative, got {z!r}")
    return arg


def bessel_i(nu, z) -> ArrayLike:
    """I_nu(z) for integer nu >= 0 and 0 <= z <= 700"""
    order = _check_order(nu)
    arg = _check_argument(z)
    if np.any(arg > MAX_UNSCALED_ARGUMENT):
        raise BesselOverflowError(
            f"I_nu(z) overflows for z > {MAX_UNSCALED_ARGUMENT:g}; use log_bessel_i0 or bessel_ie"
        )
    value = special.iv(order, arg)
    return float(value) if np.ndim(value) == 0 else value


def bessel_ie(nu, z) -> ArrayLike:
    """Exponentially scaled e^{-z} I_nu(z); finite for every z >= 0"""
    order = _check_order(nu)
    arg = _check_argument(z)
    value = special.ive(order, arg)
    return float(value) if np.ndim(value) == 0 else value


def log_bessel_i0(z) -> ArrayLike:
    """log I_0(z), stable for arguments far beyond the overflow range of I_0"""
    arg = _check_argument(z)
    value = np.log(special.i0e(arg)) + arg
    return float(value) if np.ndim(value) == 0 else value


def bessel_ratio(nu: int, z: float) -> float:
    """A_nu(z) = I_nu(z) / I_0(z), the mean resultant length of vM(., z) at order nu"""
    order = int(_check_order(nu))
    arg = float(_check_argument(z))
    if arg == 0.0:
        return 1.0 if order == 0 else 0.0
    return float(special.ive(order, arg) / special.i0e(arg))


def inverse_bessel_ratio(r: float) -> float:
    """Approximate kappa with A_1(kappa) = r (piecewise formula of Fisher, 1993)"""
    if not 0.0 <= r < 1.0:
        raise DomainError(f"Mean resultant length must lie in [0, 1), got {r!r}")
    if r < 0.53:
        return 2 * r + r**3 + 5 * r**5 / 6
    if r < 0.85:
        return -0.4 + 1.39 * r + 0.43 / (1 - r)
    return 1.0 / (r**3 - 4 * r**2 + 3 * r)
