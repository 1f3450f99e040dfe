"""
Likelihoods of the tested GvM parameters

The GvM is an exponential family in (cos t, sin t, cos 2t, sin 2t), so a
``Sample`` keeps the four trigonometric sums and every log-likelihood below is
evaluated from them. The tested parameter may be an array; the result then
has the same shape, one value per tested point.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..circular.models import (
    LOG_TWO_PI,
    GvMParams,
    _check_kappa,
    log_gvm_norm_const,
    reduce_2pi,
    reduce_pi,
)
from ..utils.exceptions import DomainError, MissingNuisanceError


@dataclass(frozen=True, eq=False)
class Sample:
    """Observed angles, reduced to [0, 2*pi), with cached trigonometric sums"""
    angles: np.ndarray
    cos1: float = field(init=False, repr=False)
    sin1: float = field(init=False, repr=False)
    cos2: float = field(init=False, repr=False)
    sin2: float = field(init=False, repr=False)

    def __post_init__(self):
        raw = np.asarray(self.angles, dtype=float).ravel()
        if not np.all(np.isfinite(raw)):
            raise DomainError("Sample angles must be finite")
        angles = np.asarray(reduce_2pi(raw), dtype=float).reshape(-1)
        angles.setflags(write=False)
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "cos1", float(np.cos(angles).sum()))
        object.__setattr__(self, "sin1", float(np.sin(angles).sum()))
        object.__setattr__(self, "cos2", float(np.cos(2.0 * angles).sum()))
        object.__setattr__(self, "sin2", float(np.sin(2.0 * angles).sum()))

    @classmethod
    def from_degrees(cls, degrees) -> "Sample":
        return cls(np.deg2rad(np.asarray(degrees, dtype=float)))

    @property
    def n(self) -> int:
        return int(self.angles.size)

    def __len__(self) -> int:
        return self.n

    def concat(self, other: "Sample") -> "Sample":
        return Sample(np.concatenate([self.angles, other.angles]))

    def cos_sum(self, order: int, mu):
        """sum_i cos(order * (theta_i - mu)); mu may be an array"""
        if order == 1:
            c, s = self.cos1, self.sin1
        elif order == 2:
            c, s = self.cos2, self.sin2
        else:
            raise DomainError(f"Only orders 1 and 2 are cached, got {order}")
        angle = order * np.asarray(mu, dtype=float)
        return c * np.cos(angle) + s * np.sin(angle)

    def resultant(self, order: int) -> complex:
        """Mean resultant vector of order 1 or 2"""
        if self.n == 0:
            return 0j
        if order == 1:
            return complex(self.cos1, self.sin1) / self.n
        if order == 2:
            return complex(self.cos2, self.sin2) / self.n
        raise DomainError(f"Only orders 1 and 2 are cached, got {order}")


@dataclass(frozen=True)
class FixedNuisance:
    """Known values of the parameters that are not under test.

    The delta tests need mu1_0, kappa1_0 and kappa2_0; the kappa2 test needs
    mu1_0, mu2_0 and kappa1_0.
    """
    mu1_0: float
    kappa1_0: float
    kappa2_0: Optional[float] = None
    mu2_0: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "mu1_0", reduce_2pi(self.mu1_0))
        _check_kappa("kappa1_0", self.kappa1_0)
        if self.kappa2_0 is not None:
            _check_kappa("kappa2_0", self.kappa2_0)
        if self.mu2_0 is not None:
            object.__setattr__(self, "mu2_0", reduce_pi(self.mu2_0))

    @classmethod
    def for_delta_test(cls, mu1: float, kappa1: float, kappa2: float) -> "FixedNuisance":
        return cls(mu1_0=mu1, kappa1_0=kappa1, kappa2_0=kappa2)

    @classmethod
    def for_kappa2_test(cls, mu1: float, mu2: float, kappa1: float) -> "FixedNuisance":
        return cls(mu1_0=mu1, kappa1_0=kappa1, mu2_0=mu2)

    @property
    def delta0(self) -> float:
        if self.mu2_0 is None:
            raise MissingNuisanceError("mu2_0 is required for the kappa2 test")
        return reduce_pi(self.mu1_0 - self.mu2_0)

    def require_kappa2(self) -> float:
        if self.kappa2_0 is None:
            raise MissingNuisanceError("kappa2_0 is required for the delta tests")
        return self.kappa2_0

    def params_at_delta(self, delta: float) -> GvMParams:
        return GvMParams.from_delta(self.mu1_0, delta, self.kappa1_0, self.require_kappa2())


def _scalar_or_array(value):
    return float(value) if np.ndim(value) == 0 else value


def gvm_loglik(sample: Sample, mu1, mu2, kappa1, kappa2):
    """Full GvM log-likelihood from the cached sums; mu1, mu2 need not be reduced"""
    n = sample.n
    log_norm = log_gvm_norm_const(np.subtract(mu1, mu2), kappa1, kappa2) if n else 0.0
    value = (-n * LOG_TWO_PI - n * log_norm
             + np.multiply(kappa1, sample.cos_sum(1, mu1))
             + np.multiply(kappa2, sample.cos_sum(2, mu2)))
    return _scalar_or_array(value)


def loglik_delta(sample: Sample, delta_prime, nuis: FixedNuisance):
    """log f(theta | delta') with mu1, kappa1, kappa2 fixed and mu2 = mu1 - delta'"""
    d = np.asarray(delta_prime, dtype=float)
    return gvm_loglik(sample, nuis.mu1_0, nuis.mu1_0 - d, nuis.kappa1_0, nuis.require_kappa2())


def loglik_kappa2(sample: Sample, kappa2_prime, nuis: FixedNuisance):
    """log f(theta | kappa2') with mu1, mu2, kappa1 fixed; kappa2' = 0 is the vM likelihood"""
    k2 = np.asarray(kappa2_prime, dtype=float)
    if np.any(k2 < 0) or not np.all(np.isfinite(k2)):
        raise DomainError("kappa2' must be finite and non-negative")
    mu2 = nuis.mu1_0 - nuis.delta0
    return gvm_loglik(sample, nuis.mu1_0, mu2, nuis.kappa1_0, k2)
