"""
Random generation for vM, vM2, GvM and the priors of the tested parameters

All samplers draw from an explicit ``numpy.random.Generator``. Streams are
derived from an ``RngSeed`` with a spawn key so that replicate ``i`` of
sequence ``j`` always sees the same PCG64 stream, whatever the worker layout.
"""

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import special

from .models import (
    TWO_PI,
    GvMParams,
    VM2Params,
    VMParams,
    _vm2_log_density_periodic,
    gvm_log_density,
    log_gvm_norm_const,
    reduce_2pi,
    reduce_pi,
)
from .special_functions import log_bessel_i0
from ..utils.exceptions import DomainError, RejectionCapError

SampleOut = Union[float, np.ndarray]

# Below this concentration the exact wrapped-Cauchy constant loses all digits
_SMALL_KAPPA = 1.2e-4
MAX_CONSECUTIVE_REJECTIONS = 10_000_000
_MAX_BATCH = 1_000_000
STRATIFIED_GRID = 1 << 16


@dataclass(frozen=True)
class RngSeed:
    """Base seed of a reproducible family of PCG64 streams"""
    seed: int

    def __post_init__(self):
        if not isinstance(self.seed, (int, np.integer)) or not 0 <= int(self.seed) < 2**64:
            raise DomainError(f"Seed must be an unsigned 64-bit integer, got {self.seed!r}")

    def generator(self, *keys: int) -> np.random.Generator:
        """Independent stream identified by (seed, *keys)"""
        sequence = np.random.SeedSequence(entropy=int(self.seed), spawn_key=tuple(int(k) for k in keys))
        return np.random.Generator(np.random.PCG64(sequence))


@dataclass(frozen=True)
class MixtureVM2Prior:
    """xi * vM2(comp1) + (1 - xi) * vM2(comp2)"""
    xi: float
    comp1: VM2Params
    comp2: VM2Params

    def __post_init__(self):
        if not 0.0 <= self.xi <= 1.0:
            raise DomainError(f"Mixture weight must lie in [0, 1], got {self.xi!r}")

    def log_density(self, delta) -> SampleOut:
        """Log density, extended pi-periodically to the whole line"""
        parts = np.stack([
            _vm2_log_density_periodic(delta, self.comp1.mu, self.comp1.kappa),
            _vm2_log_density_periodic(delta, self.comp2.mu, self.comp2.kappa),
        ])
        weights = np.array([self.xi, 1.0 - self.xi]).reshape((2,) + (1,) * (parts.ndim - 1))
        value = special.logsumexp(parts, axis=0, b=weights)
        return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class UniformPrior:
    """Uniform distribution on [lo, hi]"""
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"Uniform prior needs lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def log_density(self, x) -> SampleOut:
        x = np.asarray(x, dtype=float)
        inside = (x >= self.lo) & (x <= self.hi)
        value = np.where(inside, -math.log(self.width), -np.inf)
        return float(value) if np.ndim(value) == 0 else value


@dataclass
class RejectionStats:
    """Proposal bookkeeping of the GvM rejection sampler"""
    proposed: int = 0
    accepted: int = 0

    @property
    def rate(self) -> float:
        return self.accepted / self.proposed if self.proposed else float("nan")


def _finish(values: np.ndarray, size: Optional[int]) -> SampleOut:
    return float(values[0]) if size is None else values


def _centered_vm(kappa: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """Best-Fisher wrapped-Cauchy rejection for vM(0, kappa), values in [-pi, pi]"""
    if kappa > _SMALL_KAPPA:
        tau = 1.0 + math.sqrt(1.0 + 4.0 * kappa * kappa)
        rho = (tau - math.sqrt(2.0 * tau)) / (2.0 * kappa)
        r = (1.0 + rho * rho) / (2.0 * rho)
    else:
        r = 1.0 / kappa

    out = np.empty(count)
    filled = 0
    while filled < count:
        batch = max(16, int(1.3 * (count - filled)))
        u1, u2, u3 = rng.random((3, batch))
        z = np.cos(np.pi * u1)
        f = (1.0 + r * z) / (r + z)
        c = kappa * (r - f)
        with np.errstate(divide="ignore", invalid="ignore"):
            accept = (c * (2.0 - c) - u2 > 0) | (np.log(c / u2) + 1.0 - c >= 0)
        theta = np.sign(u3[accept] - 0.5) * np.arccos(np.clip(f[accept], -1.0, 1.0))
        take = min(theta.size, count - filled)
        out[filled:filled + take] = theta[:take]
        filled += take
    return out


def sample_vm(p: VMParams, rng: np.random.Generator, size: Optional[int] = None) -> SampleOut:
    """Draws from vM(mu, kappa) in [0, 2*pi)"""
    count = 1 if size is None else int(size)
    values = reduce_2pi(p.mu + _centered_vm(p.kappa, count, rng))
    return _finish(np.atleast_1d(values), size)


def sample_vm2(p: VM2Params, rng: np.random.Generator, size: Optional[int] = None) -> SampleOut:
    """Draws from vM2(mu, kappa) in [0, pi), halving a vM(2*mu, kappa) draw"""
    doubled = VMParams.from_unreduced(2.0 * p.mu, p.kappa)
    count = 1 if size is None else int(size)
    values = reduce_pi(np.atleast_1d(sample_vm(doubled, rng, count)) / 2.0)
    return _finish(np.atleast_1d(values), size)


def gvm_acceptance_rate(p: GvMParams) -> float:
    """Expected acceptance of the vM-envelope sampler, e^{-k2} G0 / I0(k1)"""
    log_rate = log_gvm_norm_const(p.delta, p.kappa1, p.kappa2) - p.kappa2 - log_bessel_i0(p.kappa1)
    return float(math.exp(log_rate))


def sample_gvm(p: GvMParams, rng: np.random.Generator, size: Optional[int] = None,
               stats: Optional[RejectionStats] = None) -> SampleOut:
    """Draws from GvM by rejection from a vM(mu1, kappa1) proposal"""
    count = 1 if size is None else int(size)
    proposal = VMParams(p.mu1, p.kappa1)
    rate = max(gvm_acceptance_rate(p), 1e-6)

    out = np.empty(count)
    filled = 0
    since_accept = 0
    while filled < count:
        batch = int(min(_MAX_BATCH, math.ceil(1.2 * (count - filled) / rate) + 16))
        theta = np.atleast_1d(sample_vm(proposal, rng, batch))
        log_u = np.log(rng.random(batch))
        accept = log_u < p.kappa2 * (np.cos(2.0 * (theta - p.mu2)) - 1.0)

        hits = np.flatnonzero(accept)
        take = min(hits.size, count - filled)
        done = filled + take == count
        # proposals after the last needed acceptance are discarded unseen
        used = int(hits[take - 1]) + 1 if done else batch
        if stats is not None:
            stats.proposed += used
            stats.accepted += take

        if take == 0:
            since_accept += batch
            if since_accept >= MAX_CONSECUTIVE_REJECTIONS:
                raise RejectionCapError(
                    f"{since_accept} consecutive rejections for kappa2={p.kappa2!r}"
                )
            continue
        since_accept = 0 if done else batch - 1 - int(hits[-1])
        out[filled:filled + take] = theta[hits[:take]]
        filled += take
    return _finish(out, size)


def sample_mixture_vm2(m: MixtureVM2Prior, rng: np.random.Generator,
                       size: Optional[int] = None) -> SampleOut:
    """Draws from a two-component vM2 mixture in [0, pi)"""
    if m.xi == 1.0:
        return sample_vm2(m.comp1, rng, size)
    if m.xi == 0.0:
        return sample_vm2(m.comp2, rng, size)

    count = 1 if size is None else int(size)
    first = rng.random(count) < m.xi
    out = np.empty(count)
    k = int(first.sum())
    if k:
        out[first] = sample_vm2(m.comp1, rng, k)
    if count - k:
        out[~first] = sample_vm2(m.comp2, rng, count - k)
    return _finish(out, size)


def sample_uniform(u: UniformPrior, rng: np.random.Generator, size: Optional[int] = None) -> SampleOut:
    """Draws from the uniform prior"""
    count = 1 if size is None else int(size)
    return _finish(rng.uniform(u.lo, u.hi, count), size)


def sample_gvm_stratified(p: GvMParams, rng: np.random.Generator, size: int,
                          grid: int = STRATIFIED_GRID) -> np.ndarray:
    """Stratified inverse-CDF draws from GvM, returned in random order.

    Draw i is uniform within the probability stratum [i/size, (i+1)/size), so
    the sample's trigonometric sums track the model moments far more closely
    than independent draws do. The CDF is the trapezoid cumulative of the
    density on ``grid`` cells, inverted by linear interpolation.
    """
    if size < 0:
        raise DomainError(f"Sample size must be non-negative, got {size!r}")
    edges = np.arange(grid + 1) * (TWO_PI / grid)
    density = np.exp(gvm_log_density(edges, p))
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (density[:-1] + density[1:]))])
    cdf /= cdf[-1]
    u = (np.arange(size) + rng.random(size)) / max(size, 1)
    return rng.permutation(np.asarray(reduce_2pi(np.interp(u, cdf, edges)), dtype=float))
