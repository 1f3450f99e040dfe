"""
Priors of the tested parameter and their probability perturbation

A perturbed prior moves the mass of a small neighbourhood of each null value
onto an atom at that value. For delta the neighbourhoods are circular on the
circle of circumference pi; for kappa2 the neighbourhood is [0, epsilon].
"""

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import NamedTuple, Optional, Tuple, Union

import numpy as np
from scipy import integrate

from ..circular.models import VM2Params, _vm2_log_density_periodic, circular_distance_pi
from ..circular.sampling import (
    MixtureVM2Prior,
    UniformPrior,
    sample_mixture_vm2,
    sample_uniform,
    sample_vm2,
)
from ..utils.exceptions import DomainError, PriorMismatchError

QUAD_ABS_TOL = 1e-10


class HypothesisKind(str, Enum):
    NO_SHIFT = "no_shift"
    AXIAL_SYMMETRY = "axial_symmetry"
    VM_SYMMETRY = "vm_symmetry"

    @property
    def parameter(self) -> "ParameterDomain":
        return ParameterDomain.KAPPA2 if self is HypothesisKind.VM_SYMMETRY else ParameterDomain.DELTA

    @property
    def null_points(self) -> Tuple[float, ...]:
        return (0.0, math.pi / 2) if self is HypothesisKind.AXIAL_SYMMETRY else (0.0,)


class ParameterDomain(str, Enum):
    DELTA = "delta"
    KAPPA2 = "kappa2"


class PriorVariant(str, Enum):
    VM2 = "vm2"
    MIXTURE = "mixture"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class PerturbationConfig:
    """Neighbourhood length epsilon and the test it perturbs"""
    epsilon: float
    test_kind: HypothesisKind

    def __post_init__(self):
        if not 0 < self.epsilon < math.pi / 4:
            raise DomainError(f"epsilon must lie in (0, pi/4), got {self.epsilon!r}")
        object.__setattr__(self, "test_kind", HypothesisKind(self.test_kind))


Component = Union[VM2Params, MixtureVM2Prior, UniformPrior]


@dataclass(frozen=True)
class PriorSpec:
    """Continuous prior of the tested parameter"""
    variant: PriorVariant
    component: Component
    domain: ParameterDomain = ParameterDomain.DELTA

    def __post_init__(self):
        object.__setattr__(self, "variant", PriorVariant(self.variant))
        object.__setattr__(self, "domain", ParameterDomain(self.domain))
        expected = {PriorVariant.VM2: VM2Params, PriorVariant.MIXTURE: MixtureVM2Prior,
                    PriorVariant.UNIFORM: UniformPrior}[self.variant]
        if not isinstance(self.component, expected):
            raise DomainError(f"{self.variant.value} prior needs a {expected.__name__} component")
        if self.variant is not PriorVariant.UNIFORM and self.domain is not ParameterDomain.DELTA:
            raise DomainError("vM2 and mixture priors are priors over delta")
        if self.variant is PriorVariant.UNIFORM:
            lo, hi = self.component.lo, self.component.hi
            if self.domain is ParameterDomain.DELTA and not (0.0 <= lo and hi <= math.pi):
                raise DomainError(f"Uniform prior over delta must lie within [0, pi], got [{lo}, {hi}]")
            if self.domain is ParameterDomain.KAPPA2 and lo < 0:
                raise DomainError(f"Uniform prior over kappa2 must start at or above 0, got {lo}")

    @classmethod
    def vm2(cls, nu: float, tau: float) -> "PriorSpec":
        return cls(PriorVariant.VM2, VM2Params.from_unreduced(nu, tau))

    @classmethod
    def mixture(cls, xi: float, nu1: float, nu2: float, tau: float) -> "PriorSpec":
        component = MixtureVM2Prior(xi, VM2Params.from_unreduced(nu1, tau), VM2Params.from_unreduced(nu2, tau))
        return cls(PriorVariant.MIXTURE, component)

    @classmethod
    def uniform_kappa2(cls, lo: float, hi: float) -> "PriorSpec":
        return cls(PriorVariant.UNIFORM, UniformPrior(lo, hi), ParameterDomain.KAPPA2)

    @classmethod
    def uniform_delta(cls) -> "PriorSpec":
        """Flat prior over delta on [0, pi)"""
        return cls(PriorVariant.UNIFORM, UniformPrior(0.0, math.pi), ParameterDomain.DELTA)

    def supports(self, test_kind: HypothesisKind) -> bool:
        if self.domain is not test_kind.parameter:
            return False
        if test_kind is HypothesisKind.NO_SHIFT:
            return self.variant in (PriorVariant.VM2, PriorVariant.UNIFORM)
        if test_kind is HypothesisKind.AXIAL_SYMMETRY:
            return self.variant in (PriorVariant.MIXTURE, PriorVariant.UNIFORM)
        return self.variant is PriorVariant.UNIFORM

    def describe(self) -> str:
        c = self.component
        if self.variant is PriorVariant.VM2:
            return f"vM2(nu={c.mu:.4g}, tau={c.kappa:.4g})"
        if self.variant is PriorVariant.MIXTURE:
            return (f"{c.xi:g}*vM2({c.comp1.mu:.4g}, {c.comp1.kappa:.4g}) + "
                    f"{1 - c.xi:g}*vM2({c.comp2.mu:.4g}, {c.comp2.kappa:.4g})")
        return f"uniform {self.domain.value} on [{c.lo:.4g}, {c.hi:.4g}]"


def check_prior(prior: PriorSpec, cfg: PerturbationConfig) -> None:
    if not prior.supports(cfg.test_kind):
        raise PriorMismatchError(
            f"A {prior.variant.value} prior over {prior.domain.value} cannot be used for the "
            f"{cfg.test_kind.value} test"
        )


def prior_log_density(prior: PriorSpec, x):
    """Log density of the continuous prior; vM2 families are extended pi-periodically"""
    c = prior.component
    if prior.variant is PriorVariant.VM2:
        value = _vm2_log_density_periodic(x, c.mu, c.kappa)
        return float(value) if np.ndim(value) == 0 else value
    return c.log_density(x)


def sample_prior(prior: PriorSpec, rng: np.random.Generator, size: Optional[int] = None):
    """Draws of the tested parameter from the continuous prior"""
    c = prior.component
    if prior.variant is PriorVariant.VM2:
        return sample_vm2(c, rng, size)
    if prior.variant is PriorVariant.MIXTURE:
        return sample_mixture_vm2(c, rng, size)
    return sample_uniform(c, rng, size)


def in_complement(cfg: PerturbationConfig, x) -> np.ndarray:
    """True where x lies outside every null neighbourhood of the test"""
    x = np.asarray(x, dtype=float)
    half = cfg.epsilon / 2.0
    if cfg.test_kind is HypothesisKind.VM_SYMMETRY:
        return x > cfg.epsilon
    outside = np.ones(x.shape, dtype=bool)
    for point in cfg.test_kind.null_points:
        outside &= np.asarray(circular_distance_pi(x, point)) > half
    return outside


class Atom(NamedTuple):
    location: float
    mass: float


@dataclass(frozen=True)
class PerturbedPrior:
    """Atoms at the null values plus the continuous prior with weight 1 - sum of masses"""
    atoms: Tuple[Atom, ...]
    continuous: PriorSpec
    cfg: PerturbationConfig

    def __post_init__(self):
        total = self.total_mass
        if any(a.mass < 0 for a in self.atoms) or not 0 < total < 1:
            raise DomainError(
                f"Null neighbourhoods carry prior mass {total!r}; it must lie strictly between 0 and 1"
            )

    @property
    def total_mass(self) -> float:
        return float(sum(a.mass for a in self.atoms))

    @property
    def p0(self) -> float:
        return self.atoms[0].mass

    @property
    def prior_odds(self) -> float:
        """R0 = P(H0) / P(H1) under the perturbed prior"""
        return self.total_mass / (1.0 - self.total_mass)

    @property
    def continuous_weight(self) -> float:
        return 1.0 - self.total_mass


def _interval_mass(prior: PriorSpec, a: float, b: float) -> float:
    c = prior.component
    if prior.variant is PriorVariant.UNIFORM:
        if prior.domain is ParameterDomain.KAPPA2:
            return max(0.0, min(b, c.hi) - max(a, c.lo)) / c.width
        # circular neighbourhood; shifted copies cover wrap-around at 0 and pi
        overlap = sum(max(0.0, min(b + k * math.pi, c.hi) - max(a + k * math.pi, c.lo))
                      for k in (-1, 0, 1))
        return overlap / c.width
    value, _ = integrate.quad(lambda t: math.exp(prior_log_density(prior, t)), a, b,
                              epsabs=QUAD_ABS_TOL, limit=200)
    return float(value)


@lru_cache(maxsize=128)
def compute_p0(prior: PriorSpec, cfg: PerturbationConfig) -> PerturbedPrior:
    """Prior masses of the null neighbourhoods, moved onto atoms"""
    check_prior(prior, cfg)
    eps = cfg.epsilon
    if cfg.test_kind is HypothesisKind.VM_SYMMETRY:
        atoms = (Atom(0.0, _interval_mass(prior, 0.0, eps)),)
    else:
        atoms = tuple(Atom(point, _interval_mass(prior, point - eps / 2, point + eps / 2))
                      for point in cfg.test_kind.null_points)
    return PerturbedPrior(atoms=atoms, continuous=prior, cfg=cfg)
