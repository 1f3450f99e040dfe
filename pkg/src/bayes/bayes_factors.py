"""
Monte Carlo Bayes factors for the perturbed point-null tests

Every test has the same shape: the numerator is the likelihood at the null
atom(s), the denominator is the prior expectation of the likelihood
restricted to the complement of the null neighbourhoods. Both are kept in log
space and only the final ratio is reported on the linear scale.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
from scipy import integrate, special

from .evidence import EvidenceCategory, interpret_bf, interpret_log_bf
from .priors import (
    HypothesisKind,
    PerturbationConfig,
    PerturbedPrior,
    PriorSpec,
    check_prior,
    compute_p0,
    in_complement,
    prior_log_density,
    sample_prior,
)
from ..inference.likelihood import FixedNuisance, Sample, loglik_delta, loglik_kappa2
from ..utils.exceptions import DegenerateEstimateError, DomainError
from ..utils.records import format_record

logger = logging.getLogger("gvm_symmetry.bayes")

MIN_MC_DRAWS = 1000
MIN_GRID_SIZE = 64
_CHUNK = 65_536
_MAX_LOG_FLOAT = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class MCIntegral:
    """log of (1/s) sum f(theta | x_i) 1{x_i outside the null neighbourhoods}"""
    log_value: float
    std_error: float
    s: int
    hits: int


def _loglik(sample: Sample, cfg: PerturbationConfig, nuis: FixedNuisance, x):
    if cfg.test_kind is HypothesisKind.VM_SYMMETRY:
        return loglik_kappa2(sample, x, nuis)
    return loglik_delta(sample, x, nuis)


def mc_integral_complement(sample: Sample, prior: PriorSpec, cfg: PerturbationConfig,
                           nuis: FixedNuisance, s: int, rng: np.random.Generator) -> MCIntegral:
    """Monte Carlo integral of the likelihood over the complement set under the prior"""
    check_prior(prior, cfg)
    if s < MIN_MC_DRAWS:
        raise DomainError(f"At least {MIN_MC_DRAWS} Monte Carlo draws are required, got {s}")

    draws = np.asarray(sample_prior(prior, rng, s), dtype=float)
    keep = in_complement(cfg, draws)
    inside = draws[keep]
    if inside.size == 0:
        raise DegenerateEstimateError(
            f"All {s} prior draws fell inside the null neighbourhood (epsilon={cfg.epsilon})"
        )

    # sum of w and of w^2 in log space, chunked to bound the series matrix
    log_sum = []
    log_sum_sq = []
    for start in range(0, inside.size, _CHUNK):
        ll = np.atleast_1d(_loglik(sample, cfg, nuis, inside[start:start + _CHUNK]))
        log_sum.append(special.logsumexp(ll))
        log_sum_sq.append(special.logsumexp(2.0 * ll))
    l1 = float(special.logsumexp(log_sum))
    l2 = float(special.logsumexp(log_sum_sq))

    rel_var = max(s * s * math.exp(l2 - 2.0 * l1) - s, 0.0) / (s - 1)
    return MCIntegral(
        log_value=l1 - math.log(s),
        std_error=math.sqrt(rel_var / s),
        s=s,
        hits=int(inside.size),
    )


@dataclass(frozen=True)
class BayesFactorResult:
    """Approximate B01 with its Monte Carlo diagnostics"""
    b01: float
    mc_std_error: float
    s_used: int
    evidence: EvidenceCategory
    numerator_loglik: float
    denominator_log_integral: float
    test_kind: HypothesisKind = HypothesisKind.NO_SHIFT
    epsilon: float = float("nan")

    @property
    def log_b01(self) -> float:
        return self.numerator_loglik - self.denominator_log_integral

    def to_record(self) -> str:
        return format_record("bayes_factor", [
            ("test", self.test_kind.value),
            ("b01", self.b01),
            ("mc_se", self.mc_std_error),
            ("s", self.s_used),
            ("evidence", self.evidence.value),
            ("epsilon", self.epsilon),
            ("numerator_loglik", self.numerator_loglik),
            ("log_integral", self.denominator_log_integral),
        ])

    @classmethod
    def from_record(cls, fields: Dict[str, str]) -> "BayesFactorResult":
        if fields.get("record") != "bayes_factor":
            raise DomainError(f"Expected a bayes_factor record, got {fields.get('record')!r}")
        return cls(
            b01=float(fields["b01"]),
            mc_std_error=float(fields["mc_se"]),
            s_used=int(fields["s"]),
            evidence=EvidenceCategory(fields["evidence"]),
            numerator_loglik=float(fields["numerator_loglik"]),
            denominator_log_integral=float(fields["log_integral"]),
            test_kind=HypothesisKind(fields["test"]),
            epsilon=float(fields["epsilon"]),
        )


def _finish(numerator: float, integral: MCIntegral, cfg: PerturbationConfig) -> BayesFactorResult:
    log_b01 = numerator - integral.log_value
    # b01 leaves the float range for very large samples; the log value is always kept
    b01 = math.exp(log_b01) if log_b01 < _MAX_LOG_FLOAT else math.inf
    evidence = interpret_bf(b01) if 0 < b01 < math.inf else interpret_log_bf(log_b01)
    result = BayesFactorResult(
        b01=b01,
        mc_std_error=b01 * integral.std_error if b01 < math.inf else math.inf,
        s_used=integral.s,
        evidence=evidence,
        numerator_loglik=float(numerator),
        denominator_log_integral=integral.log_value,
        test_kind=cfg.test_kind,
        epsilon=cfg.epsilon,
    )
    logger.debug(f"{cfg.test_kind.value}: b01={b01:.6g} (log {log_b01:.6g}), "
                 f"{integral.hits}/{integral.s} draws in the complement")
    return result


def _expect_kind(cfg: PerturbationConfig, kind: HypothesisKind) -> None:
    if cfg.test_kind is not kind:
        raise DomainError(f"Configuration is for the {cfg.test_kind.value} test, not {kind.value}")


def bf_no_shift(sample: Sample, prior: PriorSpec, cfg: PerturbationConfig, nuis: FixedNuisance,
                s: int, rng: np.random.Generator) -> BayesFactorResult:
    """B01 for H0: delta = 0"""
    _expect_kind(cfg, HypothesisKind.NO_SHIFT)
    integral = mc_integral_complement(sample, prior, cfg, nuis, s, rng)
    return _finish(loglik_delta(sample, 0.0, nuis), integral, cfg)


def _axial_numerator(sample: Sample, perturbed: PerturbedPrior, nuis: FixedNuisance) -> float:
    locations = np.array([a.location for a in perturbed.atoms])
    masses = np.array([a.mass for a in perturbed.atoms])
    ll = np.asarray(loglik_delta(sample, locations, nuis), dtype=float)
    return float(special.logsumexp(ll, b=masses) - math.log(masses.sum()))


def bf_axial_symmetry(sample: Sample, prior: PriorSpec, cfg: PerturbationConfig, nuis: FixedNuisance,
                      s: int, rng: np.random.Generator) -> BayesFactorResult:
    """B01 for H0: delta in {0, pi/2}, the GvM is axially symmetric"""
    _expect_kind(cfg, HypothesisKind.AXIAL_SYMMETRY)
    perturbed = compute_p0(prior, cfg)
    integral = mc_integral_complement(sample, prior, cfg, nuis, s, rng)
    return _finish(_axial_numerator(sample, perturbed, nuis), integral, cfg)


def bf_vm_symmetry(sample: Sample, prior: PriorSpec, cfg: PerturbationConfig, nuis: FixedNuisance,
                   s: int, rng: np.random.Generator) -> BayesFactorResult:
    """B01 for H0: kappa2 = 0, the data are von Mises"""
    _expect_kind(cfg, HypothesisKind.VM_SYMMETRY)
    integral = mc_integral_complement(sample, prior, cfg, nuis, s, rng)
    return _finish(loglik_kappa2(sample, 0.0, nuis), integral, cfg)


BF_FUNCTIONS = {
    HypothesisKind.NO_SHIFT: bf_no_shift,
    HypothesisKind.AXIAL_SYMMETRY: bf_axial_symmetry,
    HypothesisKind.VM_SYMMETRY: bf_vm_symmetry,
}


def bayes_factor(sample: Sample, prior: PriorSpec, cfg: PerturbationConfig, nuis: FixedNuisance,
                 s: int, rng: np.random.Generator) -> BayesFactorResult:
    """Dispatch to the Bayes factor of cfg.test_kind"""
    return BF_FUNCTIONS[cfg.test_kind](sample, prior, cfg, nuis, s, rng)


@dataclass(frozen=True, eq=False)
class PosteriorSummary:
    """Posterior atoms at the null values and the tabulated continuous part"""
    atom_masses: Tuple[Tuple[float, float], ...]
    grid: np.ndarray
    continuous_density: np.ndarray

    @property
    def total_atom_mass(self) -> float:
        return float(sum(mass for _, mass in self.atom_masses))

    def total_mass(self) -> float:
        """Atom masses plus the trapezoid integral of the continuous part"""
        return self.total_atom_mass + float(integrate.trapezoid(self.continuous_density, self.grid))


def posterior_summary(sample: Sample, prior: PriorSpec, cfg: PerturbationConfig, nuis: FixedNuisance,
                      s: int, grid_size: int, rng: np.random.Generator) -> PosteriorSummary:
    """Posterior under the perturbed prior.

    Atom masses are p_c f(theta|c) / (sum_c p_c f(theta|c) + (1 - sum p) I), with I the
    Monte Carlo complement integral, so that posterior odds equal b01 times prior odds.
    """
    if grid_size < MIN_GRID_SIZE:
        raise DomainError(f"Posterior grid needs at least {MIN_GRID_SIZE} points, got {grid_size}")
    perturbed = compute_p0(prior, cfg)
    integral = mc_integral_complement(sample, prior, cfg, nuis, s, rng)

    locations = np.array([a.location for a in perturbed.atoms])
    log_atoms = (np.log([a.mass for a in perturbed.atoms])
                 + np.asarray(_loglik(sample, cfg, nuis, locations), dtype=float))
    log_rest = math.log(perturbed.continuous_weight) + integral.log_value
    log_total = special.logsumexp(np.append(log_atoms, log_rest))
    masses = np.exp(log_atoms - log_total)
    continuous_mass = float(np.exp(log_rest - log_total))

    if cfg.test_kind is HypothesisKind.VM_SYMMETRY:
        lo, hi = prior.component.lo, prior.component.hi
    else:
        lo, hi = 0.0, math.pi
    grid = np.linspace(lo, hi, grid_size)
    log_unnorm = (np.asarray(_loglik(sample, cfg, nuis, grid), dtype=float)
                  + np.asarray(prior_log_density(prior, grid), dtype=float))
    log_unnorm = np.where(in_complement(cfg, grid), log_unnorm, -np.inf)
    shape = np.exp(log_unnorm - np.max(log_unnorm))
    area = float(integrate.trapezoid(shape, grid))
    density = shape * (continuous_mass / area) if area > 0 else np.zeros_like(grid)

    return PosteriorSummary(
        atom_masses=tuple((float(loc), float(m)) for loc, m in zip(locations, masses)),
        grid=grid,
        continuous_density=density,
    )
