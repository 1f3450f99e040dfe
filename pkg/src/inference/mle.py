"""
Maximum-likelihood fitting of the four-parameter GvM model

The GvM is an exponential family with natural parameter
``eta = (k1 cos mu1, k1 sin mu1, k2 cos 2mu2, k2 sin 2mu2)`` and sufficient
statistic ``(cos t, sin t, cos 2t, sin 2t)``, so the log-likelihood is concave
in eta and its gradient is the observed sums minus n times the model moments.
fit_mle starts with a simplex search from circular-moment estimates and then
polishes the optimum with Newton steps in eta.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import optimize

from .likelihood import Sample, gvm_loglik
from ..circular.models import TWO_PI, GvMParams, gvm_log_density, reduce_pi
from ..circular.special_functions import inverse_bessel_ratio
from ..utils.exceptions import DomainError, GvMError, InsufficientDataError
from ..utils.records import format_record, parse_bool

logger = logging.getLogger("gvm_symmetry.inference")

MIN_FIT_SIZE = 4
GRADIENT_TOL = 1e-6
MAX_ITERATIONS = 10_000
MAX_NEWTON_STEPS = 50
MOMENT_NODES = 4096
START_KAPPA_FLOOR = 0.05
KAPPA_FLOOR = 1e-12
# log-concentrations outside this box are treated as infeasible
_LOG_KAPPA_BOUNDS = (-30.0, 7.0)


@dataclass
class MLEFit:
    """Result of fit_mle"""
    params: GvMParams
    log_likelihood: float
    converged: bool
    iterations: int
    gradient_norm: float = float("nan")
    n: int = 0
    trace: List[float] = field(default_factory=list, repr=False)

    @property
    def delta(self) -> float:
        return self.params.delta

    def to_record(self) -> str:
        p = self.params
        return format_record("fit", [
            ("mu1", p.mu1), ("mu2", p.mu2), ("kappa1", p.kappa1), ("kappa2", p.kappa2),
            ("delta", self.delta), ("loglik", float(self.log_likelihood)),
            ("converged", self.converged), ("iterations", int(self.iterations)),
            ("n", int(self.n)),
        ])

    @classmethod
    def from_record(cls, fields: Dict[str, str]) -> "MLEFit":
        if fields.get("record") != "fit":
            raise DomainError(f"Expected a fit record, got {fields.get('record')!r}")
        params = GvMParams(float(fields["mu1"]), float(fields["mu2"]),
                           float(fields["kappa1"]), float(fields["kappa2"]))
        return cls(params=params, log_likelihood=float(fields["loglik"]),
                   converged=parse_bool(fields["converged"]),
                   iterations=int(fields["iterations"]), n=int(fields.get("n", 0)))


# ---------------------------------------------------------------------------
# Exponential-family pieces
# ---------------------------------------------------------------------------

def _features(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    return np.stack([np.cos(theta), np.sin(theta), np.cos(2.0 * theta), np.sin(2.0 * theta)], axis=-1)


def _sufficient(sample: Sample) -> np.ndarray:
    return np.array([sample.cos1, sample.sin1, sample.cos2, sample.sin2])


def _natural(p: GvMParams) -> np.ndarray:
    return np.array([p.kappa1 * math.cos(p.mu1), p.kappa1 * math.sin(p.mu1),
                     p.kappa2 * math.cos(2 * p.mu2), p.kappa2 * math.sin(2 * p.mu2)])


def _from_natural(eta: np.ndarray) -> GvMParams:
    k1 = max(math.hypot(eta[0], eta[1]), KAPPA_FLOOR)
    k2 = max(math.hypot(eta[2], eta[3]), KAPPA_FLOOR)
    return GvMParams.from_unreduced(math.atan2(eta[1], eta[0]), math.atan2(eta[3], eta[2]) / 2.0, k1, k2)


def _natural_jacobian(p: GvMParams) -> np.ndarray:
    """d eta / d(mu1, mu2, kappa1, kappa2)"""
    c1, s1 = math.cos(p.mu1), math.sin(p.mu1)
    c2, s2 = math.cos(2 * p.mu2), math.sin(2 * p.mu2)
    return np.array([
        [-p.kappa1 * s1, 0.0, c1, 0.0],
        [p.kappa1 * c1, 0.0, s1, 0.0],
        [0.0, -2.0 * p.kappa2 * s2, 0.0, c2],
        [0.0, 2.0 * p.kappa2 * c2, 0.0, s2],
    ])


def feature_moments(p: GvMParams, nodes: int = MOMENT_NODES) -> Tuple[np.ndarray, np.ndarray]:
    """Mean and covariance of (cos t, sin t, cos 2t, sin 2t) under GvM by the periodic trapezoid rule"""
    theta = np.arange(nodes) * (TWO_PI / nodes)
    weights = np.exp(gvm_log_density(theta, p)) * (TWO_PI / nodes)
    feats = _features(theta)
    mean = weights @ feats
    centred = feats - mean
    cov = (centred * weights[:, None]).T @ centred
    return mean, cov


def loglik_gradient(sample: Sample, p: GvMParams) -> np.ndarray:
    """Gradient of the total log-likelihood in (mu1, mu2, kappa1, kappa2)"""
    mean, _ = feature_moments(p)
    return _natural_jacobian(p).T @ (_sufficient(sample) - sample.n * mean)


def standard_errors(p: GvMParams, n: int) -> np.ndarray:
    """Asymptotic standard errors of (mu1, mu2, kappa1, kappa2) from the Fisher information at p"""
    if n <= 0:
        raise DomainError(f"Standard errors need a positive sample size, got {n!r}")
    _, cov = feature_moments(p)
    jac = _natural_jacobian(p)
    information = n * jac.T @ cov @ jac
    try:
        variances = np.diag(np.linalg.inv(information))
    except np.linalg.LinAlgError:
        return np.full(4, np.inf)
    return np.sqrt(np.maximum(variances, 0.0))


def _loglik(sample: Sample, p: GvMParams) -> float:
    return float(gvm_loglik(sample, p.mu1, p.mu2, p.kappa1, p.kappa2))


# ---------------------------------------------------------------------------
# Fitting
# ---------------------------------------------------------------------------

def _mean_loglik(x: np.ndarray, sample: Sample) -> float:
    mu1, mu2, log_k1, log_k2 = x
    lo, hi = _LOG_KAPPA_BOUNDS
    if not (lo <= log_k1 <= hi and lo <= log_k2 <= hi):
        return -math.inf
    return gvm_loglik(sample, mu1, mu2, math.exp(log_k1), math.exp(log_k2)) / sample.n


def _start_values(sample: Sample) -> np.ndarray:
    """Circular-moment estimates in fitting coordinates"""
    m1 = sample.resultant(1)
    m2 = sample.resultant(2)
    mu1 = float(np.angle(m1)) % (2 * math.pi)
    mu2 = reduce_pi(float(np.angle(m2)) / 2.0)
    k1 = max(inverse_bessel_ratio(min(abs(m1), 0.99)), START_KAPPA_FLOOR)
    k2 = max(inverse_bessel_ratio(min(abs(m2), 0.99)), START_KAPPA_FLOOR)
    return np.array([mu1, mu2, math.log(k1), math.log(k2)])


def _newton_polish(sample: Sample, p: GvMParams, trace: List[float]) -> Tuple[GvMParams, int]:
    """Damped Newton ascent in eta; every accepted step raises the log-likelihood"""
    eta = _natural(p)
    ll = _loglik(sample, p)
    target = _sufficient(sample)
    steps = 0
    for _ in range(MAX_NEWTON_STEPS):
        mean, cov = feature_moments(p)
        g = target - sample.n * mean
        if np.linalg.norm(_natural_jacobian(p).T @ g) <= GRADIENT_TOL / 10:
            break
        try:
            direction = np.linalg.solve(sample.n * cov, g)
        except np.linalg.LinAlgError:
            logger.debug("Singular moment covariance, stopping Newton polish")
            break

        t = 1.0
        while t > 1e-8:
            candidate = _from_natural(eta + t * direction)
            try:
                candidate_ll = _loglik(sample, candidate)
            except GvMError:
                candidate_ll = -math.inf
            if candidate_ll >= ll:
                break
            t /= 2.0
        else:
            break
        eta, p, ll = _natural(candidate), candidate, candidate_ll
        trace.append(ll / sample.n)
        steps += 1
    return p, steps


def fit_mle(sample: Sample, restarts: int = 1, max_iter: int = MAX_ITERATIONS) -> MLEFit:
    """Maximizer of the GvM log-likelihood.

    Nelder-Mead in (mu1, mu2, log k1, log k2) from moment start values, then
    Newton steps in the natural parameter. ``converged`` means the gradient of
    the total log-likelihood in (mu1, mu2, kappa1, kappa2) has norm at most
    GRADIENT_TOL.
    """
    if sample.n < MIN_FIT_SIZE:
        raise InsufficientDataError(f"fit_mle needs at least {MIN_FIT_SIZE} angles, got {sample.n}")

    trace: List[float] = []

    def objective(x):
        value = _mean_loglik(x, sample)
        return -value if math.isfinite(value) else math.inf

    def record(xk):
        trace.append(-objective(xk))

    x = _start_values(sample)
    iterations = 0
    for attempt in range(1 + max(restarts, 0)):
        result = optimize.minimize(
            objective, x, method="Nelder-Mead", callback=record,
            options={"maxiter": max_iter, "maxfev": 4 * max_iter,
                     "xatol": 1e-8, "fatol": 1e-13},
        )
        iterations += int(result.nit)
        x = result.x
        logger.debug(f"Nelder-Mead pass {attempt}: mean loglik {-result.fun:.12f} after {result.nit} iterations")

    params = GvMParams.from_unreduced(x[0], x[1], math.exp(x[2]), math.exp(x[3]))
    params, newton_steps = _newton_polish(sample, params, trace)
    iterations += newton_steps

    grad_norm = float(np.linalg.norm(loglik_gradient(sample, params)))
    converged = grad_norm <= GRADIENT_TOL
    if not converged:
        logger.warning(f"fit_mle did not converge (gradient norm {grad_norm:.3g})")

    return MLEFit(
        params=params,
        log_likelihood=_loglik(sample, params),
        converged=converged,
        iterations=iterations,
        gradient_norm=grad_norm,
        n=sample.n,
        trace=trace,
    )


# ---------------------------------------------------------------------------
# Influence and trimming
# ---------------------------------------------------------------------------

def influence_scores(sample: Sample, fit: MLEFit, exact: bool = False) -> np.ndarray:
    """Leave-one-out likelihood displacement 2 * [L(fit) - L(fit without point i)].

    L is the full-sample log-likelihood. By default the fit without point i
    is one Newton step in eta from ``fit``, which needs no refitting; with
    ``exact=True`` every point is refitted with fit_mle.
    """
    if exact:
        scores = np.empty(sample.n)
        for i in range(sample.n):
            refit = fit_mle(Sample(np.delete(sample.angles, i)))
            scores[i] = 2.0 * (fit.log_likelihood - _loglik(sample, refit.params))
        return scores

    n = sample.n
    mean, cov = feature_moments(fit.params)
    total = _sufficient(sample) - n * mean
    per_point = _features(sample.angles) - mean
    # gradient of the sample without point i, at the fit
    remaining = total[None, :] - per_point
    steps = np.linalg.solve((n - 1) * cov, remaining.T).T
    gain = steps @ total - 0.5 * n * np.einsum("ij,jk,ik->i", steps, cov, steps)
    return -2.0 * gain


def trim_influential(sample: Sample, threshold: float,
                     fit: Optional[MLEFit] = None) -> Tuple[Sample, np.ndarray]:
    """Drop points whose influence score exceeds threshold; returns the kept sample and removed indices"""
    if threshold <= 0:
        raise DomainError(f"Trimming threshold must be positive, got {threshold!r}")
    fit = fit or fit_mle(sample)
    scores = influence_scores(sample, fit)
    removed = np.flatnonzero(scores > threshold)
    if removed.size:
        logger.info(f"Trimming {removed.size} of {sample.n} angles with influence above {threshold}")
    return Sample(np.delete(sample.angles, removed)), removed
