# Bayesian Tests Package
from .evidence import EvidenceCategory, interpret_bf
from .priors import HypothesisKind, PerturbationConfig, PriorSpec, compute_p0
from .bayes_factors import (
    BayesFactorResult,
    bayes_factor,
    bf_axial_symmetry,
    bf_no_shift,
    bf_vm_symmetry,
    posterior_summary,
)

__all__ = [
    "EvidenceCategory",
    "interpret_bf",
    "HypothesisKind",
    "PerturbationConfig",
    "PriorSpec",
    "compute_p0",
    "BayesFactorResult",
    "bayes_factor",
    "bf_axial_symmetry",
    "bf_no_shift",
    "bf_vm_symmetry",
    "posterior_summary",
]
