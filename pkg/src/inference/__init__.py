# Inference Package
from .likelihood import FixedNuisance, Sample, loglik_delta, loglik_kappa2
from .mle import MLEFit, fit_mle, trim_influential

__all__ = [
    "FixedNuisance",
    "Sample",
    "loglik_delta",
    "loglik_kappa2",
    "MLEFit",
    "fit_mle",
    "trim_influential",
]
