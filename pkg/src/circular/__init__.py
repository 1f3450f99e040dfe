# Circular Distributions Package
from .models import GvMParams, VM2Params, VMParams, gvm_log_density, log_gvm_norm_const
from .sampling import RngSeed, MixtureVM2Prior, UniformPrior, sample_gvm, sample_vm, sample_vm2

__all__ = [
    "GvMParams",
    "VM2Params",
    "VMParams",
    "gvm_log_density",
    "log_gvm_norm_const",
    "RngSeed",
    "MixtureVM2Prior",
    "UniformPrior",
    "sample_gvm",
    "sample_vm",
    "sample_vm2",
]
