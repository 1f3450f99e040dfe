"""
Built-in Monte Carlo study cases

D-cases test for no shift between the cosines, S-cases for axial symmetry and
K2 for von Mises symmetry (kappa2 = 0). Nuisance values are those of the
simulation design: mu1 = pi, kappa1 = 0.1, kappa2 = 5.5 for the delta tests
and mu1 = pi, mu2 = pi/2, kappa1 = 0.1 for K2.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

from ..bayes.priors import HypothesisKind, PerturbationConfig, PriorSpec
from ..circular.sampling import RngSeed
from ..inference.likelihood import FixedNuisance
from ..utils.exceptions import DomainError, UnknownCaseError

DEFAULT_SEED = 20210426
DESK_REPLICATES = 2000
DESK_DRAWS = 2000
FULL_REPLICATES = 10_000
FULL_DRAWS = 10_000
DEFAULT_SEQUENCES = 3
DEFAULT_N = 50
DEFAULT_EPSILON = 0.05


class GeneratorKind(str, Enum):
    PRIOR_DRAW_DELTA = "prior_draw_delta"
    FIXED_DELTA = "fixed_delta"
    FIXED_VM = "fixed_vm"


@dataclass(frozen=True)
class DataGenerator:
    """How each replicate's data are generated"""
    kind: GeneratorKind
    value: float = 0.0

    def describe(self) -> str:
        if self.kind is GeneratorKind.FIXED_DELTA:
            return f"fixed_delta({self.value:.6g})"
        return self.kind.value


@dataclass(frozen=True)
class CaseSpec:
    """Everything needed to run one study case"""
    name: str
    prior: PriorSpec
    cfg: PerturbationConfig
    generator: DataGenerator
    nuisance: FixedNuisance
    n: int = DEFAULT_N
    r: int = DESK_REPLICATES
    sequences: int = DEFAULT_SEQUENCES
    s: int = DESK_DRAWS
    seed: RngSeed = field(default_factory=lambda: RngSeed(DEFAULT_SEED))
    keep_raw: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"Case {self.name}: n must be at least 2, got {self.n}")
        if self.r < 100:
            raise DomainError(f"Case {self.name}: r must be at least 100, got {self.r}")
        if self.sequences < 1:
            raise DomainError(f"Case {self.name}: at least one sequence is required")
        if self.generator.kind is GeneratorKind.PRIOR_DRAW_DELTA and self.prior.domain.value != "delta":
            raise DomainError(f"Case {self.name}: prior draws generate delta, not {self.prior.domain.value}")


# Published 95% intervals and evidence of the full-scale study
PUBLISHED: Dict[str, Tuple[Tuple[float, float], str]] = {
    "D1": ((2.937, 2.976), "positive"),
    "D1prime": ((3.901, 3.945), "positive"),
    "D2": ((5.477, 5.541), "substantial"),
    "S1": ((2.974, 3.013), "positive"),
    "S2": ((5.317, 5.378), "substantial"),
    "S3": ((5.374, 5.436), "substantial"),
    "K2": ((3.268, 3.335), "positive"),
}

CASE_NAMES = tuple(PUBLISHED)
_ALIASES = {"D1'": "D1prime", "D1PRIME": "D1prime"}


def _delta_nuisance() -> FixedNuisance:
    return FixedNuisance.for_delta_test(mu1=math.pi, kappa1=0.1, kappa2=5.5)


def canonical_name(name: str) -> str:
    key = _ALIASES.get(name.upper(), name.upper())
    if key not in PUBLISHED:
        raise UnknownCaseError(f"Unknown case {name!r}; choose one of {', '.join(CASE_NAMES)}")
    return key


def builtin_case(name: str, full: bool = False, seed: Optional[int] = None) -> CaseSpec:
    """CaseSpec with the design values of the named case"""
    key = canonical_name(name)
    no_shift = PerturbationConfig(DEFAULT_EPSILON, HypothesisKind.NO_SHIFT)
    axial = PerturbationConfig(DEFAULT_EPSILON, HypothesisKind.AXIAL_SYMMETRY)

    if key in ("D1", "D1prime", "D2"):
        tau = {"D1": 250.0, "D1prime": 50.0, "D2": 20.0}[key]
        prior, cfg = PriorSpec.vm2(0.0, tau), no_shift
        generator = (DataGenerator(GeneratorKind.PRIOR_DRAW_DELTA) if key == "D1"
                     else DataGenerator(GeneratorKind.FIXED_DELTA, 0.0))
        nuisance = _delta_nuisance()
    elif key in ("S1", "S2", "S3"):
        tau = 250.0 if key == "S1" else 20.0
        prior, cfg = PriorSpec.mixture(0.5, 0.0, math.pi / 2, tau), axial
        generator = {
            "S1": DataGenerator(GeneratorKind.PRIOR_DRAW_DELTA),
            "S2": DataGenerator(GeneratorKind.FIXED_DELTA, 0.0),
            "S3": DataGenerator(GeneratorKind.FIXED_DELTA, math.pi / 2),
        }[key]
        nuisance = _delta_nuisance()
    else:
        prior = PriorSpec.uniform_kappa2(0.0, 0.5)
        cfg = PerturbationConfig(DEFAULT_EPSILON, HypothesisKind.VM_SYMMETRY)
        generator = DataGenerator(GeneratorKind.FIXED_VM)
        nuisance = FixedNuisance.for_kappa2_test(mu1=math.pi, mu2=math.pi / 2, kappa1=0.1)

    return CaseSpec(
        name=key,
        prior=prior,
        cfg=cfg,
        generator=generator,
        nuisance=nuisance,
        r=FULL_REPLICATES if full else DESK_REPLICATES,
        s=FULL_DRAWS if full else DESK_DRAWS,
        seed=RngSeed(DEFAULT_SEED if seed is None else seed),
    )
