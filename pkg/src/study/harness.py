"""
Replicated Bayes-factor study runner

Replicate i of sequence j draws its data from stream (seed, j, i, 0) and its
Monte Carlo prior draws from stream (seed, j, i, 1), so results do not depend
on the number of workers or on the order in which blocks finish.
"""

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import stats

from .cases import PUBLISHED, CaseSpec, GeneratorKind
from ..bayes.bayes_factors import bayes_factor
from ..bayes.evidence import EvidenceCategory, interpret_bf
from ..bayes.priors import HypothesisKind, compute_p0, sample_prior
from ..circular.models import VMParams
from ..circular.sampling import sample_gvm, sample_vm
from ..inference.likelihood import Sample
from ..utils.exceptions import DomainError, InsufficientDataError, StudyInterrupted
from ..utils.records import format_record, parse_float_list

logger = logging.getLogger("gvm_symmetry.study")

DATA_STREAM = 0
MC_STREAM = 1
MIN_POOL = 30
_BLOCK = 100

HYPOTHESIS_LABELS = {
    HypothesisKind.NO_SHIFT: "no shift between cosines",
    HypothesisKind.AXIAL_SYMMETRY: "axial symmetry",
    HypothesisKind.VM_SYMMETRY: "vM axial symmetry",
}


def aggregate_ci(b01_pool: Sequence[float], level: float = 0.95) -> Tuple[float, float, float]:
    """Mean of the pooled Bayes factors with its normal confidence interval"""
    if not 0 < level < 1:
        raise DomainError(f"Confidence level must lie in (0, 1), got {level!r}")
    values = np.asarray(b01_pool, dtype=float)
    if values.size < MIN_POOL:
        raise InsufficientDataError(f"Need at least {MIN_POOL} Bayes factors, got {values.size}")
    mean = float(values.mean())
    half = float(stats.norm.ppf((1 + level) / 2) * values.std(ddof=1) / math.sqrt(values.size))
    return mean, mean - half, mean + half


def generate_replicate(spec: CaseSpec, rng: np.random.Generator) -> Sample:
    """One data sample under the case's generator"""
    gen = spec.generator
    nuis = spec.nuisance
    if gen.kind is GeneratorKind.FIXED_VM:
        return Sample(sample_vm(VMParams(nuis.mu1_0, nuis.kappa1_0), rng, spec.n))
    if gen.kind is GeneratorKind.PRIOR_DRAW_DELTA:
        delta = float(sample_prior(spec.prior, rng))
    else:
        delta = gen.value
    return Sample(sample_gvm(nuis.params_at_delta(delta), rng, spec.n))


def run_replicate(spec: CaseSpec, sequence: int, index: int) -> float:
    data = generate_replicate(spec, spec.seed.generator(sequence, index, DATA_STREAM))
    mc_rng = spec.seed.generator(sequence, index, MC_STREAM)
    return bayes_factor(data, spec.prior, spec.cfg, spec.nuisance, spec.s, mc_rng).b01


def _run_block(spec: CaseSpec, sequence: int, start: int, stop: int) -> List[float]:
    return [run_replicate(spec, sequence, i) for i in range(start, stop)]


@dataclass
class StudyReport:
    """Aggregated Bayes factors of one case"""
    case: str
    test_kind: HypothesisKind
    per_sequence_means: List[float]
    aggregated_mean: float
    ci95: Tuple[float, float]
    evidence: EvidenceCategory
    wall_time: float
    n: int
    r: int
    sequences: int
    s: int
    epsilon: float
    p0: Tuple[float, ...] = ()
    level: float = 0.95
    all_b01: Optional[List[float]] = None

    @property
    def published(self) -> Optional[Tuple[Tuple[float, float], str]]:
        return PUBLISHED.get(self.case)

    def to_record(self) -> str:
        fields = [
            ("case", self.case), ("test", self.test_kind.value),
            ("n", self.n), ("r", self.r), ("sequences", self.sequences), ("s", self.s),
            ("epsilon", float(self.epsilon)), ("p0", list(self.p0)),
            ("sequence_means", list(self.per_sequence_means)),
            ("mean", float(self.aggregated_mean)),
            ("ci_lo", float(self.ci95[0])), ("ci_hi", float(self.ci95[1])),
            ("level", float(self.level)),
            ("evidence", self.evidence.value), ("wall_time", float(self.wall_time)),
        ]
        if self.all_b01 is not None:
            fields.append(("b01", list(self.all_b01)))
        return format_record("study", fields)

    @classmethod
    def from_record(cls, fields: Dict[str, str]) -> "StudyReport":
        if fields.get("record") != "study":
            raise DomainError(f"Expected a study record, got {fields.get('record')!r}")
        raw = fields.get("b01")
        return cls(
            case=fields["case"],
            test_kind=HypothesisKind(fields["test"]),
            per_sequence_means=parse_float_list(fields["sequence_means"]),
            aggregated_mean=float(fields["mean"]),
            ci95=(float(fields["ci_lo"]), float(fields["ci_hi"])),
            evidence=EvidenceCategory(fields["evidence"]),
            wall_time=float(fields["wall_time"]),
            n=int(fields["n"]),
            r=int(fields["r"]),
            sequences=int(fields["sequences"]),
            s=int(fields["s"]),
            epsilon=float(fields["epsilon"]),
            p0=tuple(parse_float_list(fields["p0"])),
            level=float(fields["level"]),
            all_b01=None if raw is None else parse_float_list(raw),
        )


def run_case(spec: CaseSpec, workers: int = 1, level: float = 0.95) -> StudyReport:
    """Run sequences x r replicates of a case and aggregate their Bayes factors"""
    perturbed = compute_p0(spec.prior, spec.cfg)
    logger.info(f"Case {spec.name}: n={spec.n} r={spec.r} sequences={spec.sequences} s={spec.s} "
                f"prior {spec.prior.describe()} p0={[round(a.mass, 4) for a in perturbed.atoms]}")
    started = time.perf_counter()

    blocks = [(j, start, min(start + _BLOCK, spec.r))
              for j in range(spec.sequences) for start in range(0, spec.r, _BLOCK)]
    sequences: List[List[float]] = [[] for _ in range(spec.sequences)]
    total = spec.sequences * spec.r
    done = 0
    next_report = 0.1

    executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        if executor is None:
            results = (_run_block(spec, j, a, b) for j, a, b in blocks)
        else:
            results = executor.map(_run_block, *zip(*[(spec, j, a, b) for j, a, b in blocks]))
        for (j, _, _), values in zip(blocks, results):
            sequences[j].extend(values)
            done += len(values)
            if done >= next_report * total:
                logger.info(f"Case {spec.name}: {done}/{total} replicates")
                next_report = math.floor(done / total * 10) / 10 + 0.1
            if len(sequences[j]) == spec.r:
                logger.info(f"Case {spec.name}: sequence {j + 1} mean b01 {np.mean(sequences[j]):.4f}")
    except KeyboardInterrupt:
        partial = [b for seq in sequences for b in seq]
        current = next((j for j, seq in enumerate(sequences) if len(seq) < spec.r), None)
        raise StudyInterrupted(spec.name, done, partial, current)
    finally:
        if executor is not None:
            executor.shutdown(wait=False, cancel_futures=True)

    pool = [b for seq in sequences for b in seq]
    mean, lo, hi = aggregate_ci(pool, level)
    report = StudyReport(
        case=spec.name,
        test_kind=spec.cfg.test_kind,
        per_sequence_means=[float(np.mean(seq)) for seq in sequences],
        aggregated_mean=mean,
        ci95=(lo, hi),
        evidence=interpret_bf(mean),
        wall_time=time.perf_counter() - started,
        n=spec.n,
        r=spec.r,
        sequences=spec.sequences,
        s=spec.s,
        epsilon=spec.cfg.epsilon,
        p0=tuple(a.mass for a in perturbed.atoms),
        level=level,
        all_b01=pool if spec.keep_raw else None,
    )
    logger.info(f"Case {spec.name}: mean b01 {mean:.4f}, CI ({lo:.3f}, {hi:.3f}), "
                f"{report.evidence.label} in {report.wall_time:.1f}s")
    return report


def report_table(reports: Sequence[StudyReport]) -> str:
    """Study summary laid out as hypothesis, case, interval and evidence, next to the published values"""
    rows = []
    for rep in reports:
        published = rep.published
        rows.append({
            "H0": HYPOTHESIS_LABELS[rep.test_kind],
            "case": rep.case,
            "mean": f"{rep.aggregated_mean:.3f}",
            f"CI {rep.level:.0%}": f"({rep.ci95[0]:.3f}, {rep.ci95[1]:.3f})",
            "evidence": rep.evidence.label,
            "published CI": "-" if published is None else f"({published[0][0]:.3f}, {published[0][1]:.3f})",
            "published evidence": "-" if published is None else published[1],
        })
    return pd.DataFrame(rows).to_string(index=False)
