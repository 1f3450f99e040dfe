#!/usr/bin/env python3
"""
Main entry point for the GvM symmetry toolkit

Verbs: fit, test, simulate, density, sample. Status lines go to stderr;
tables and records go to stdout or to the file named by --out.
"""

import argparse
import dataclasses
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from src.bayes.bayes_factors import bayes_factor, posterior_summary
from src.bayes.priors import HypothesisKind, PerturbationConfig, PriorSpec
from src.circular.models import GvMParams, VM2Params, VMParams, gvm_log_density
from src.circular.sampling import RngSeed, sample_gvm, sample_vm, sample_vm2
from src.data.angles import AngleFileSpec, read_angle_file, write_angle_file
from src.data.synthetic import synthetic_null_sample, synthetic_wind_sample
from src.inference.likelihood import FixedNuisance
from src.inference.mle import MLEFit, fit_mle, standard_errors, trim_influential
from src.study.cases import CASE_NAMES, builtin_case
from src.study.harness import report_table, run_case
from src.utils.exceptions import (
    ConfigError,
    ConvergenceError,
    DataFileError,
    GvMError,
    MissingNuisanceError,
    StudyInterrupted,
)
from src.utils.helpers import ensure_directories, load_config, setup_logging, validate_config
from src.utils.records import find_record, format_record
from src.utils.run_config import RunConfig, resolve_run_config

logger = logging.getLogger("gvm_symmetry.cli")

# Stream of the Monte Carlo prior draws used by the test verb
TEST_MC_STREAM = 1


def status(message: str) -> None:
    print(message, file=sys.stderr)


def emit(lines: List[str], out: Optional[str]) -> None:
    """Write machine output to --out or stdout"""
    text = "\n".join(lines) + "\n"
    if out:
        ensure_directories([out])
        try:
            Path(out).write_text(text, encoding="utf-8")
        except OSError as e:
            raise DataFileError(f"Could not write {out}: {e}") from e
        status(f"✅ Output written to {out}")
    else:
        sys.stdout.write(text)


def _angle_file(args: argparse.Namespace) -> AngleFileSpec:
    column: Any = args.column
    if isinstance(column, str) and column.isdigit():
        column = int(column)
    return AngleFileSpec(path=args.file, unit=args.unit, column=column, header=not args.no_header)


# ---------------------------------------------------------------------------
# Verbs
# ---------------------------------------------------------------------------

def cmd_fit(args: argparse.Namespace, run: RunConfig) -> int:
    """Fit the GvM model to an angle file"""
    sample = read_angle_file(_angle_file(args))
    if run.trim_threshold is not None:
        sample, removed = trim_influential(sample, run.trim_threshold)
        status(f"Removed {removed.size} influential angles")
    fit = fit_mle(sample)

    if run.format == "records":
        emit([fit.to_record()], run.out)
    else:
        p = fit.params
        se = standard_errors(p, fit.n)
        emit([
            f"n          {fit.n}",
            f"mu1        {p.mu1:.6f}  (se {se[0]:.4f})",
            f"mu2        {p.mu2:.6f}  (se {se[1]:.4f})",
            f"kappa1     {p.kappa1:.6f}  (se {se[2]:.4f})",
            f"kappa2     {p.kappa2:.6f}  (se {se[3]:.4f})",
            f"delta      {fit.delta:.6f}",
            f"loglik     {fit.log_likelihood:.6f}",
            f"converged  {'yes' if fit.converged else 'no'} ({fit.iterations} iterations)",
        ], run.out)

    if not fit.converged:
        raise ConvergenceError(f"Likelihood maximization did not converge (gradient norm {fit.gradient_norm:.3g})")
    status("✅ Fit converged")
    return 0


def build_prior(kind: HypothesisKind, run: RunConfig) -> PriorSpec:
    if kind is HypothesisKind.NO_SHIFT:
        return PriorSpec.vm2(run.nu, run.tau)
    if kind is HypothesisKind.AXIAL_SYMMETRY:
        return PriorSpec.mixture(run.xi, run.nu, run.nu2, run.tau)
    return PriorSpec.uniform_kappa2(run.prior_lo, run.prior_hi)


def resolve_nuisance(kind: HypothesisKind, args: argparse.Namespace) -> FixedNuisance:
    """Nuisance values from flags, falling back to a fit record file"""
    values: Dict[str, Optional[float]] = {
        "mu1": args.mu1, "mu2": args.mu2, "kappa1": args.kappa1, "kappa2": args.kappa2,
    }
    if args.fit_file:
        try:
            lines = Path(args.fit_file).read_text(encoding="utf-8").splitlines()
        except OSError as e:
            raise DataFileError(f"Could not read fit file {args.fit_file}: {e}") from e
        fit = MLEFit.from_record(find_record(lines, "fit"))
        fitted = {"mu1": fit.params.mu1, "mu2": fit.params.mu2,
                  "kappa1": fit.params.kappa1, "kappa2": fit.params.kappa2}
        values = {key: fitted[key] if value is None else value for key, value in values.items()}

    needed = ("mu1", "mu2", "kappa1") if kind is HypothesisKind.VM_SYMMETRY else ("mu1", "kappa1", "kappa2")
    missing = [key for key in needed if values[key] is None]
    if missing:
        raise MissingNuisanceError(
            f"The {kind.value} test needs {', '.join(missing)}; pass them as flags or via --fit-file"
        )
    if kind is HypothesisKind.VM_SYMMETRY:
        return FixedNuisance.for_kappa2_test(values["mu1"], values["mu2"], values["kappa1"])
    return FixedNuisance.for_delta_test(values["mu1"], values["kappa1"], values["kappa2"])


def cmd_test(args: argparse.Namespace, run: RunConfig) -> int:
    """Bayes factor of one of the three tests on an angle file"""
    kind = HypothesisKind(args.test)
    nuis = resolve_nuisance(kind, args)
    sample = read_angle_file(_angle_file(args))
    prior = build_prior(kind, run)
    cfg = PerturbationConfig(run.epsilon, kind)
    rng = RngSeed(run.seed).generator(TEST_MC_STREAM)

    result = bayes_factor(sample, prior, cfg, nuis, run.s, rng)
    lines = [result.to_record()] if run.format == "records" else [
        f"test       {kind.value}",
        f"prior      {prior.describe()}",
        f"epsilon    {cfg.epsilon:g}",
        f"b01        {result.b01:.6f}",
        f"mc_se      {result.mc_std_error:.6f}",
        f"evidence   {result.evidence.label}",
    ]

    if args.posterior:
        post = posterior_summary(sample, prior, cfg, nuis, run.s, max(run.grid, 64),
                                 RngSeed(run.seed).generator(TEST_MC_STREAM))
        for location, mass in post.atom_masses:
            if run.format == "records":
                lines.append(format_record("posterior_atom", [("location", location), ("mass", mass)]))
            else:
                lines.append(f"P[{kind.value} at {location:.4f} | data] = {mass:.6f}")
        if run.format == "records":
            lines.extend(format_record("posterior_density", [("x", float(x)), ("density", float(d))])
                         for x, d in zip(post.grid, post.continuous_density))

    emit(lines, run.out)
    status(f"✅ B01 = {result.b01:.4f} ({result.evidence.label} evidence for H0)")
    return 0


def cmd_simulate(args: argparse.Namespace, run: RunConfig) -> int:
    """Run built-in study cases and report them"""
    names = list(CASE_NAMES) if not args.cases or args.cases == ["all"] else args.cases
    reports = []
    for name in names:
        spec = builtin_case(name, full=run.full, seed=run.seed)
        overrides: Dict[str, Any] = {"keep_raw": run.keep_raw}
        for key in ("r", "s", "sequences", "n"):
            value = getattr(run, key)
            if value is not None:
                overrides[key] = value
        if run.epsilon is not None:
            overrides["cfg"] = PerturbationConfig(run.epsilon, spec.cfg.test_kind)
        spec = dataclasses.replace(spec, **overrides)
        status(f"🎲 Running case {spec.name} ({spec.sequences} x {spec.r} replicates, s={spec.s})")
        reports.append(run_case(spec, workers=run.workers, level=run.level))

    if run.format == "records":
        emit([rep.to_record() for rep in reports], run.out)
    else:
        emit([report_table(reports)], run.out)
    return 0


def cmd_density(args: argparse.Namespace, run: RunConfig) -> int:
    """Tabulate a GvM density on a grid"""
    params = GvMParams.from_unreduced(args.mu1, args.mu2, args.kappa1, args.kappa2)
    lo = -2 * math.pi if args.lo is None else args.lo
    hi = 2 * math.pi if args.hi is None else args.hi
    if not lo < hi:
        raise ConfigError(f"Density range needs lo < hi, got [{lo}, {hi}]")
    theta = np.linspace(lo, hi, run.grid, endpoint=False)
    density = np.exp(gvm_log_density(theta, params))

    if run.format == "records":
        lines = [format_record("density", [("theta", float(t)), ("density", float(d))])
                 for t, d in zip(theta, density)]
    else:
        lines = ["theta density"] + [f"{float(t)!r} {float(d)!r}" for t, d in zip(theta, density)]
    emit(lines, run.out)
    return 0


def cmd_sample(args: argparse.Namespace, run: RunConfig) -> int:
    """Draw angles and write them as CSV"""
    n = run.n or (50 if args.dist == "null" else 5000)
    if args.dist == "wind":
        angles = synthetic_wind_sample(run.seed, n).angles
    elif args.dist == "null":
        angles = synthetic_null_sample(run.seed, n).angles
    else:
        rng = RngSeed(run.seed).generator(0)
        if args.dist == "gvm":
            angles = sample_gvm(GvMParams.from_unreduced(args.mu1, args.mu2, args.kappa1, args.kappa2), rng, n)
        elif args.dist == "vm":
            angles = sample_vm(VMParams.from_unreduced(args.mu1, args.kappa1), rng, n)
        else:
            angles = sample_vm2(VM2Params.from_unreduced(args.mu1, args.kappa1), rng, n)

    if run.out:
        write_angle_file(angles, run.out)
        status(f"✅ {n} angles written to {run.out}")
    else:
        sys.stdout.write(pd.DataFrame({"theta": angles}).to_csv(index=False))
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="YAML configuration file")
    parser.add_argument("--log-level", dest="log_level", help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", help="write output to this file instead of stdout")
    parser.add_argument("--format", choices=["table", "records"])


def _file_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("file", help="CSV file with one column of angles")
    parser.add_argument("--unit", choices=["radians", "degrees"], default="radians")
    parser.add_argument("--column", default="0", help="column name or zero-based index")
    parser.add_argument("--no-header", dest="no_header", action="store_true", help="file has no header row")


def _gvm_args(parser: argparse.ArgumentParser, required: bool) -> None:
    for name in ("mu1", "mu2", "kappa1", "kappa2"):
        parser.add_argument(f"--{name}", type=float, required=required)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gvm-symmetry",
        description="Bayesian perturbation tests of symmetry for the generalized von Mises distribution",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="maximum-likelihood fit of the GvM model")
    _file_args(fit)
    _common(fit)
    fit.add_argument("--trim-threshold", dest="trim_threshold", type=float,
                     help="drop angles whose leave-one-out likelihood displacement exceeds this value before fitting")

    test = sub.add_parser("test", help="Bayes factor of a symmetry test")
    _file_args(test)
    _common(test)
    test.add_argument("--test", choices=[k.value for k in HypothesisKind], default=HypothesisKind.NO_SHIFT.value)
    test.add_argument("--epsilon", type=float)
    test.add_argument("--s", type=int, help="Monte Carlo prior draws")
    test.add_argument("--tau", type=float, help="prior concentration over delta")
    test.add_argument("--nu", type=float, help="prior location (first component)")
    test.add_argument("--nu2", type=float, help="second mixture component location")
    test.add_argument("--xi", type=float, help="mixture weight of the first component")
    test.add_argument("--prior-lo", dest="prior_lo", type=float)
    test.add_argument("--prior-hi", dest="prior_hi", type=float)
    _gvm_args(test, required=False)
    test.add_argument("--fit-file", dest="fit_file", help="records file written by 'fit --format records'")
    test.add_argument("--posterior", action="store_true", help="also report the posterior summary")
    test.add_argument("--grid", type=int, help="posterior grid size")

    simulate = sub.add_parser("simulate", help="run built-in Monte Carlo study cases")
    simulate.add_argument("cases", nargs="*", help=f"case names ({', '.join(CASE_NAMES)}) or 'all'")
    _common(simulate)
    simulate.add_argument("--epsilon", type=float)
    simulate.add_argument("--s", type=int)
    simulate.add_argument("--r", type=int)
    simulate.add_argument("--sequences", type=int)
    simulate.add_argument("--n", type=int)
    simulate.add_argument("--workers", type=int)
    simulate.add_argument("--level", type=float)
    simulate.add_argument("--full", action="store_true", default=None, help="r = s = 10000")
    simulate.add_argument("--keep-raw", dest="keep_raw", action="store_true", default=None,
                          help="include every Bayes factor in the records")

    density = sub.add_parser("density", help="tabulate a GvM density")
    _common(density)
    _gvm_args(density, required=True)
    density.add_argument("--grid", type=int)
    density.add_argument("--lo", type=float)
    density.add_argument("--hi", type=float)

    sample = sub.add_parser("sample", help="draw angles to CSV")
    _common(sample)
    sample.add_argument("--dist", choices=["gvm", "vm", "vm2", "wind", "null"], default="wind")
    sample.add_argument("--n", type=int)
    sample.add_argument("--mu1", type=float, default=0.0)
    sample.add_argument("--mu2", type=float, default=0.0)
    sample.add_argument("--kappa1", type=float, default=1.0)
    sample.add_argument("--kappa2", type=float, default=1.0)
    return parser


COMMANDS = {
    "fit": cmd_fit,
    "test": cmd_test,
    "simulate": cmd_simulate,
    "density": cmd_density,
    "sample": cmd_sample,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run the verb and map errors to exit codes"""
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.config and config and not validate_config(config):
            raise ConfigError(f"Configuration file {args.config} is missing required sections")
        log_config = dict(config.get("logging") or {})
        if args.log_level:
            log_config["level"] = args.log_level
        setup_logging(log_config)

        flags = {key: getattr(args, key) for key in RunConfig.model_fields if hasattr(args, key)}
        run = resolve_run_config(args.command, config, flags)
        return COMMANDS[args.command](args, run)
    except StudyInterrupted as e:
        status(f"❌ {e}")
        if e.partial_b01:
            status(f"Partial mean b01 over {len(e.partial_b01)} replicates: {np.mean(e.partial_b01):.4f}")
        return e.exit_code
    except GvMError as e:
        status(f"❌ {e}")
        return e.exit_code
    except KeyboardInterrupt:
        status("❌ Interrupted")
        return 130
    except Exception as e:
        logger.exception("Unexpected error")
        status(f"❌ Unexpected error: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
