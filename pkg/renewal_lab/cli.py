"""
Command-line driver
One subcommand per experiment; writes CSV (and SVG with --plot) to the
output directory and prints a one-line summary
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from . import __version__
from .blackwell_estimator import (
    CSV_COLUMNS, CountEstimate, estimate_interval_count, estimate_mu, estimate_perturbed_deterministic,
    estimate_row, sample_trial, sweep, verdict,
)
from .config import get_settings
from .determinization import TRANSFORM_CSV_COLUMNS, transform_expectation_check
from .distributions import DiscreteAtoms, density
from .error_models import (
    EXIT_RUNTIME, ErrorCode, RenewalLabError, ValidationFailure, create_error_response,
)
from .experiment import ExperimentConfig
from .floor_lemmas import (
    CONVERSE_CSV_COLUMNS, FLOOR_CSV_COLUMNS, converse_probe, converse_violations,
    floor_expectation_mc, floor_expectation_noisy,
)
from .ks import ks_uniform
from .logging_setup import configure_logging
from .process_engine import count_in, write_realization_csv
from .reporting import plot_histogram, plot_lines, summary_line, write_csv, write_json
from .residual_analytics import (
    RESIDUAL_CSV_COLUMNS, ResidualSampleSet, atom_frequency_check, conditional_uniformity_check, ks_ages,
    ks_containing, ks_residuals, residual_pdf, sample_residuals,
)
from .uniformity_and_span import (
    detect_span, gaussian_mod1_ks, mod1_samples, zm_cdf_gap, zm_limit_check,
)
from .validators import InputValidator
from .window_strategies import LargeUniform

logger = logging.getLogger(__name__)

PROG = "renewal-lab"

# Large-uniform theta, in means, when a residual run names no strategy
DEFAULT_THETA_MEANS = 1e4

# Inputs of the listing reproductions; config file and flags override them
COMMAND_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "listing1": {
        "dist": DiscreteAtoms(atoms=[(0.0, 0.5), (20.0, 0.5)]),
        "strategy": LargeUniform(theta=1000.0),
        "u": 1.0,
        "n_trials": 50000,
    },
    "listing2": {"c": 3.2, "n": 10000},
}

# argparse dest names that are not ExperimentConfig fields
_DRIVER_ARGS = {"command", "config", "log_level"}


def _float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description="Renewal process simulation and verification")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file of parameters; flags win")
    common.add_argument("--dist", help="DistributionSpec JSON")
    common.add_argument("--strategy", help="WindowStrategy JSON")
    common.add_argument("--u", type=float, help="window length")
    common.add_argument("--u-list", type=_float_list, help="comma-separated window lengths")
    common.add_argument("--s", type=float, help="time for mu(s)")
    common.add_argument("--n-trials", type=int, help="independent trials")
    common.add_argument("--seed", type=int, help="experiment seed (required)")
    common.add_argument("--threads", type=int, help="worker threads (default RENEWAL_LAB_THREADS or CPU count)")
    common.add_argument("--out-dir", type=Path, help="output directory")
    common.add_argument("--plot", action="store_true", default=None, help="also write SVG plots")
    common.add_argument("--dump-realization", action="store_true", default=None,
                        help="blackwell: also write the trial-0 realization to realization.csv")
    common.add_argument("--k-sigma", type=float, help="pass bar in standard errors")
    common.add_argument("--n", type=int, help="summands, draws or sample size")
    common.add_argument("--m-list", type=_float_list, help="comma-separated m values for Z_m")
    common.add_argument("--m-max", type=int, help="largest m in the gamma scan")
    common.add_argument("--tol", type=float, help="span detection tolerance")
    common.add_argument("--sigma", type=float, help="Gaussian standard deviation")
    common.add_argument("--mu", type=float, help="Gaussian mean")
    common.add_argument("--bucket-width", type=float, help="containing-interval bucket width")
    common.add_argument("--c", type=float, help="floor lemma offset")
    common.add_argument("--noise", help="NoiseSpec JSON (window start jitter for perturbed)")
    common.add_argument("--noise-end", help="NoiseSpec JSON for the window end jitter")
    common.add_argument("--converse", help="probe CDF name: uniform, beta22, power2, sqrt")
    common.add_argument("--rounding", choices=["floor", "truncate"])
    common.add_argument("--t", type=float, help="lattice spacing of the deterministic process")
    common.add_argument("--theta", type=float, help="large-uniform theta")
    common.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], type=str.upper)

    commands = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, help_text in (
        ("blackwell", "expected window counts"),
        ("mu", "renewal function mu(s)"),
        ("residual", "residual life law and conditional uniformity"),
        ("lengthbias", "length-biased containing interval"),
        ("mod1", "S_n mod 1 equidistribution"),
        ("span", "arithmetic span detection and gamma scan"),
        ("zm", "Z_m = ceil(mU) - mU against U(0, 1)"),
        ("gauss-mod1", "Gaussian mod 1 against U(0, 1)"),
        ("transform", "determinization count check"),
        ("floor", "floor-expectation lemmas and converse probe"),
        ("listing1", "bimodal 0/20 window count reproduction"),
        ("listing2", "E[floor(c - U)] reproduction"),
        ("perturbed", "deterministic process with jittered window"),
    ):
        commands.add_parser(name, parents=[common], help=help_text)

    return parser


def _flag(field: str) -> str:
    return "--" + field.replace("_", "-")


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    """
    Command defaults, then the --config file, then explicit flags

    Raises:
        ValidationFailure: Naming the offending flag
    """
    merged: Dict[str, Any] = dict(COMMAND_DEFAULTS.get(args.command, {}))
    if args.config is not None:
        merged.update(InputValidator.load_config_file(args.config))

    for field, value in vars(args).items():
        if field in _DRIVER_ARGS or value is None:
            continue
        if field == "dist":
            value = InputValidator.parse_distribution(value)
        elif field == "strategy":
            value = InputValidator.parse_strategy(value)
        elif field in ("noise", "noise_end"):
            value = InputValidator.parse_noise(value, _flag(field))
        merged[field] = value

    try:
        config = ExperimentConfig.model_validate(merged)
    except ValidationError as exc:
        first = exc.errors()[0]
        field = str(first["loc"][0]) if first.get("loc") else "config"
        raise ValidationFailure(f"{_flag(field)}: {first['msg']}")

    InputValidator.validate_seed(config.seed)
    InputValidator.validate_trials(config.n_trials)
    return config


def _require(cfg: ExperimentConfig, field: str) -> Any:
    value = getattr(cfg, field)
    if value is None:
        raise ValidationFailure(f"{_flag(field)} is required for this command")
    return value


def _within(estimate: float, target: float, stderr: float, k_sigma: float) -> bool:
    gap = abs(estimate - target)
    return gap == 0.0 if stderr == 0.0 else gap <= k_sigma * stderr


def _emit(line: str) -> None:
    print(line, file=sys.stdout)


def cmd_blackwell(cfg: ExperimentConfig, command: str = "blackwell") -> int:
    spec = _require(cfg, "dist")
    strat = _require(cfg, "strategy")
    u_list = cfg.u_list or [_require(cfg, "u")]

    estimates: List[CountEstimate] = (
        sweep(spec, strat, u_list, cfg.n_trials, cfg.seed, cfg.threads) if cfg.u_list
        else [estimate_interval_count(spec, strat, u_list[0], cfg.n_trials, cfg.seed, cfg.threads)]
    )
    write_csv(cfg.out_dir / f"{command}.csv", CSV_COLUMNS,
              (estimate_row(spec, strat, u, est) for u, est in zip(u_list, estimates)))

    if cfg.plot:
        plot_lines(cfg.out_dir / f"{command}.svg", u_list,
                   {"estimate": [e.mean for e in estimates], "u/t": [e.target for e in estimates]},
                   title="Expected window count", xlabel="u", ylabel="E[N(u1 -> u1 + u)]",
                   errors={"estimate": [1.96 * e.stderr for e in estimates]})

    if cfg.dump_realization:
        real, window = sample_trial(spec, strat, u_list[0], cfg.seed)
        write_realization_csv(real, cfg.out_dir / "realization.csv")
        logger.info(f"Trial 0 window ({window.u1!r}, {window.u2!r}] holds {count_in(real, window)} event(s)")

    passes = [verdict(e, cfg.k_sigma) for e in estimates]
    if len(estimates) == 1:
        _emit(summary_line(command, estimates[0].mean, estimates[0].target, passes[0]))
    else:
        _emit(f"{command}: {sum(passes)}/{len(passes)} window lengths within {cfg.k_sigma:g} stderr "
              f"{'PASS' if all(passes) else 'FAIL'}")
    return 0


def cmd_mu(cfg: ExperimentConfig) -> int:
    spec = _require(cfg, "dist")
    s = _require(cfg, "s")
    est = estimate_mu(spec, s, cfg.n_trials, cfg.seed, cfg.threads)

    row = {"dist": spec.label(), "s": s, "n_trials": est.n_trials, "mean": est.mean, "stderr": est.stderr,
           "ci_lo": est.ci95_lo, "ci_hi": est.ci95_hi, "target": est.target}
    write_csv(cfg.out_dir / "mu.csv", list(row), [row])
    _emit(summary_line("mu", est.mean, est.target, verdict(est, cfg.k_sigma)))
    return 0


def _residual_samples(cfg: ExperimentConfig) -> ResidualSampleSet:
    spec = _require(cfg, "dist")
    strat = cfg.strategy or LargeUniform(theta=DEFAULT_THETA_MEANS * spec.mean())
    return sample_residuals(spec, strat, cfg.n_trials, cfg.seed, cfg.threads)


def cmd_residual(cfg: ExperimentConfig) -> int:
    spec = cfg.dist
    samples = _residual_samples(cfg)
    write_csv(cfg.out_dir / "residuals.csv", RESIDUAL_CSV_COLUMNS, samples.rows())

    residual_ks = ks_residuals(samples, spec)
    buckets = conditional_uniformity_check(samples, cfg.bucket_width, exact_values=bool(spec.atoms()))
    write_json(cfg.out_dir / "residual_ks.json", {
        "residuals": residual_ks.to_dict(),
        "ages": ks_ages(samples, spec).to_dict(),
        "conditional_uniformity": [b.to_dict() for b in buckets],
    })

    if cfg.plot:
        grid = np.linspace(0.0, spec.quantile(0.999), 400)
        plot_histogram(cfg.out_dir / "residuals.svg", samples.residuals, "Residual life at window start",
                       "residual", reference=(grid, [residual_pdf(spec, x) for x in grid]))

    tested = [b for b in buckets if not b.skipped]
    passed = residual_ks.passed and all(b.report.passed for b in tested)
    _emit(summary_line("residual", residual_ks.statistic, residual_ks.threshold, passed))
    return 0


def cmd_lengthbias(cfg: ExperimentConfig) -> int:
    spec = cfg.dist
    samples = _residual_samples(cfg)
    write_csv(cfg.out_dir / "lengthbias.csv", ["trial", "containing_interval"],
              ({"trial": r["trial"], "containing_interval": r["containing_interval"]} for r in samples.rows()))

    if spec.atoms():
        frequencies = atom_frequency_check(samples, spec)
        write_json(cfg.out_dir / "lengthbias.json", [f._asdict() for f in frequencies])
        worst = max(abs(f.observed - f.expected) for f in frequencies)
        _emit(summary_line("lengthbias", worst, 0.0, all(f.within for f in frequencies)))
        return 0

    report = ks_containing(samples, spec)
    write_json(cfg.out_dir / "lengthbias.json", report.to_dict())
    if cfg.plot:
        upper = float(np.max(samples.containing_intervals))
        grid = np.linspace(0.0, upper, 400)
        plot_histogram(cfg.out_dir / "lengthbias.svg", samples.containing_intervals,
                       "Interval containing the window start", "length",
                       reference=(grid, grid * density(spec, grid) / spec.mean()))
    _emit(summary_line("lengthbias", report.statistic, report.threshold, report.passed))
    return 0


def cmd_mod1(cfg: ExperimentConfig) -> int:
    spec = _require(cfg, "dist")
    n = _require(cfg, "n")
    values = mod1_samples(spec, n, cfg.n_trials, cfg.seed, cfg.threads)
    write_csv(cfg.out_dir / "mod1.csv", ["trial", "value"],
              ({"trial": i, "value": float(v)} for i, v in enumerate(values)))

    report = ks_uniform(values)
    if cfg.plot:
        plot_histogram(cfg.out_dir / "mod1.svg", values, f"S_{n} mod 1", "value",
                       reference=([0.0, 1.0], [1.0, 1.0]))
    _emit(summary_line("mod1", report.statistic, report.threshold, report.passed))
    return 0


def cmd_span(cfg: ExperimentConfig) -> int:
    spec = _require(cfg, "dist")
    report = detect_span(spec, cfg.m_max, cfg.tol, fallback_draws=cfg.n_trials, seed=cfg.seed)
    scan = report.scan

    write_json(cfg.out_dir / "span.json", report.to_dict())
    write_csv(cfg.out_dir / "gamma_scan.csv", ["m", "re", "im", "modulus"], (c.to_dict() for c in scan))
    if cfg.plot:
        plot_lines(cfg.out_dir / "gamma_scan.svg", [c.m for c in scan], {"|gamma_m|": [c.modulus for c in scan]},
                   title="Characteristic coefficients", xlabel="m", ylabel="modulus")

    _emit(f"span: is_arithmetic={report.is_arithmetic} span={report.span!r} "
          f"lattice={report.lattice!r} shift_theta={report.shift_theta!r}")
    return 0


def cmd_zm(cfg: ExperimentConfig) -> int:
    m_list = _require(cfg, "m_list")
    draws = cfg.n or cfg.n_trials
    reports = zm_limit_check(m_list, draws, cfg.seed)

    rows = []
    for m, report in zip(m_list, reports):
        rows.append({"m": m, "statistic": report.statistic, "threshold": report.threshold,
                     "pass": report.passed, "cdf_gap": zm_cdf_gap(m, draws, cfg.seed, allow_integer=True)})
    write_csv(cfg.out_dir / "zm.csv", ["m", "statistic", "threshold", "pass", "cdf_gap"], rows)

    if cfg.plot:
        plot_lines(cfg.out_dir / "zm.svg", m_list, {"KS statistic": [r.statistic for r in reports]},
                   title="Z_m against U(0, 1)", xlabel="m", ylabel="D")
    _emit(summary_line(f"zm m={m_list[-1]!r}", reports[-1].statistic, reports[-1].threshold, reports[-1].passed))
    return 0


def cmd_gauss_mod1(cfg: ExperimentConfig) -> int:
    sigma = _require(cfg, "sigma")
    draws = cfg.n or cfg.n_trials
    report = gaussian_mod1_ks(sigma, cfg.mu, draws, cfg.seed)

    row = {"sigma": sigma, "mu": cfg.mu, "n": report.n, "statistic": report.statistic,
           "threshold": report.threshold, "pass": report.passed}
    write_csv(cfg.out_dir / "gauss_mod1.csv", list(row), [row])
    _emit(summary_line("gauss-mod1", report.statistic, report.threshold, report.passed))
    return 0


def cmd_transform(cfg: ExperimentConfig) -> int:
    spec = _require(cfg, "dist")
    strat = _require(cfg, "strategy")
    u = _require(cfg, "u")
    check = transform_expectation_check(spec, strat, u, cfg.n_trials, cfg.seed, cfg.threads)

    write_csv(cfg.out_dir / "transform.csv", TRANSFORM_CSV_COLUMNS, check.rows)
    write_json(cfg.out_dir / "transform_summary.json", check.summary())
    if cfg.plot:
        deltas = np.array([r["delta"] for r in check.rows])
        plot_histogram(cfg.out_dir / "transform.svg", deltas, "modified - original count", "delta",
                       bins=np.arange(deltas.min() - 0.5, deltas.max() + 1.5))

    passed = check.identity_violations == 0 and _within(check.mean_delta, 0.0, check.delta_stderr, cfg.k_sigma)
    _emit(summary_line("transform mean_delta", check.mean_delta, 0.0, passed))
    return 0


def cmd_floor(cfg: ExperimentConfig, command: str = "floor") -> int:
    if cfg.converse is not None:
        rows = converse_probe(cfg.converse)
        write_csv(cfg.out_dir / "converse.csv", CONVERSE_CSV_COLUMNS, (r._asdict() for r in rows))
        violations = converse_violations(rows)
        worst = max(abs(r.lhs - r.rhs) for r in rows)
        _emit(f"{command} converse={cfg.converse}: {len(violations)} violation(s), max gap {worst!r}")
        return 0

    c = _require(cfg, "c")
    draws = cfg.n or cfg.n_trials
    if cfg.noise is not None:
        result = floor_expectation_noisy(c, cfg.noise, draws, cfg.seed)
    else:
        result = floor_expectation_mc(c, draws, cfg.seed, cfg.rounding)

    write_csv(cfg.out_dir / f"{command}.csv", FLOOR_CSV_COLUMNS, [result.to_dict()])
    _emit(summary_line(command, result.estimate, result.exact,
                       _within(result.estimate, result.exact, result.stderr, cfg.k_sigma)))
    return 0


def cmd_perturbed(cfg: ExperimentConfig) -> int:
    t = _require(cfg, "t")
    theta = _require(cfg, "theta")
    u = _require(cfg, "u")
    est = estimate_perturbed_deterministic(t, theta, u, cfg.noise, cfg.noise_end, cfg.n_trials, cfg.seed, cfg.threads)

    row = {"t": t, "theta": theta, "u": u, "n_trials": est.n_trials, "mean": est.mean, "stderr": est.stderr,
           "ci_lo": est.ci95_lo, "ci_hi": est.ci95_hi, "target": est.target}
    write_csv(cfg.out_dir / "perturbed.csv", list(row), [row])
    _emit(summary_line("perturbed", est.mean, est.target, verdict(est, cfg.k_sigma)))
    return 0


COMMANDS: Dict[str, Callable[[ExperimentConfig], int]] = {
    "blackwell": cmd_blackwell,
    "mu": cmd_mu,
    "residual": cmd_residual,
    "lengthbias": cmd_lengthbias,
    "mod1": cmd_mod1,
    "span": cmd_span,
    "zm": cmd_zm,
    "gauss-mod1": cmd_gauss_mod1,
    "transform": cmd_transform,
    "floor": cmd_floor,
    "listing1": lambda cfg: cmd_blackwell(cfg, "listing1"),
    "listing2": lambda cfg: cmd_floor(cfg, "listing2"),
    "perturbed": cmd_perturbed,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse argv, run the subcommand and map failures to exit codes

    Returns:
        0 on success, 2 on usage or validation errors, 3 on runtime errors
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    settings = get_settings()
    configure_logging(args.log_level or settings.log_level, settings.log_file)

    try:
        config = build_config(args)
        logger.info(f"Running {args.command} with seed {config.seed}")
        return COMMANDS[args.command](config)
    except RenewalLabError as exc:
        logger.error(f"{args.command} failed: {exc}")
        print(exc.to_response().model_dump_json(), file=sys.stderr)
        return exc.exit_code
    except Exception as exc:
        logger.exception(f"Unhandled exception in {args.command}")
        response = create_error_response(ErrorCode.PROCESSING_FAILED, f"{type(exc).__name__}: {exc}")
        print(response.model_dump_json(), file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(run())
