#!/usr/bin/env python3
"""
torwave command line.

Every command writes JSON or CSV to stdout or --out. Exit codes: 0 success,
1 failed acceptance preset, 2 invalid input, 3 numerical failure.
"""

import argparse
import logging
import math
import sys
from typing import Any, Callable, Dict, List, NoReturn, Optional, Sequence

from torwave.config import load_settings
from torwave.curve import (
    CurveKind,
    ValidationReport,
    make_analytic_oval,
    parse_curve,
    validate_curve,
)
from torwave.errors import NumericError, PresetFailure, TorwaveError, ValidationError
from torwave.experiments import (
    DEFAULT_EPS,
    ConcentrationRow,
    ExperimentReport,
    RepulsionResult,
    SieveScan,
    TailRow,
    UniversalityReport,
    VarianceTerm,
    concentration_scan,
    large_sieve_scan,
    repulsion_probe,
    run_mc,
    summarize,
    universality_gap,
    variance_leading_term,
)
from torwave.export_utils import (
    TAIL_COLUMNS,
    csv_columns,
    export_report,
    is_json_file,
    load_count_json,
    load_json,
    load_report_json,
    load_report_rows,
    load_sample_json,
    load_spec_json,
    load_trial_csv,
    report_from_dict,
    write_output,
)
from torwave.lattice import (
    angular_fourier,
    arc_statistic_B,
    enumerate_lattice_points,
    multiplicity_formula,
    spec_to_dict,
    spectral_matrix,
)
from torwave.presets import PRESETS, PresetOptions, run_preset
from torwave.wave import (
    RestrictedWave,
    WaveSample,
    parse_ensemble,
    sample_coefficients,
    sample_dump,
)
from torwave.zeros import (
    GridConfig,
    IntervalClassification,
    classify_intervals,
    count_zeros,
    default_stability_params,
    small_value_measure,
)

logger = logging.getLogger("torwave.cli")

EXIT_OK = 0
EXIT_PRESET_FAILED = 1
EXIT_INVALID = 2
EXIT_NUMERIC = 3


def configure_logging(level_name: str) -> None:
    """Configure root logging on stderr so stdout stays machine-readable."""
    level = getattr(logging, level_name.upper(), None)
    if not isinstance(level, int):
        raise ValidationError(f"unknown log level {level_name!r}")
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


# -- command handlers -------------------------------------------------------------


def grid_config(args: argparse.Namespace) -> GridConfig:
    return GridConfig(
        points_per_lambda=args.points_per_lambda,
        bisection_tol=args.bisection_tol,
        tangency_threshold=args.tangency_threshold,
        certified_mode=args.certified,
    )


def lattice_record(m: int, window: Optional[float]) -> Dict[str, Any]:
    spec = enumerate_lattice_points(m)
    record = spec_to_dict(spec)
    record["factorization"] = [list(pair) for pair in spec.factorization]
    record["multiplicity_formula"] = multiplicity_formula(spec.factorization)
    if spec.N:
        record["spectral_matrix"] = [list(row) for row in spectral_matrix(spec)]
        record["tau4"] = angular_fourier(spec, 4)
        record["arc_B"] = arc_statistic_B(spec, window)
    return record


def cmd_lattice(args: argparse.Namespace) -> Any:
    if args.replay:
        return lattice_record(load_spec_json(args.replay).m, args.window)
    return lattice_record(args.m, args.window)


def cmd_curve_validate(args: argparse.Namespace) -> Any:
    if args.replay:
        return load_report_json(args.replay, ValidationReport)
    curve = parse_curve(args.curve)
    if args.native:
        if curve.kind is not CurveKind.ANALYTIC_OVAL:
            raise ValidationError("--native only applies to oval curves")
        a, b = curve.semi_axes
        curve = make_analytic_oval(a, b, curve.center, reparametrize=False)
    report = validate_curve(curve, args.grid)
    if not report.passed:
        logger.warning("curve %s failed validation", args.curve)
    return report


def _sample(args: argparse.Namespace) -> WaveSample:
    """The sample named by --m/--ensemble/--seed/--trial, or the one dumped at --sample."""
    if args.sample:
        return load_sample_json(args.sample)
    spec = enumerate_lattice_points(args.m)
    return sample_coefficients(spec, parse_ensemble(args.ensemble), args.seed, args.trial)


def cmd_count(args: argparse.Namespace) -> Any:
    if args.replay:
        return load_count_json(args.replay)
    sample = _sample(args)
    if args.dump_sample:
        write_output(export_report(sample_dump(sample), "json"), args.dump_sample)
    return count_zeros(RestrictedWave(sample, parse_curve(args.curve)), grid_config(args))


def _batch(args: argparse.Namespace) -> Any:
    spec = enumerate_lattice_points(args.m)
    curve = parse_curve(args.curve)
    ensemble = parse_ensemble(args.ensemble)
    if args.replay:
        return load_trial_csv(args.replay, spec, curve, ensemble)
    return run_mc(spec, curve, ensemble, args.trials, args.seed, grid_config(args), args.workers)


def _replayed_summary(args: argparse.Namespace) -> Optional[ExperimentReport]:
    if args.replay and is_json_file(args.replay):
        return load_report_json(args.replay, ExperimentReport)
    return None


def cmd_mc(args: argparse.Namespace) -> Any:
    report = _replayed_summary(args)
    if report is not None:
        if args.format == "csv":
            raise ValidationError("a summary JSON has no trial table; replay the trial CSV")
        return report
    batch = _batch(args)
    if args.format == "csv":
        return batch
    return summarize(batch, args.eps)


def cmd_tail(args: argparse.Namespace) -> Any:
    report = _replayed_summary(args)
    if report is None and args.replay and csv_columns(args.replay) == TAIL_COLUMNS:
        return [row.to_dict() for row in load_report_rows(args.replay, TailRow)]
    if report is None:
        report = summarize(_batch(args), args.eps)
    if args.format == "csv":
        return [row.to_dict() for row in report.tail_table]
    return report


def cmd_repulsion(args: argparse.Namespace) -> Any:
    if args.replay:
        return load_report_json(args.replay, RepulsionResult)
    return repulsion_probe(
        enumerate_lattice_points(args.m),
        parse_curve(args.curve),
        args.t,
        parse_ensemble(args.ensemble),
        args.alpha,
        args.beta,
        args.trials,
        args.seed,
    )


def cmd_sieve(args: argparse.Namespace) -> Any:
    if args.replay:
        return load_report_json(args.replay, SieveScan)
    return large_sieve_scan(
        enumerate_lattice_points(args.m),
        parse_curve(args.curve),
        parse_ensemble(args.ensemble),
        args.trials,
        args.seed,
        args.separation,
    )


def cmd_variance_term(args: argparse.Namespace) -> Any:
    if args.replay:
        return load_report_json(args.replay, VarianceTerm)
    return variance_leading_term(
        enumerate_lattice_points(args.m), parse_curve(args.curve), args.quadrature_points
    )


def cmd_universality(args: argparse.Namespace) -> Any:
    if args.replay:
        return load_report_json(args.replay, UniversalityReport)
    names = [n for n in args.ensembles.split(",") if n]
    if len(names) != 2:
        raise ValidationError("--ensembles takes two names, e.g. gaussian,rademacher")
    return universality_gap(
        enumerate_lattice_points(args.m),
        parse_curve(args.curve),
        (parse_ensemble(names[0]), parse_ensemble(names[1])),
        args.trials,
        args.seed,
        grid_config(args),
        args.workers,
    )


def cmd_scan(args: argparse.Namespace) -> Any:
    if args.replay:
        rows = load_report_rows(args.replay, ConcentrationRow)
    else:
        rows = concentration_scan(
            args.m_list,
            parse_curve(args.curve),
            parse_ensemble(args.ensemble),
            args.eps_value,
            args.trials,
            args.seed,
            grid_config(args),
            args.workers,
        )
    return [row.to_dict() for row in rows]


def cmd_classify(args: argparse.Namespace) -> Any:
    if args.replay:
        data = load_json(args.replay)
        record = report_from_dict(IntervalClassification, data).to_dict()
        if "small_value_measure" not in data:
            raise ValidationError("classification record is missing 'small_value_measure'")
        measure = data["small_value_measure"]
        record["small_value_measure"] = math.nan if measure is None else float(measure)
        return record
    sample = _sample(args)
    spec = sample.spec
    spec.require_points(4)
    params = default_stability_params(spec.N)
    alpha = params.alpha if args.alpha is None else args.alpha
    beta = params.beta if args.beta is None else args.beta
    delta = params.delta if args.delta is None else args.delta
    R = params.R if args.R is None else args.R
    rw = RestrictedWave(sample, parse_curve(args.curve))
    record = classify_intervals(rw, alpha, beta, R, delta, args.check_density).to_dict()
    record["small_value_measure"] = small_value_measure(rw, alpha, beta)
    return record


def cmd_accept(args: argparse.Namespace) -> Any:
    options = PresetOptions(
        seed=args.seed, workers=args.workers, trials=args.trials, cfg=grid_config(args)
    )
    table = run_preset(args.name, options)
    print(table.to_string(index=False))
    failed = int((~table["passed"]).sum())
    if failed:
        raise PresetFailure(f"{args.name}: {failed} of {len(table)} checks failed")
    return None


# -- parser ---------------------------------------------------------------------


class CliParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors are a single stderr line and exit 2."""

    def error(self, message: str) -> NoReturn:
        self.exit(EXIT_INVALID, f"error: {self.prog}: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be in [0, 2**64)")
    return value


def build_parser() -> argparse.ArgumentParser:
    settings = load_settings()
    parser = CliParser(
        prog="torwave",
        description="Nodal intersections of arithmetic random waves with curves on the torus",
    )
    parser.add_argument("--log-level", default=settings.log_level,
                        help="logging level for stderr (env TORWAVE_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--workers", type=_positive_int, default=settings.workers,
                        help="worker processes (env TORWAVE_WORKERS)")
    common.add_argument("--points-per-lambda", type=int, default=50)
    common.add_argument("--bisection-tol", type=float, default=1e-12)
    common.add_argument("--tangency-threshold", type=float, default=1e-4)
    common.add_argument("--certified", action="store_true")

    wave = argparse.ArgumentParser(add_help=False)
    wave.add_argument("--m", type=_positive_int, default=25)
    wave.add_argument("--curve", default="circle:0.5,0.5")
    wave.add_argument("--ensemble", default="gaussian")

    def command(name: str, handler: Callable[[argparse.Namespace], Any],
                parents: List[argparse.ArgumentParser], help_text: str,
                replay: Optional[str] = None) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=parents, help=help_text)
        p.set_defaults(handler=handler)
        if replay is not None:
            p.add_argument("--replay", default=None, metavar="PATH",
                           help=f"re-export {replay} instead of recomputing")
        return p

    p = command("lattice", cmd_lattice, [common], "lattice points and arithmetic statistics",
                replay="lattice JSON written by this command")
    p.add_argument("--m", type=_positive_int, default=1)
    p.add_argument("--window", type=float, default=None, help="arc chord window (default m^(1/4))")

    p = command("curve-validate", cmd_curve_validate, [common], "check a curve",
                replay="a validation JSON")
    p.add_argument("--curve", default="circle:0.5,0.5")
    p.add_argument("--grid", type=_positive_int, default=4096)
    p.add_argument("--native", action="store_true", help="skip arc-length reparametrization")

    p = command("count", cmd_count, [common, wave], "count zeros of one sample",
                replay="a count JSON")
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--sample", default=None, metavar="PATH",
                   help="count a sample written by --dump-sample")
    p.add_argument("--dump-sample", default=None, metavar="PATH",
                   help="also write the sampled coefficients as JSON")

    for name, handler, default_format in (("mc", cmd_mc, "csv"), ("tail", cmd_tail, "json")):
        p = command(name, handler, [common, wave], f"{name} over many samples",
                    replay="a trial CSV, summary JSON or tail CSV")
        p.add_argument("--trials", type=_positive_int, default=1000)
        p.add_argument("--eps", type=float, nargs="+", default=list(DEFAULT_EPS))
        p.set_defaults(format=default_format)

    p = command("repulsion", cmd_repulsion, [common, wave], "small-value probability at t",
                replay="a repulsion JSON")
    p.add_argument("--t", type=float, default=0.3)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--trials", type=_positive_int, default=1_000_000)

    p = command("sieve", cmd_sieve, [common, wave], "large-sieve ratios",
                replay="a sieve JSON")
    p.add_argument("--separation", type=float, default=1e-3)
    p.add_argument("--trials", type=_positive_int, default=1000)

    p = command("variance-term", cmd_variance_term, [common, wave], "leading variance term",
                replay="a variance-term JSON")
    p.add_argument("--quadrature-points", type=int, default=256)

    p = command("universality", cmd_universality, [common, wave], "moment gaps between laws",
                replay="a universality JSON")
    p.add_argument("--ensembles", default="gaussian,rademacher")
    p.add_argument("--trials", type=_positive_int, default=20_000)

    p = command("scan", cmd_scan, [common, wave], "tail decay along a chain of m",
                replay="scan rows as JSON or CSV")
    p.add_argument("--m-list", type=_positive_int, nargs="+", default=[5, 65, 1105, 32045])
    p.add_argument("--eps", dest="eps_value", type=float, default=0.2)
    p.add_argument("--trials", type=_positive_int, default=20_000)

    p = command("classify", cmd_classify, [common, wave], "stable and unstable intervals",
                replay="a classification JSON")
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--sample", default=None, metavar="PATH",
                   help="classify a sample written by count --dump-sample")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--R", type=float, default=None)
    p.add_argument("--check-density", type=int, default=32)

    p = command("accept", cmd_accept, [common], "run a named acceptance preset")
    p.add_argument("name", help=f"one of: {', '.join(sorted(PRESETS))}")
    p.add_argument("--trials", type=_positive_int, default=None,
                   help="override the preset's trial count")
    p.set_defaults(seed=42)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run one command and return the exit code."""
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    try:
        configure_logging(args.log_level)
        result = args.handler(args)
        if result is not None:
            write_output(export_report(result, args.format), args.out)
        if args.command == "curve-validate" and not result.passed:
            return EXIT_INVALID
        return EXIT_OK
    except PresetFailure as exc:
        logger.error("%s", exc)
        return EXIT_PRESET_FAILED
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except TorwaveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
