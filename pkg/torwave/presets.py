"""
Named acceptance suites.

Each preset runs one experiment at its reference size and returns a list of
checks; ``run_preset`` turns them into a pass/fail table. Trial counts can be
scaled down through ``PresetOptions.trials`` for quick runs.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from .curve import make_analytic_oval, make_circle
from .errors import ValidationError
from .experiments import (
    concentration_scan,
    exceptional_rate,
    large_sieve_scan,
    perturbation_scan,
    repulsion_closed_form,
    repulsion_probe,
    run_mc,
    summarize,
    tails_non_increasing,
    universality_gap,
    variance_leading_term,
)
from .export_utils import export_report
from .lattice import (
    angular_fourier,
    arc_statistic_B,
    arc_statistic_B_bruteforce,
    enumerate_lattice_points,
    multiplicity_formula,
    spectral_matrix,
)
from .wave import CoefficientEnsemble, RestrictedWave, eval_restricted, sample_from_mapping
from .zeros import GridConfig, count_zeros

logger = logging.getLogger(__name__)

DEFAULT_SEED = 42
REFERENCE_CURVE = (0.5, 0.5)
EXHAUSTIVE_LIMIT = 10_000
ARC_ORACLE_LIMIT = 2_500
CONCENTRATION_CHAIN = (5, 65, 1105, 32045)


@dataclass(frozen=True)
class PresetOptions:
    seed: int = DEFAULT_SEED
    workers: Optional[int] = None
    trials: Optional[int] = None
    cfg: GridConfig = field(default_factory=GridConfig)

    def scaled(self, reference: int) -> int:
        return reference if self.trials is None else int(self.trials)


@dataclass(frozen=True)
class Check:
    preset: str
    name: str
    passed: bool
    value: float
    target: str


PresetFn = Callable[[PresetOptions], List[Check]]
PRESETS: Dict[str, Tuple[str, PresetFn]] = {}


def preset(name: str, description: str) -> Callable[[PresetFn], PresetFn]:
    def register(fn: PresetFn) -> PresetFn:
        PRESETS[name] = (description, fn)
        return fn

    return register


def _check(preset_name: str, name: str, passed: bool, value: float, target: str) -> Check:
    return Check(preset_name, name, bool(passed), float(value), target)


@preset("lattice-exhaustive", "multiplicity formula, spectral matrix and arc oracle for m <= 10^4")
def _lattice_exhaustive(options: PresetOptions) -> List[Check]:
    bound = math.isqrt(EXHAUSTIVE_LIMIT)
    axis = np.arange(-bound, bound + 1)
    norms = (axis[:, None] ** 2 + axis[None, :] ** 2).ravel()
    oracle = np.bincount(norms[norms <= EXHAUSTIVE_LIMIT], minlength=EXHAUSTIVE_LIMIT + 1)
    formula_bad = matrix_bad = arc_bad = 0
    for m in range(1, EXHAUSTIVE_LIMIT + 1):
        spec = enumerate_lattice_points(m)
        if multiplicity_formula(spec.factorization) != oracle[m] or spec.N != oracle[m]:
            formula_bad += 1
        if spec.N == 0:
            continue
        half = spec.N * m // 2
        if spectral_matrix(spec) != ((half, 0), (0, half)):
            matrix_bad += 1
        if m <= ARC_ORACLE_LIMIT and arc_statistic_B(spec) != arc_statistic_B_bruteforce(spec):
            arc_bad += 1
    name = "lattice-exhaustive"
    return [
        _check(name, "formula == scan", formula_bad == 0, formula_bad, "0 mismatches"),
        _check(name, "spectral matrix == (Nm/2) I", matrix_bad == 0, matrix_bad, "0 mismatches"),
        _check(name, "arc window == brute force", arc_bad == 0, arc_bad, "0 mismatches"),
    ]


@preset("angular", "fourth angular Fourier coefficients and odd-frequency vanishing")
def _angular(options: PresetOptions) -> List[Check]:
    checks = []
    for m, expected in ((1, 1.0), (2, -1.0), (5, -0.28)):
        value = angular_fourier(enumerate_lattice_points(m), 4)
        checks.append(
            _check("angular", f"tau({m}, 4)", abs(value - expected) <= 1e-12, value, f"{expected}")
        )
    odd = max(
        abs(angular_fourier(enumerate_lattice_points(m), k))
        for m in (1, 2, 5, 25, 65, 325)
        for k in (1, 3, 5, 7)
    )
    checks.append(_check("angular", "odd k", odd == 0.0, odd, "0 exactly"))
    return checks


@preset("closed-form", "m=1 cosine wave on two circles")
def _closed_form(options: PresetOptions) -> List[Check]:
    spec = enumerate_lattice_points(1)
    sample = sample_from_mapping(spec, {(1, 0): 1.0})
    crossing = count_zeros(RestrictedWave(sample, make_circle((0.25, 0.5))), options.cfg)
    missing = count_zeros(RestrictedWave(sample, make_circle((0.5, 0.5))), options.cfg)
    error = (
        float(np.max(np.abs(crossing.roots - np.array([0.25, 0.75]))))
        if crossing.count == 2
        else math.inf
    )
    slope = abs(eval_restricted(RestrictedWave(sample, make_circle((0.25, 0.5))), 0.25, 1))
    return [
        _check("closed-form", "count at (1/4, 1/2)", crossing.count == 2, crossing.count, "2"),
        _check("closed-form", "roots 1/4, 3/4", error <= 1e-10, error, "<= 1e-10"),
        _check("closed-form", "count at (1/2, 1/2)", missing.count == 0, missing.count, "0"),
        _check(
            "closed-form",
            "|f'(1/4)|",
            abs(slope - math.pi * math.sqrt(2.0)) <= 1e-12,
            slope,
            "pi sqrt 2",
        ),
    ]


def _mean_checks(name: str, m: int, options: PresetOptions) -> List[Check]:
    spec = enumerate_lattice_points(m)
    batch = run_mc(
        spec,
        make_circle(REFERENCE_CURVE),
        CoefficientEnsemble.GAUSSIAN,
        options.scaled(20_000),
        options.seed,
        options.cfg,
        options.workers,
    )
    report = summarize(batch)
    logger.info("%s: mean=%.5f se=%.5f var/(m/N)=%.4f", name, report.mean,
                report.mean_se, report.variance_ratio)
    return [
        _check(name, "mean vs sqrt(2m)", report.mean_within(), report.mean,
               f"{report.theory_mean:.6f} +- 3SE + 0.5%"),
        _check(name, "suspect rate", report.suspect_rate < 1e-3, report.suspect_rate, "< 1e-3"),
        _check(name, "Var / (m/N)", 0.0 < report.variance_ratio < 20.0,
               report.variance_ratio, "in (0, 20)"),
    ]


@preset("mean-m25", "expected nodal count for m=25")
def _mean_m25(options: PresetOptions) -> List[Check]:
    return _mean_checks("mean-m25", 25, options)


@preset("mean-m65", "expected nodal count for m=65")
def _mean_m65(options: PresetOptions) -> List[Check]:
    return _mean_checks("mean-m65", 65, options)


@preset("mean-m325", "expected nodal count for m=325")
def _mean_m325(options: PresetOptions) -> List[Check]:
    return _mean_checks("mean-m325", 325, options)


@preset("variance-scale", "Var / (m/N) for m in 25, 65, 325")
def _variance_scale(options: PresetOptions) -> List[Check]:
    checks = []
    for m in (25, 65, 325):
        ratio = next(
            c for c in _mean_checks("variance-scale", m, options) if c.name == "Var / (m/N)"
        )
        checks.append(Check(ratio.preset, f"{ratio.name} m={m}", ratio.passed,
                            ratio.value, ratio.target))
    return checks


@preset("variance-term", "leading variance term: circle cancellation and quadrature agreement")
def _variance_term(options: PresetOptions) -> List[Check]:
    checks = []
    circle = make_circle(REFERENCE_CURVE)
    for m in (2, 25, 65, 325):
        spec = enumerate_lattice_points(m)
        term = variance_leading_term(spec, circle, 256)
        limit = 1e-6 * spec.m / spec.N
        checks.append(_check("variance-term", f"circle m={m}", abs(term.value) <= limit,
                             term.value, f"|.| <= {limit:.3g}"))
        checks.append(_check("variance-term", f"tensor vs factorized m={m}",
                             term.rel_diff <= 1e-8, term.rel_diff, "<= 1e-8"))
    oval = variance_leading_term(
        enumerate_lattice_points(25), make_analytic_oval(2.0, 1.0, REFERENCE_CURVE), 256
    )
    checks.append(_check("variance-term", "oval(2,1) m=25 tensor vs factorized",
                         oval.rel_diff <= 1e-8, oval.rel_diff, "<= 1e-8"))
    return checks


@preset("repulsion", "small-value probability against the gaussian closed form")
def _repulsion(options: PresetOptions) -> List[Check]:
    spec = enumerate_lattice_points(325)
    circle = make_circle(REFERENCE_CURVE)
    trials = options.scaled(1_000_000)
    gauss = repulsion_probe(spec, circle, 0.3, CoefficientEnsemble.GAUSSIAN, 0.1, 0.1,
                            trials, options.seed)
    rade = repulsion_probe(spec, circle, 0.3, CoefficientEnsemble.RADEMACHER, 0.1, 0.1,
                           trials, options.seed)
    target = repulsion_closed_form()
    return [
        _check("repulsion", "gaussian ratio", 0.81 <= gauss.ratio <= 0.99, gauss.ratio,
               f"{target:.4f} +- 10%"),
        _check("repulsion", "rademacher ratio", rade.ratio <= 2.0, rade.ratio, "<= 2"),
    ]


def _concentration_rows(options: PresetOptions) -> list:
    return concentration_scan(
        CONCENTRATION_CHAIN,
        make_circle(REFERENCE_CURVE),
        CoefficientEnsemble.GAUSSIAN,
        0.2,
        options.scaled(20_000),
        options.seed,
        options.cfg,
        options.workers,
    )


def _markov_checks(name: str, rows: list) -> List[Check]:
    return [
        _check(name, f"tail <= 1/(N eps^2) N={row.N}", row.markov_ok, row.tail,
               f"<= {row.markov:.4g}")
        for row in rows
    ]


@preset("markov", "empirical tails against the Markov bound")
def _markov(options: PresetOptions) -> List[Check]:
    return _markov_checks("markov", _concentration_rows(options))


@preset("concentration", "tails decrease along N = 8, 16, 32, 64")
def _concentration(options: PresetOptions) -> List[Check]:
    rows = _concentration_rows(options)
    checks = _markov_checks("concentration", rows)
    checks.append(_check("concentration", "non-increasing within 2 SE",
                         tails_non_increasing(rows, 2.0), rows[-1].tail, "monotone"))
    return checks


@preset("universality", "gaussian vs rademacher mean gap at m=325")
def _universality(options: PresetOptions) -> List[Check]:
    spec = enumerate_lattice_points(325)
    report = universality_gap(
        spec,
        make_circle(REFERENCE_CURVE),
        (CoefficientEnsemble.GAUSSIAN, CoefficientEnsemble.RADEMACHER),
        options.scaled(20_000),
        options.seed,
        options.cfg,
        options.workers,
    )
    allowed = 3.0 * report.mean_se + 0.02 * spec.lam
    return [
        _check("universality", "mean gap", report.within_budget(spec.lam), report.mean_gap,
               f"<= {allowed:.4f}"),
    ]


@preset("determinism", "trial CSV identical for 1, 4 and 8 workers")
def _determinism(options: PresetOptions) -> List[Check]:
    spec = enumerate_lattice_points(25)
    circle = make_circle(REFERENCE_CURVE)
    trials = options.scaled(2_000)
    outputs = {
        workers: export_report(
            run_mc(spec, circle, CoefficientEnsemble.GAUSSIAN, trials, options.seed,
                   options.cfg, workers, chunk_size=64),
            "csv",
        )
        for workers in (1, 4, 8)
    }
    same = outputs[1] == outputs[4] == outputs[8]
    return [_check("determinism", "byte-identical CSV", same, len(outputs[1]), "equal")]


@preset("sieve", "large-sieve ratios for d = 1, 2 at m=325")
def _sieve(options: PresetOptions) -> List[Check]:
    scan = large_sieve_scan(
        enumerate_lattice_points(325),
        make_circle(REFERENCE_CURVE),
        CoefficientEnsemble.GAUSSIAN,
        options.scaled(1_000),
        options.seed,
        1e-3,
    )
    return [
        _check("sieve", "max d=1 finite", math.isfinite(scan.max_d1), scan.max_d1, "finite"),
        _check("sieve", "max d=2 finite", math.isfinite(scan.max_d2), scan.max_d2, "finite"),
        _check("sieve", "d=2 / d=1", 0.01 <= scan.order_ratio <= 100.0, scan.order_ratio,
               "within a factor 100"),
    ]


@preset("perturbation", "roots in stable intervals survive perturbations of norm delta^2")
def _perturbation(options: PresetOptions) -> List[Check]:
    scan = perturbation_scan(
        enumerate_lattice_points(325),
        make_circle(REFERENCE_CURVE),
        options.scaled(100),
        options.seed,
        cfg=options.cfg,
    )
    return [
        _check("perturbation", "failures", scan.failures == 0, scan.failures, "0"),
        _check("perturbation", "roots checked", scan.roots_checked > 0, scan.roots_checked,
               "> 0"),
    ]


@preset("exceptional", "frequency of exceptional functions (recorded)")
def _exceptional(options: PresetOptions) -> List[Check]:
    result = exceptional_rate(
        enumerate_lattice_points(325),
        make_circle(REFERENCE_CURVE),
        CoefficientEnsemble.GAUSSIAN,
        options.scaled(1_000),
        options.seed,
    )
    return [_check("exceptional", "rate", 0.0 <= result.rate <= 1.0, result.rate, "recorded")]


@preset("grid-oracle", "default grid against a 10x finer grid on 100 samples")
def _grid_oracle(options: PresetOptions) -> List[Check]:
    checks = []
    circle = make_circle(REFERENCE_CURVE)
    finer = options.cfg.finer(10)
    for m in (25, 65, 325):
        spec = enumerate_lattice_points(m)
        coarse = run_mc(spec, circle, CoefficientEnsemble.GAUSSIAN, options.scaled(100),
                        options.seed, options.cfg, options.workers)
        fine = run_mc(spec, circle, CoefficientEnsemble.GAUSSIAN, options.scaled(100),
                      options.seed, finer, options.workers)
        gap = np.abs(coarse.z_values - fine.z_values)
        allowed = np.maximum(coarse.suspects, fine.suspects)
        bad = int(np.sum(gap > allowed))
        checks.append(_check("grid-oracle", f"m={m}", bad == 0, bad, "0 disagreements"))
    return checks


def run_preset(name: str, options: Optional[PresetOptions] = None) -> pd.DataFrame:
    """
    Run a named preset.

    Returns:
        DataFrame with columns preset, check, passed, value, target

    Raises:
        ValidationError: for an unknown preset name
    """
    if name not in PRESETS:
        raise ValidationError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}")
    options = options or PresetOptions()
    _, fn = PRESETS[name]
    checks = fn(options)
    for c in checks:
        level = logging.INFO if c.passed else logging.WARNING
        logger.log(level, "%s / %s: %s (value=%g)", c.preset, c.name,
                   "PASS" if c.passed else "FAIL", c.value)
    return pd.DataFrame(
        {
            "preset": [c.preset for c in checks],
            "check": [c.name for c in checks],
            "passed": [c.passed for c in checks],
            "value": [c.value for c in checks],
            "target": [c.target for c in checks],
        }
    )
