"""
Monte Carlo harness for nodal intersection statistics.

Trials are independent and keyed by (master_seed, trial_index), so batches
can be split over any number of worker processes and reassembled in trial
order without changing a single count.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from numpy.polynomial.legendre import leggauss
from scipy import stats

from .config import load_settings
from .curve import CurveDef, curve_eval
from .errors import TorwaveError, TrialError, ValidationError
from .lattice import EigenvalueSpec, enumerate_lattice_points
from .rng import check_seed, derive_seed, trial_generator
from .wave import (
    CoefficientEnsemble,
    PhaseTable,
    RestrictedWave,
    build_phase_table,
    sample_coefficients,
)
from .zeros import (
    GridConfig,
    StabilityParams,
    classify_intervals,
    count_zeros,
    counting_grid,
    default_stability_params,
    large_sieve_check,
    perturbation_persistence,
)

logger = logging.getLogger(__name__)

MIN_SUMMARY_TRIALS = 100
MIN_REPULSION_TRIALS = 10_000
MIN_UNIVERSALITY_TRIALS = 10_000
MIN_SCAN_POINTS = 8
REPULSION_BLOCK = 8192
DEFAULT_EPS = (0.1, 0.2, 0.3)
MOMENT_ORDERS = (1, 2, 3, 4)

# tags for derive_seed; fixed so that reruns reproduce
TAG_REPULSION = 0x7265
TAG_PERTURB = 0x7074
TAG_SIEVE = 0x7376
TAG_EXCEPTIONAL = 0x6578

# one phase table per (m, curve, grid) per process
_GRID_TABLES: Dict[Tuple[int, str, bool, int], PhaseTable] = {}


@dataclass(frozen=True, eq=False)
class TrialBatch:
    spec: EigenvalueSpec
    curve: CurveDef
    ensemble: CoefficientEnsemble
    master_seed: int
    trials: int
    z_values: np.ndarray
    suspects: np.ndarray

    @property
    def suspects_total(self) -> int:
        return int(np.sum(self.suspects))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "trial": np.arange(self.trials, dtype=np.int64),
                "z": self.z_values.astype(np.int64),
                "suspects": self.suspects.astype(np.int64),
                "seed": np.full(self.trials, self.master_seed, dtype=np.uint64),
            }
        )

    @classmethod
    def from_frame(
        cls,
        frame: pd.DataFrame,
        spec: EigenvalueSpec,
        curve: CurveDef,
        ensemble: CoefficientEnsemble,
    ) -> "TrialBatch":
        missing = {"trial", "z", "suspects", "seed"} - set(frame.columns)
        if missing:
            raise ValidationError(f"trial table is missing columns {sorted(missing)}")
        ordered = frame.sort_values("trial")
        trials = len(ordered)
        if not np.array_equal(ordered["trial"].to_numpy(), np.arange(trials)):
            raise ValidationError("trial indices must be 0..trials-1")
        seeds = ordered["seed"].unique()
        if len(seeds) != 1:
            raise ValidationError("a trial table must carry a single master seed")
        return cls(
            spec=spec,
            curve=curve,
            ensemble=ensemble,
            master_seed=int(seeds[0]),
            trials=trials,
            z_values=ordered["z"].to_numpy(dtype=np.int64),
            suspects=ordered["suspects"].to_numpy(dtype=np.int64),
        )


def _grid_table(spec: EigenvalueSpec, curve: CurveDef, cfg: GridConfig) -> PhaseTable:
    g = cfg.grid_size(spec.lam)
    key = (spec.m, curve.describe(), curve.unit_speed, g)
    table = _GRID_TABLES.get(key)
    if table is None:
        table = build_phase_table(spec, curve, counting_grid(spec.lam, cfg))
        _GRID_TABLES.clear()
        _GRID_TABLES[key] = table
    return table


def _run_chunk(
    spec: EigenvalueSpec,
    curve: CurveDef,
    ensemble: CoefficientEnsemble,
    master_seed: int,
    cfg: GridConfig,
    start: int,
    stop: int,
) -> Tuple[np.ndarray, np.ndarray]:
    table = _grid_table(spec, curve, cfg)
    z = np.empty(stop - start, dtype=np.int64)
    suspects = np.empty(stop - start, dtype=np.int64)
    for offset, trial in enumerate(range(start, stop)):
        try:
            sample = sample_coefficients(spec, ensemble, master_seed, trial)
            result = count_zeros(RestrictedWave(sample, curve, table), cfg)
        except Exception as exc:
            raise TrialError(trial, exc) from exc
        z[offset] = result.count
        suspects[offset] = result.suspects
    return z, suspects


def _chunks(trials: int, chunk_size: int) -> List[Tuple[int, int]]:
    return [(s, min(s + chunk_size, trials)) for s in range(0, trials, chunk_size)]


def run_mc(
    spec: EigenvalueSpec,
    curve: CurveDef,
    ensemble: CoefficientEnsemble,
    trials: int,
    master_seed: int,
    cfg: Optional[GridConfig] = None,
    workers: Optional[int] = None,
    chunk_size: Optional[int] = None,
) -> TrialBatch:
    """
    Count nodal intersections for trials 0..trials-1.

    Args:
        spec: EigenvalueSpec with N >= 4
        curve: Reference curve
        ensemble: Coefficient law
        trials: Number of trials, >= 1
        master_seed: 64-bit seed
        cfg: Grid configuration
        workers: Worker processes; defaults to TORWAVE_WORKERS
        chunk_size: Trials per task; defaults to TORWAVE_CHUNK_SIZE

    Returns:
        TrialBatch whose z_values do not depend on workers or chunk_size

    Raises:
        TrialError: when a trial fails, with its index attached
    """
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    spec.require_points(4)
    seed = check_seed(master_seed)
    cfg = cfg or GridConfig()
    settings = load_settings()
    workers = settings.workers if workers is None else int(workers)
    chunk_size = settings.chunk_size if chunk_size is None else int(chunk_size)
    if workers < 1 or chunk_size < 1:
        raise ValidationError("workers and chunk_size must be >= 1")

    chunks = _chunks(trials, chunk_size)
    logger.info(
        "mc start: m=%d N=%d curve=%s ensemble=%s trials=%d workers=%d",
        spec.m, spec.N, curve.describe(), ensemble.value, trials, workers,
    )
    if workers == 1 or len(chunks) == 1:
        parts = [_run_chunk(spec, curve, ensemble, seed, cfg, a, b) for a, b in chunks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_chunk, spec, curve, ensemble, seed, cfg, a, b)
                for a, b in chunks
            ]
            parts = [f.result() for f in futures]

    z = np.concatenate([p[0] for p in parts])
    suspects = np.concatenate([p[1] for p in parts])
    logger.info(
        "mc done: m=%d trials=%d mean=%.4f suspects=%d",
        spec.m, trials, float(np.mean(z)), int(suspects.sum()),
    )
    return TrialBatch(
        spec=spec,
        curve=curve,
        ensemble=ensemble,
        master_seed=seed,
        trials=trials,
        z_values=z,
        suspects=suspects,
    )


# -- summaries -----------------------------------------------------------------


@dataclass(frozen=True)
class TailRow:
    eps: float
    tail: float
    markov: float
    wilson_low: float
    wilson_high: float
    exceedances: int

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


@dataclass(frozen=True)
class ExperimentReport:
    m: int
    N: int
    lam: float
    trials: int
    mean: float
    mean_se: float
    variance: float
    variance_se: float
    theory_mean: float
    variance_scale: float
    variance_ratio: float
    suspect_rate: float
    skewness: float
    excess_kurtosis: float
    tail_table: Tuple[TailRow, ...]
    notes: Tuple[str, ...] = ()

    def mean_within(self, n_se: float = 3.0, rel_budget: float = 0.005) -> bool:
        """|mean - sqrt(2m)| <= n_se * SE + rel_budget * sqrt(2m)."""
        allowed = n_se * self.mean_se + rel_budget * self.theory_mean
        return abs(self.mean - self.theory_mean) <= allowed

    def to_dict(self) -> Dict[str, Any]:
        data = {k: v for k, v in self.__dict__.items() if k not in ("tail_table", "notes")}
        data["tail_table"] = [row.to_dict() for row in self.tail_table]
        data["notes"] = list(self.notes)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentReport":
        try:
            rows = tuple(
                TailRow(**{name: row[name] for name in TailRow.__dataclass_fields__})
                for row in data["tail_table"]
            )
            values = {
                name: data[name]
                for name in cls.__dataclass_fields__
                if name not in ("tail_table", "notes")
            }
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"summary record is missing {exc}") from None
        return cls(**values, tail_table=rows, notes=tuple(data.get("notes", ())))


def wilson_interval(successes: int, trials: int, level: float = 0.95) -> Tuple[float, float]:
    ci = stats.binomtest(int(successes), int(trials)).proportion_ci(
        confidence_level=level, method="wilson"
    )
    return float(ci.low), float(ci.high)


def _jackknife_variance_se(z: np.ndarray) -> float:
    n = z.size
    d = z - z.mean()
    ss = float(np.sum(d**2))
    leave_one_out = (ss - n * d**2 / (n - 1)) / (n - 2)
    spread = leave_one_out - leave_one_out.mean()
    return math.sqrt((n - 1) / n * float(np.sum(spread**2)))


def summarize(batch: TrialBatch, eps_list: Sequence[float] = DEFAULT_EPS) -> ExperimentReport:
    """
    Moments, jackknife errors and tail frequencies of a batch.

    Tails count |Z_i - mean| >= eps * lambda and are paired with the Markov
    reference 1 / (N eps^2) and a 95% Wilson interval.
    """
    n = batch.trials
    if n < MIN_SUMMARY_TRIALS:
        raise ValidationError(f"summaries need >= {MIN_SUMMARY_TRIALS} trials, got {n}")
    if any(e <= 0 for e in eps_list):
        raise ValidationError("eps values must be positive")
    spec = batch.spec
    z = batch.z_values.astype(float)
    mean = float(z.mean())
    variance = float(z.var(ddof=1))
    scale = spec.m / spec.N

    rows = []
    deviation = np.abs(z - mean)
    for eps in eps_list:
        hits = int(np.sum(deviation >= eps * spec.lam))
        low, high = wilson_interval(hits, n)
        rows.append(
            TailRow(
                eps=float(eps),
                tail=hits / n,
                markov=1.0 / (spec.N * eps * eps),
                wilson_low=low,
                wilson_high=high,
                exceedances=hits,
            )
        )

    if variance > 0:
        skewness = float(stats.skew(z))
        kurt = float(stats.kurtosis(z))
    else:
        skewness = kurt = float("nan")
    notes: List[str] = []
    suspect_rate = batch.suspects_total / n
    if suspect_rate >= 1e-3:
        notes.append(f"suspect rate {suspect_rate:.2e} is at least 1e-3")
    return ExperimentReport(
        m=spec.m,
        N=spec.N,
        lam=spec.lam,
        trials=n,
        mean=mean,
        mean_se=math.sqrt(variance / n),
        variance=variance,
        variance_se=_jackknife_variance_se(z),
        theory_mean=math.sqrt(2.0 * spec.m),
        variance_scale=scale,
        variance_ratio=variance / scale,
        suspect_rate=suspect_rate,
        skewness=skewness,
        excess_kurtosis=kurt,
        tail_table=tuple(rows),
        notes=tuple(notes),
    )


# -- leading variance term -------------------------------------------------------


@dataclass(frozen=True)
class VarianceTerm:
    value: float
    factorized: float
    tensor: float
    abs_diff: float
    rel_diff: float

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


def variance_leading_term(
    spec: EigenvalueSpec, curve: CurveDef, quadrature_points: int = 256
) -> VarianceTerm:
    """
    (m/N) * double integral of [sum_mu (4/N) <mu^, g'(t1)>^2 <mu^, g'(t2)>^2 - 1].

    The tensor Gauss-Legendre sum and the factorized form
    sum_mu (4/N) (int <mu^, g'>^2 dt)^2 - 1 are both computed.
    """
    if spec.N == 0:
        raise ValidationError(f"m={spec.m} is not a sum of two squares")
    spec.require_points(4)
    if quadrature_points < 64:
        raise ValidationError("quadrature_points must be >= 64")
    if not curve.unit_speed:
        raise ValidationError("the leading term needs an arc-length parametrized curve")
    x, w = leggauss(quadrature_points)
    t = 0.5 * (x + 1.0)
    w = 0.5 * w
    unit = spec.points_array.astype(float) / math.sqrt(spec.m)
    proj = (curve_eval(curve, t, 1) @ unit.T) ** 2
    weight = 4.0 / spec.N

    per_mu = w @ proj
    factorized = weight * float(np.sum(per_mu**2)) - 1.0
    kernel = proj @ proj.T
    tensor = weight * float(w @ kernel @ w) - float(np.sum(w)) ** 2

    scale = spec.m / spec.N
    diff = abs(factorized - tensor) * scale
    denom = max(abs(factorized), abs(tensor), 1.0) * scale
    return VarianceTerm(
        value=scale * factorized,
        factorized=scale * factorized,
        tensor=scale * tensor,
        abs_diff=diff,
        rel_diff=diff / denom,
    )


# -- repulsion -----------------------------------------------------------------


@dataclass(frozen=True)
class RepulsionResult:
    t: float
    alpha: float
    beta: float
    trials: int
    hits: int
    p_hat: float
    ratio: float
    ratio_se: float

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


def repulsion_closed_form() -> float:
    """Small-window limit of P(|f| <= a, |f'| <= b lam) / (a b) for gaussians."""
    return 4.0 * math.sqrt(2.0) / (2.0 * math.pi)


def repulsion_probe(
    spec: EigenvalueSpec,
    curve: CurveDef,
    t: float,
    ensemble: CoefficientEnsemble,
    alpha: float,
    beta: float,
    trials: int,
    master_seed: int = 0,
) -> RepulsionResult:
    """
    Estimate P(|f(t)| <= alpha and |f'(t)| <= beta * lambda).

    Coefficients are drawn in blocks of REPULSION_BLOCK trials; block k uses
    the counter stream of index k under a seed derived from master_seed.
    Windows below N^(-1/2) are outside the range of the O(alpha beta) bound
    and only logged.
    """
    spec.require_points(4)
    if alpha <= 0 or beta <= 0:
        raise ValidationError("alpha and beta must be positive")
    floor = 1.0 / math.sqrt(spec.N)
    if alpha < floor or beta < floor:
        logger.warning(
            "m=%d: alpha=%g beta=%g below N^(-1/2) = %.4g", spec.m, alpha, beta, floor
        )
    if trials < MIN_REPULSION_TRIALS:
        raise ValidationError(f"repulsion needs >= {MIN_REPULSION_TRIALS} trials")
    seed = derive_seed(master_seed, TAG_REPULSION)
    table = build_phase_table(spec, curve, np.array([float(t) - math.floor(t)]))
    cos, sin, d1 = table.cos[0], table.sin[0], table.d1[0]
    half = cos.size
    scale = math.sqrt(2.0 / spec.N)

    hits = 0
    for block, start in enumerate(range(0, trials, REPULSION_BLOCK)):
        rows = min(REPULSION_BLOCK, trials - start)
        draws = ensemble.draw(trial_generator(seed, block), (rows, 2 * half))
        a, b = draws[:, :half], draws[:, half:]
        f = scale * np.sum(a * cos + b * sin, axis=1)
        df = scale * np.sum(d1 * (b * cos - a * sin), axis=1)
        hits += int(np.sum((np.abs(f) <= alpha) & (np.abs(df) <= beta * spec.lam)))

    p_hat = hits / trials
    se = math.sqrt(p_hat * (1.0 - p_hat) / trials)
    return RepulsionResult(
        t=float(t),
        alpha=alpha,
        beta=beta,
        trials=trials,
        hits=hits,
        p_hat=p_hat,
        ratio=p_hat / (alpha * beta),
        ratio_se=se / (alpha * beta),
    )


# -- universality --------------------------------------------------------------


@dataclass(frozen=True)
class UniversalityReport:
    ensembles: Tuple[str, str]
    trials: int
    means: Tuple[float, float]
    variances: Tuple[float, float]
    mean_gap: float
    mean_se: float
    variance_gap: float
    variance_se: float
    context_scale: float
    moment_gaps: Dict[int, float] = field(default_factory=dict)

    def within_budget(self, lam: float, n_se: float = 3.0, lam_budget: float = 0.02) -> bool:
        return self.mean_gap <= n_se * self.mean_se + lam_budget * lam

    def to_dict(self) -> Dict[str, Any]:
        data = dict(self.__dict__)
        data["moment_gaps"] = {str(k): v for k, v in self.moment_gaps.items()}
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "UniversalityReport":
        try:
            values = {name: data[name] for name in cls.__dataclass_fields__}
        except KeyError as exc:
            raise ValidationError(f"universality record is missing {exc}") from None
        for name in ("ensembles", "means", "variances"):
            values[name] = tuple(values[name])
        values["moment_gaps"] = {int(k): v for k, v in values["moment_gaps"].items()}
        return cls(**values)


def universality_from_batches(first: TrialBatch, second: TrialBatch) -> UniversalityReport:
    """Gap report for two batches on the same spectrum and curve."""
    if first.spec.m != second.spec.m:
        raise ValidationError("batches must share the eigenvalue")
    lam = first.spec.lam
    z1 = first.z_values.astype(float)
    z2 = second.z_values.astype(float)
    v1, v2 = float(z1.var(ddof=1)), float(z2.var(ddof=1))
    moments = {
        k: abs(float(np.mean(z1**k)) - float(np.mean(z2**k))) / lam**k
        for k in MOMENT_ORDERS
    }
    return UniversalityReport(
        ensembles=(first.ensemble.value, second.ensemble.value),
        trials=min(first.trials, second.trials),
        means=(float(z1.mean()), float(z2.mean())),
        variances=(v1, v2),
        mean_gap=abs(float(z1.mean()) - float(z2.mean())),
        mean_se=math.sqrt(v1 / z1.size + v2 / z2.size),
        variance_gap=abs(v1 - v2),
        variance_se=math.hypot(_jackknife_variance_se(z1), _jackknife_variance_se(z2)),
        context_scale=lam / math.sqrt(first.spec.N),
        moment_gaps=moments,
    )


def ensemble_seed(master_seed: int, ensemble: CoefficientEnsemble) -> int:
    code = list(CoefficientEnsemble).index(ensemble) + 1
    return derive_seed(master_seed, code)


def universality_gap(
    spec: EigenvalueSpec,
    curve: CurveDef,
    ensembles: Tuple[CoefficientEnsemble, CoefficientEnsemble],
    trials: int,
    seed: int,
    cfg: Optional[GridConfig] = None,
    workers: Optional[int] = None,
) -> UniversalityReport:
    """
    Compare nodal count moments between two coefficient laws.

    Each ensemble gets its own seed derived from (seed, ensemble), so the
    same ensemble in both slots yields identical batches and a zero gap.
    """
    if trials < MIN_UNIVERSALITY_TRIALS:
        raise ValidationError(f"universality needs >= {MIN_UNIVERSALITY_TRIALS} trials")
    first, second = (
        run_mc(spec, curve, e, trials, ensemble_seed(seed, e), cfg, workers)
        for e in ensembles
    )
    return universality_from_batches(first, second)


# -- concentration ----------------------------------------------------------------


@dataclass(frozen=True)
class ConcentrationRow:
    m: int
    N: int
    lam: float
    trials: int
    mean: float
    tail: float
    tail_se: float
    wilson_low: float
    wilson_high: float
    markov: float
    eps_window_flag: bool

    @property
    def markov_ok(self) -> bool:
        return self.tail <= self.markov

    def to_dict(self) -> Dict[str, Any]:
        data = dict(self.__dict__)
        data["markov_ok"] = self.markov_ok
        return data


def concentration_row(batch: TrialBatch, eps: float) -> ConcentrationRow:
    spec = batch.spec
    z = batch.z_values.astype(float)
    hits = int(np.sum(np.abs(z - z.mean()) >= eps * spec.lam))
    p = hits / batch.trials
    low, high = wilson_interval(hits, batch.trials)
    return ConcentrationRow(
        m=spec.m,
        N=spec.N,
        lam=spec.lam,
        trials=batch.trials,
        mean=float(z.mean()),
        tail=p,
        tail_se=math.sqrt(p * (1.0 - p) / batch.trials),
        wilson_low=low,
        wilson_high=high,
        markov=1.0 / (spec.N * eps * eps),
        eps_window_flag=eps * math.log(spec.N) > 1.0,
    )


def concentration_scan(
    m_list: Iterable[int],
    curve: CurveDef,
    ensemble: CoefficientEnsemble,
    eps: float,
    trials: int,
    seed: int,
    cfg: Optional[GridConfig] = None,
    workers: Optional[int] = None,
) -> List[ConcentrationRow]:
    """
    Tail frequency P(|Z - mean| >= eps * lambda) for each m, sorted by N.

    Rows are flagged when eps * log N > 1, outside the range where the
    concentration bound is stated.
    """
    if eps <= 0:
        raise ValidationError("eps must be positive")
    specs = [enumerate_lattice_points(int(m)) for m in m_list]
    if not specs:
        raise ValidationError("m_list is empty")
    for spec in specs:
        if spec.N < MIN_SCAN_POINTS:
            raise ValidationError(f"m={spec.m} has N={spec.N} < {MIN_SCAN_POINTS}")
    rows = []
    for spec in sorted(specs, key=lambda s: (s.N, s.m)):
        batch = run_mc(spec, curve, ensemble, trials, derive_seed(seed, spec.m), cfg, workers)
        row = concentration_row(batch, eps)
        if row.eps_window_flag:
            logger.info("m=%d: eps * log N = %.3f > 1", spec.m, eps * math.log(spec.N))
        rows.append(row)
    return rows


def tails_non_increasing(rows: Sequence[ConcentrationRow], n_se: float = 2.0) -> bool:
    """True when each tail exceeds its predecessor by at most n_se combined SEs."""
    for prev, cur in zip(rows, rows[1:]):
        allowed = n_se * math.hypot(prev.tail_se, cur.tail_se)
        if cur.tail > prev.tail + allowed:
            return False
    return True


# -- stability scans -------------------------------------------------------------


@dataclass(frozen=True)
class ExceptionalRate:
    trials: int
    exceptional: int
    rate: float
    mean_unstable: float
    params: StabilityParams

    def to_dict(self) -> Dict[str, Any]:
        data = {k: v for k, v in self.__dict__.items() if k != "params"}
        data["params"] = self.params.to_dict()
        return data


def exceptional_rate(
    spec: EigenvalueSpec,
    curve: CurveDef,
    ensemble: CoefficientEnsemble,
    trials: int,
    seed: int,
    params: Optional[StabilityParams] = None,
    check_density: int = 32,
) -> ExceptionalRate:
    """Frequency of samples with at least delta * lambda unstable intervals."""
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    params = params or default_stability_params(spec.N)
    sub_seed = derive_seed(seed, TAG_EXCEPTIONAL)
    flagged = 0
    unstable = 0
    for trial in range(trials):
        rw = RestrictedWave(sample_coefficients(spec, ensemble, sub_seed, trial), curve)
        cls = classify_intervals(
            rw, params.alpha, params.beta, params.R, params.delta, check_density
        )
        flagged += int(cls.exceptional)
        unstable += cls.unstable_count
    return ExceptionalRate(
        trials=trials,
        exceptional=flagged,
        rate=flagged / trials,
        mean_unstable=unstable / trials,
        params=params,
    )


@dataclass(frozen=True)
class SieveScan:
    trials: int
    separation: float
    max_d1: float
    max_d2: float
    mean_d1: float
    mean_d2: float

    @property
    def order_ratio(self) -> float:
        return self.max_d2 / self.max_d1 if self.max_d1 > 0 else math.inf

    def to_dict(self) -> Dict[str, Any]:
        data = dict(self.__dict__)
        data["order_ratio"] = self.order_ratio
        return data


def large_sieve_scan(
    spec: EigenvalueSpec,
    curve: CurveDef,
    ensemble: CoefficientEnsemble,
    trials: int,
    seed: int,
    separation: float,
) -> SieveScan:
    """Observed suprema of the d=1 and d=2 large-sieve ratios."""
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    sub_seed = derive_seed(seed, TAG_SIEVE)
    d1 = np.empty(trials)
    d2 = np.empty(trials)
    for trial in range(trials):
        rw = RestrictedWave(sample_coefficients(spec, ensemble, sub_seed, trial), curve)
        d1[trial] = large_sieve_check(rw, separation, 1)
        d2[trial] = large_sieve_check(rw, separation, 2)
    return SieveScan(
        trials=trials,
        separation=separation,
        max_d1=float(d1.max()),
        max_d2=float(d2.max()),
        mean_d1=float(d1.mean()),
        mean_d2=float(d2.mean()),
    )


@dataclass(frozen=True)
class PersistenceScan:
    trials: int
    roots_checked: int
    failures: int
    params: StabilityParams

    def to_dict(self) -> Dict[str, Any]:
        data = {k: v for k, v in self.__dict__.items() if k != "params"}
        data["params"] = self.params.to_dict()
        return data


def perturbation_scan(
    spec: EigenvalueSpec,
    curve: CurveDef,
    trials: int,
    seed: int,
    params: Optional[StabilityParams] = None,
    cfg: Optional[GridConfig] = None,
) -> PersistenceScan:
    """Run perturbation_persistence over gaussian samples 0..trials-1."""
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    params = params or default_stability_params(spec.N)
    noise_seed = derive_seed(seed, TAG_PERTURB)
    checked = failures = 0
    for trial in range(trials):
        sample = sample_coefficients(spec, CoefficientEnsemble.GAUSSIAN, seed, trial)
        try:
            record = perturbation_persistence(
                RestrictedWave(sample, curve),
                params,
                trial_generator(noise_seed, trial),
                cfg=cfg,
            )
        except TorwaveError as exc:
            raise TrialError(trial, exc) from exc
        checked += record.roots_checked
        failures += record.failures
    return PersistenceScan(
        trials=trials, roots_checked=checked, failures=failures, params=params
    )
