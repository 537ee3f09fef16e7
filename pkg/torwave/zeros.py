"""
Nodal intersection counting and stability diagnostics along a curve.

count_zeros finds sign changes of f on a uniform grid of about
points_per_lambda * lambda points and bisects each bracket. Cells where f'
changes sign are subdivided once more so that pairs of close roots are not
lost; an extremum that still sits within the tangency threshold of zero
without a resolved crossing is reported as a suspect.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .errors import ValidationError
from .wave import (
    RestrictedWave,
    batch_eval,
    derivative_bounds,
    evaluate_table,
    perturb,
)

logger = logging.getLogger(__name__)

MIN_POINTS_PER_LAMBDA = 8
MIN_CHECK_DENSITY = 16
SANITY_FACTOR = 10.0
PERSISTENCE_PROBES = 257
BISECTION_SLACK = 8


@dataclass(frozen=True)
class GridConfig:
    points_per_lambda: int = 50
    bisection_tol: float = 1e-12
    tangency_threshold: float = 1e-4
    certified_mode: bool = False
    refine_factor: int = 8

    def __post_init__(self) -> None:
        if self.points_per_lambda < MIN_POINTS_PER_LAMBDA:
            raise ValidationError(
                f"points_per_lambda must be >= {MIN_POINTS_PER_LAMBDA}, "
                f"got {self.points_per_lambda}"
            )
        tolerances = (self.bisection_tol, self.tangency_threshold)
        if not all(0 < tol < math.inf for tol in tolerances):
            raise ValidationError("grid tolerances must be positive and finite")
        if self.refine_factor < 2:
            raise ValidationError("refine_factor must be >= 2")

    def grid_size(self, lam: float) -> int:
        return int(math.ceil(self.points_per_lambda * lam))

    def finer(self, factor: int) -> "GridConfig":
        return GridConfig(
            points_per_lambda=self.points_per_lambda * factor,
            bisection_tol=self.bisection_tol,
            tangency_threshold=self.tangency_threshold,
            certified_mode=self.certified_mode,
            refine_factor=self.refine_factor,
        )


def counting_grid(lam: float, cfg: GridConfig) -> np.ndarray:
    g = cfg.grid_size(lam)
    return np.arange(g) / g


@dataclass(frozen=True)
class ZeroCountResult:
    count: int
    roots: np.ndarray
    suspects: int
    certified_fraction: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "count": self.count,
            "suspects": self.suspects,
            "certified_fraction": self.certified_fraction,
            "roots": [float(r) for r in self.roots],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ZeroCountResult":
        roots = np.asarray(data.get("roots", []), dtype=float)
        if int(data["count"]) != roots.size:
            raise ValidationError("count does not match the number of roots")
        return cls(
            count=int(data["count"]),
            roots=roots,
            suspects=int(data.get("suspects", 0)),
            certified_fraction=float(data.get("certified_fraction", 0.0)),
        )


def _bisect(
    rw: RestrictedWave, lo: np.ndarray, hi: np.ndarray, tol: float
) -> np.ndarray:
    """
    Vectorized bisection; every bracket must carry a strict sign change.

    Stops once every bracket is within tol or can no longer be split in
    double precision, so tolerances below the float spacing terminate.
    """
    if lo.size == 0:
        return lo
    lo = lo.copy()
    hi = hi.copy()
    f_lo = batch_eval(rw, lo, 0)
    width = float(np.max(hi - lo))
    doublings = math.ceil(math.log2(width) - math.log2(tol))
    max_iter = max(doublings, 0) + BISECTION_SLACK
    for _ in range(max_iter):
        if float(np.max(hi - lo)) <= tol:
            break
        mid = 0.5 * (lo + hi)
        if not np.any((mid > lo) & (mid < hi)):
            break
        f_mid = batch_eval(rw, mid, 0)
        exact = f_mid == 0.0
        right = (f_mid * f_lo > 0) & ~exact
        lo = np.where(right | exact, mid, lo)
        f_lo = np.where(right, f_mid, f_lo)
        hi = np.where(right, hi, mid)
    return 0.5 * (lo + hi)


def count_zeros(rw: RestrictedWave, cfg: Optional[GridConfig] = None) -> ZeroCountResult:
    """
    Count zeros of f = F o gamma on [0, 1).

    Args:
        rw: RestrictedWave with N >= 4 and a nonzero sample
        cfg: Grid configuration; defaults to GridConfig()

    Returns:
        ZeroCountResult with sorted roots
    """
    cfg = cfg or GridConfig()
    rw.spec.require_points(4)
    if rw.sample.is_zero():
        raise ValidationError("the nodal count of the zero function is undefined")

    t = counting_grid(rw.lam, cfg)
    g = t.size
    h = 1.0 / g
    table = rw.table(t)
    f = evaluate_table(rw.sample, table, 0)
    d = evaluate_table(rw.sample, table, 1)
    f_next = np.roll(f, -1)
    d_next = np.roll(d, -1)

    found: List[np.ndarray] = [t[f == 0.0]]
    extremum = d * d_next < 0
    plain = ~extremum & (f * f_next < 0)
    lo_parts = [t[plain]]
    width_parts = [np.full(int(plain.sum()), h)]
    suspects = 0

    cells = np.flatnonzero(extremum)
    if cells.size:
        r = cfg.refine_factor
        offsets = h * np.arange(r + 1) / r
        sub = t[cells][:, None] + offsets
        fs = batch_eval(rw, np.minimum(sub.ravel(), 1.0), 0).reshape(sub.shape)
        ds = batch_eval(rw, np.minimum(sub.ravel(), 1.0), 1).reshape(sub.shape)
        fs[:, 0], fs[:, -1] = f[cells], f_next[cells]
        ds[:, 0], ds[:, -1] = d[cells], d_next[cells]
        crossing = fs[:, :-1] * fs[:, 1:] < 0
        lo_parts.append(sub[:, :-1][crossing])
        width_parts.append(np.full(int(crossing.sum()), h / r))
        found.append(sub[:, 1:-1][fs[:, 1:-1] == 0.0])
        turning = (ds[:, :-1] * ds[:, 1:] < 0) & ~crossing
        low = np.minimum(np.abs(fs[:, :-1]), np.abs(fs[:, 1:])) < cfg.tangency_threshold
        suspects = int(np.sum(turning & low))
        if suspects:
            logger.info(
                "m=%d: %d unresolved near-tangencies (|f| < %g)",
                rw.spec.m, suspects, cfg.tangency_threshold,
            )

    lo = np.concatenate(lo_parts)
    hi = np.minimum(lo + np.concatenate(width_parts), 1.0)
    found.append(_bisect(rw, lo, hi, cfg.bisection_tol))
    roots = np.sort(np.mod(np.concatenate(found), 1.0))

    certified = 0.0
    if cfg.certified_mode:
        lip1, lip2 = derivative_bounds(rw)
        zero_free = np.minimum(np.abs(f), np.abs(f_next)) > lip1 * h / 2
        single = (f * f_next < 0) & (np.minimum(np.abs(d), np.abs(d_next)) > lip2 * h / 2)
        certified = float(np.sum(zero_free | single)) / g

    if roots.size > SANITY_FACTOR * rw.lam:
        logger.warning(
            "m=%d: %d roots exceeds %g * lambda", rw.spec.m, roots.size, SANITY_FACTOR
        )
    return ZeroCountResult(
        count=int(roots.size),
        roots=roots,
        suspects=suspects,
        certified_fraction=certified,
    )


# -- stable and unstable intervals --------------------------------------------


@dataclass(frozen=True)
class StabilityParams:
    delta: float
    alpha: float
    beta: float
    R: float
    gamma_excl: float
    tau: float

    @classmethod
    def defaults(cls, n_points: int) -> "StabilityParams":
        return default_stability_params(n_points)

    def to_dict(self) -> Dict[str, float]:
        return {
            "delta": self.delta,
            "alpha": self.alpha,
            "beta": self.beta,
            "R": self.R,
            "gamma_excl": self.gamma_excl,
            "tau": self.tau,
        }


def default_stability_params(n_points: int, C: float = 4.0) -> StabilityParams:
    """
    Default (delta, alpha, beta, R) for a spectrum of size N.

    R = C log N and delta = N^(-1/3), lowered when needed so that
    delta * R < 1/4; then alpha = delta^(3/2), beta = delta^(3/4),
    gamma_excl = delta^(5/4) and tau = delta^2.
    """
    if n_points < 2:
        raise ValidationError(f"need N >= 2, got {n_points}")
    R = C * math.log(n_points)
    delta = min(n_points ** (-1.0 / 3.0), 0.99 / (4.0 * R))
    return StabilityParams(
        delta=delta,
        alpha=delta**1.5,
        beta=delta**0.75,
        R=R,
        gamma_excl=delta**1.25,
        tau=delta**2,
    )


@dataclass(frozen=True)
class IntervalClassification:
    R: float
    delta: float
    alpha: float
    beta: float
    intervals: Tuple[Tuple[float, float, bool], ...]
    unstable_count: int
    exceptional: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "R": self.R,
            "delta": self.delta,
            "alpha": self.alpha,
            "beta": self.beta,
            "unstable_count": self.unstable_count,
            "exceptional": self.exceptional,
            "intervals": [
                {"start": s, "end": e, "stable": bool(ok)} for s, e, ok in self.intervals
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "IntervalClassification":
        try:
            intervals = tuple(
                (float(i["start"]), float(i["end"]), bool(i["stable"]))
                for i in data["intervals"]
            )
            result = cls(
                R=float(data["R"]),
                delta=float(data["delta"]),
                alpha=float(data["alpha"]),
                beta=float(data["beta"]),
                intervals=intervals,
                unstable_count=int(data["unstable_count"]),
                exceptional=bool(data["exceptional"]),
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"classification record is missing {exc}") from None
        if result.unstable_count != sum(1 for *_, ok in intervals if not ok):
            raise ValidationError("unstable_count does not match the interval list")
        return result


@dataclass(frozen=True)
class _Tiling:
    starts: np.ndarray
    ends: np.ndarray
    probes: np.ndarray = field(repr=False)


def _tile(lam: float, R: float, check_density: int) -> _Tiling:
    width = R / lam
    count = max(1, int(math.ceil(1.0 / width - 1e-12)))
    starts = np.arange(count) * width
    ends = np.minimum(starts + width, 1.0)
    lengths = ends - starts
    mids = 0.5 * (starts + ends)
    offsets = np.linspace(-1.5, 1.5, 3 * check_density)
    probes = np.mod(mids[:, None] + lengths[:, None] * offsets, 1.0)
    return _Tiling(starts=starts, ends=ends, probes=probes)


def _check_stability_args(
    alpha: float, beta: float, R: float, delta: float, check_density: int
) -> None:
    if alpha < 0 or beta < 0:
        raise ValidationError("alpha and beta must be non-negative")
    if R <= 0 or delta <= 0:
        raise ValidationError("R and delta must be positive")
    if delta * R >= 0.25:
        raise ValidationError(f"need delta * R < 1/4, got {delta * R:.4f}")
    if check_density < MIN_CHECK_DENSITY:
        raise ValidationError(f"check_density must be >= {MIN_CHECK_DENSITY}")


def _unstable_mask(
    rw: RestrictedWave, tiling: _Tiling, alpha: float, beta: float
) -> np.ndarray:
    flat = tiling.probes.ravel()
    f = batch_eval(rw, flat, 0).reshape(tiling.probes.shape)
    d = batch_eval(rw, flat, 1).reshape(tiling.probes.shape)
    small = (np.abs(f) <= alpha) & (np.abs(d) <= beta * rw.lam)
    return small.any(axis=1)


def classify_intervals(
    rw: RestrictedWave,
    alpha: float,
    beta: float,
    R: float,
    delta: float,
    check_density: int = 32,
) -> IntervalClassification:
    """
    Mark each interval of length R/lambda stable or unstable.

    I_i is unstable when some probe in its threefold dilation has |f| <= alpha
    and |f'| <= beta * lambda. Probes are a finite subgrid, so an interval can
    be reported stable although the continuum condition fails between probes.

    Args:
        rw: RestrictedWave
        alpha: Value threshold
        beta: Derivative threshold (in units of lambda)
        R: Interval length in units of 1/lambda
        delta: Exceptional-density parameter, delta * R < 1/4
        check_density: Probes per interval length, >= 16

    Returns:
        IntervalClassification
    """
    _check_stability_args(alpha, beta, R, delta, check_density)
    tiling = _tile(rw.lam, R, check_density)
    unstable = _unstable_mask(rw, tiling, alpha, beta)
    count = int(unstable.sum())
    intervals = tuple(
        (float(s), float(e), not bool(u))
        for s, e, u in zip(tiling.starts, tiling.ends, unstable)
    )
    return IntervalClassification(
        R=R,
        delta=delta,
        alpha=alpha,
        beta=beta,
        intervals=intervals,
        unstable_count=count,
        exceptional=count >= delta * rw.lam,
    )


def small_value_measure(
    rw: RestrictedWave, alpha: float, beta: float, grid_points: int = 0
) -> float:
    """Measure of {t : |f(t)| <= alpha and |f'(t)| <= beta * lambda} on a grid."""
    k = max(int(grid_points), int(math.ceil(50 * rw.lam)))
    t = np.arange(k) / k
    f = batch_eval(rw, t, 0)
    d = batch_eval(rw, t, 1)
    return float(np.mean((np.abs(f) <= alpha) & (np.abs(d) <= beta * rw.lam)))


# -- Jensen-type root bound -----------------------------------------------------


@dataclass(frozen=True)
class JensenRecord:
    start: float
    end: float
    c_growth: float
    max_abs_f: float
    max_abs_df: float
    roots_in_interval: int
    threshold: float
    hypothesis: bool
    bound: float
    jensen_quantity: float
    holds: bool

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


def jensen_diagnostic(
    rw: RestrictedWave,
    interval: Tuple[float, float],
    c_growth: float,
    cfg: Optional[GridConfig] = None,
) -> JensenRecord:
    """
    Check the real-interval Jensen bound on one interval.

    If max|f| >= exp(-c lambda |I| / 2) or max|f'| >= lambda exp(-c lambda |I| / 2)
    on I, the number of roots in I must not exceed 2 c |I| lambda. Also
    reports c lambda |I| + log N - log max_I |f|.
    """
    cfg = cfg or GridConfig()
    t1, t2 = float(interval[0]), float(interval[1])
    length = t2 - t1
    if not (0.0 <= t1 < t2 <= 1.0):
        raise ValidationError(f"interval must satisfy 0 <= t1 < t2 <= 1, got {interval}")
    lam = rw.lam
    n = rw.spec.N
    if length < math.log(n) / lam:
        raise ValidationError(
            f"interval length {length:.4g} is below log(N)/lambda = {math.log(n) / lam:.4g}"
        )
    if c_growth <= 0:
        raise ValidationError("c_growth must be positive")
    k = max(256, int(math.ceil(cfg.points_per_lambda * lam * length)))
    grid = np.linspace(t1, t2, k)
    max_f = float(np.max(np.abs(batch_eval(rw, grid, 0))))
    max_df = float(np.max(np.abs(batch_eval(rw, grid, 1))))
    roots = count_zeros(rw, cfg).roots
    inside = int(np.sum((roots >= t1) & (roots <= t2)))
    threshold = math.exp(-c_growth * lam * length / 2.0)
    hypothesis = max_f >= threshold or max_df >= lam * threshold
    bound = 2.0 * c_growth * length * lam
    quantity = (
        c_growth * lam * length + math.log(n) - math.log(max_f) if max_f > 0 else math.inf
    )
    return JensenRecord(
        start=t1,
        end=t2,
        c_growth=c_growth,
        max_abs_f=max_f,
        max_abs_df=max_df,
        roots_in_interval=inside,
        threshold=threshold,
        hypothesis=hypothesis,
        bound=bound,
        jensen_quantity=quantity,
        holds=(not hypothesis) or inside <= bound,
    )


# -- large sieve ---------------------------------------------------------------


def sieve_points(separation: float) -> np.ndarray:
    count = int(math.floor(1.0 / separation)) + 1
    xs = np.arange(count) * separation
    return xs[xs < 1.0]


def large_sieve_check(rw: RestrictedWave, separation: float, d: int) -> float:
    """
    Normalized large-sieve sum over the points i * separation in [0, 1).

    Returns:
        sum |f^(d)(x_i)|^2 / (lambda^(2d) (lambda + 1/separation))
    """
    if not 0.0 < separation < 0.5:
        raise ValidationError(f"separation must be in (0, 1/2), got {separation}")
    if d not in (1, 2):
        raise ValidationError(f"d must be 1 or 2, got {d}")
    values = batch_eval(rw, sieve_points(separation), d)
    lam = rw.lam
    return float(np.sum(values**2)) / (lam ** (2 * d) * (lam + 1.0 / separation))


# -- persistence of roots under small perturbations ------------------------------


@dataclass(frozen=True)
class PersistenceRecord:
    tau: float
    window: float
    stable_intervals: int
    eligible_intervals: int
    roots_checked: int
    failures: int
    perturbation_norm: float

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


def perturbation_persistence(
    rw: RestrictedWave,
    params: StabilityParams,
    rng: np.random.Generator,
    tau: Optional[float] = None,
    cfg: Optional[GridConfig] = None,
    check_density: int = 64,
) -> PersistenceRecord:
    """
    Perturb f by a random g of norm <= tau and look for surviving roots.

    Every root of f inside a stable interval whose dilation keeps |g| below
    alpha must have a root of f + g within alpha / (beta * lambda).
    """
    _check_stability_args(params.alpha, params.beta, params.R, params.delta, check_density)
    if params.beta <= 0:
        raise ValidationError("beta must be positive for the persistence window")
    tiling = _tile(rw.lam, params.R, check_density)
    unstable = _unstable_mask(rw, tiling, params.alpha, params.beta)
    tau = params.tau if tau is None else float(tau)
    moved, g = perturb(rw.sample, tau, rng)
    g_vals = batch_eval(rw.with_sample(g), tiling.probes.ravel(), 0)
    g_max = np.max(np.abs(g_vals.reshape(tiling.probes.shape)), axis=1)
    eligible = ~unstable & (g_max < params.alpha)

    roots = count_zeros(rw, cfg).roots
    width = params.R / rw.lam
    window = params.alpha / (params.beta * rw.lam)
    offsets = window * np.linspace(-1.0, 1.0, PERSISTENCE_PROBES)
    moved_rw = rw.with_sample(moved)
    checked = failures = 0
    for root in roots:
        slot = min(int(root / width), eligible.size - 1)
        if not eligible[slot]:
            continue
        checked += 1
        vals = batch_eval(moved_rw, np.mod(root + offsets, 1.0), 0)
        if not (np.any(vals == 0.0) or np.any(vals[:-1] * vals[1:] < 0)):
            failures += 1
            logger.warning("m=%d: root %.12f did not persist", rw.spec.m, root)
    return PersistenceRecord(
        tau=tau,
        window=window,
        stable_intervals=int((~unstable).sum()),
        eligible_intervals=int(eligible.sum()),
        roots_checked=checked,
        failures=failures,
        perturbation_norm=g.l2_norm(),
    )
