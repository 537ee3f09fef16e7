"""
Random eigenfunctions on the torus and their restriction to a curve.

A sample stores real coefficients (a_mu, b_mu) on the half set E+ and
represents

    F(x) = sqrt(2/N) * sum_{mu in E+} [a_mu cos 2 pi <mu,x> + b_mu sin 2 pi <mu,x>]

which is real by construction and has E F(x)^2 = 1 whenever the coefficients
have mean 0 and variance 1. The complex model with eps_{-mu} = conj(eps_mu)
is recovered through eps_mu = (a_mu - i b_mu) / sqrt(2).

All sums over E+ run in ascending lexicographic order of mu along the last
(contiguous) axis, so numpy's pairwise reduction fixes the summation order.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .curve import CurveDef, curve_eval
from .errors import ValidationError
from .lattice import EigenvalueSpec, enumerate_lattice_points
from .rng import trial_generator

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
SQRT3 = math.sqrt(3.0)


class CoefficientEnsemble(str, Enum):
    """Laws for the real coefficients; every one has mean 0 and variance 1."""

    GAUSSIAN = "gaussian"
    RADEMACHER = "rademacher"
    UNIFORM = "uniform"

    def draw(
        self, rng: np.random.Generator, size: Union[int, Tuple[int, ...]]
    ) -> np.ndarray:
        if self is CoefficientEnsemble.GAUSSIAN:
            return rng.standard_normal(size)
        if self is CoefficientEnsemble.RADEMACHER:
            return (2 * rng.integers(0, 2, size=size) - 1).astype(float)
        return rng.uniform(-SQRT3, SQRT3, size=size)


def parse_ensemble(text: str) -> CoefficientEnsemble:
    try:
        return CoefficientEnsemble(text.strip().lower())
    except ValueError:
        choices = ", ".join(e.value for e in CoefficientEnsemble)
        raise ValidationError(f"unknown ensemble {text!r}; choose from {choices}") from None


@dataclass(frozen=True, eq=False)
class WaveSample:
    spec: EigenvalueSpec
    a: np.ndarray
    b: np.ndarray
    ensemble: Optional[CoefficientEnsemble] = None
    master_seed: Optional[int] = None
    trial_index: Optional[int] = None

    @property
    def scale(self) -> float:
        return math.sqrt(2.0 / self.spec.N)

    def is_zero(self) -> bool:
        return not (np.any(self.a) or np.any(self.b))

    def l2_norm(self) -> float:
        """L2(T^2) norm of F, equal to sqrt(sum(a^2 + b^2) / N)."""
        return math.sqrt(float(np.sum(self.a**2) + np.sum(self.b**2)) / self.spec.N)


def _frozen(values: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=float)
    arr.setflags(write=False)
    return arr


def sample_coefficients(
    spec: EigenvalueSpec,
    ensemble: CoefficientEnsemble,
    master_seed: int,
    trial_index: int,
) -> WaveSample:
    """
    Draw one coefficient vector.

    The trial's generator is keyed on (master_seed, trial_index); coefficient
    j of the stream is a_j for j < N/2 and b_{j - N/2} otherwise, so the
    result does not depend on call order or thread count.

    Args:
        spec: EigenvalueSpec with N >= 4
        ensemble: Coefficient law
        master_seed: 64-bit experiment seed
        trial_index: Trial number

    Returns:
        WaveSample
    """
    spec.require_points(4)
    half = len(spec.half_points)
    draws = ensemble.draw(trial_generator(master_seed, trial_index), 2 * half)
    return WaveSample(
        spec=spec,
        a=_frozen(draws[:half]),
        b=_frozen(draws[half:]),
        ensemble=ensemble,
        master_seed=int(master_seed),
        trial_index=int(trial_index),
    )


def sample_from_mapping(
    spec: EigenvalueSpec,
    a_map: Mapping[Tuple[int, int], float],
    b_map: Optional[Mapping[Tuple[int, int], float]] = None,
) -> WaveSample:
    """
    Deterministic sample from explicit {mu: value} maps keyed by E+ vectors.

    Missing entries are zero.
    """
    spec.require_points(4)
    index = {tuple(p): i for i, p in enumerate(spec.half_points)}
    a = np.zeros(len(index))
    b = np.zeros(len(index))
    for target, mapping in ((a, a_map), (b, b_map or {})):
        for mu, value in mapping.items():
            key = (int(mu[0]), int(mu[1]))
            if key not in index:
                raise ValidationError(f"{key} is not in the half set of m={spec.m}")
            target[index[key]] = float(value)
    return WaveSample(spec=spec, a=_frozen(a), b=_frozen(b))


def perturb(
    sample: WaveSample, tau: float, rng: np.random.Generator
) -> Tuple[WaveSample, WaveSample]:
    """
    Add a random perturbation g with L2(T^2) norm at most tau.

    The direction is Gaussian and the norm is tau * U with U uniform on (0, 1].

    Returns:
        (sample + g, g)
    """
    if tau < 0:
        raise ValidationError(f"tau must be non-negative, got {tau}")
    n = sample.spec.N
    half = len(sample.a)
    direction = rng.standard_normal(2 * half)
    norm = math.sqrt(float(np.sum(direction**2)) / n)
    radius = tau * (1.0 - rng.random())
    delta = direction * (radius / norm) if norm > 0 else direction * 0.0
    g = WaveSample(spec=sample.spec, a=_frozen(delta[:half]), b=_frozen(delta[half:]))
    moved = WaveSample(
        spec=sample.spec,
        a=_frozen(sample.a + g.a),
        b=_frozen(sample.b + g.b),
        ensemble=sample.ensemble,
        master_seed=sample.master_seed,
        trial_index=sample.trial_index,
    )
    return moved, g


# -- torus evaluation --------------------------------------------------------


def _torus_phases(spec: EigenvalueSpec, x: np.ndarray) -> np.ndarray:
    mu = spec.half_array.astype(float)
    return TWO_PI * (x[:, 0:1] * mu[:, 0] + x[:, 1:2] * mu[:, 1])


def eval_torus(sample: WaveSample, x: Union[Sequence[float], np.ndarray]) -> Any:
    """
    Evaluate F at one point or an array of points of shape (K, 2).

    Returns:
        float for a single point, array of shape (K,) otherwise
    """
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    theta = _torus_phases(sample.spec, np.atleast_2d(pts))
    terms = sample.a * np.cos(theta) + sample.b * np.sin(theta)
    values = sample.scale * np.sum(terms, axis=1)
    return float(values[0]) if single else values


def complex_coefficients(sample: WaveSample) -> Tuple[np.ndarray, np.ndarray]:
    """
    Complex coefficients over all of E_lambda.

    eps_mu = (a_mu - i b_mu) / sqrt(2) on E+ and eps_{-mu} = conj(eps_mu).

    Returns:
        (points of shape (N, 2), eps of shape (N,)) in the order of spec.points
    """
    spec = sample.spec
    lookup: Dict[Tuple[int, int], complex] = {}
    for (mu1, mu2), a, b in zip(spec.half_points, sample.a, sample.b):
        eps = complex(a, -b) / math.sqrt(2.0)
        lookup[(mu1, mu2)] = eps
        lookup[(-mu1, -mu2)] = eps.conjugate()
    eps_all = np.array([lookup[tuple(p)] for p in spec.points], dtype=complex)
    return spec.points_array.copy(), eps_all


def eval_torus_complex(sample: WaveSample, x: Sequence[float]) -> complex:
    """(1/sqrt(N)) * sum over E_lambda of eps_mu e^{2 pi i <mu, x>}."""
    points, eps = complex_coefficients(sample)
    phase = TWO_PI * (points[:, 0] * float(x[0]) + points[:, 1] * float(x[1]))
    return complex(np.sum(eps * np.exp(1j * phase)) / math.sqrt(sample.spec.N))


# -- restriction to a curve --------------------------------------------------


@dataclass(frozen=True, eq=False)
class PhaseTable:
    """
    Per-(t, mu) trigonometric factors of f and its derivatives.

    Rows are parameters t, columns follow spec.half_points. ``d1`` holds
    2 pi <mu, gamma'(t)> and ``d2`` holds 2 pi <mu, gamma''(t)>.
    """

    t: np.ndarray
    cos: np.ndarray
    sin: np.ndarray
    d1: np.ndarray
    d2: np.ndarray


def build_phase_table(spec: EigenvalueSpec, curve: CurveDef, t: np.ndarray) -> PhaseTable:
    tt = np.ascontiguousarray(np.atleast_1d(np.asarray(t, dtype=float)))
    mu = spec.half_array.astype(float)

    def project(vec: np.ndarray) -> np.ndarray:
        return TWO_PI * (vec[:, 0:1] * mu[:, 0] + vec[:, 1:2] * mu[:, 1])

    theta = project(curve_eval(curve, tt, 0))
    return PhaseTable(
        t=tt,
        cos=np.cos(theta),
        sin=np.sin(theta),
        d1=project(curve_eval(curve, tt, 1)),
        d2=project(curve_eval(curve, tt, 2)),
    )


def evaluate_table(sample: WaveSample, table: PhaseTable, order: int) -> np.ndarray:
    """f, f' or f'' at the rows of a phase table."""
    a, b = sample.a, sample.b
    if order == 0:
        terms = a * table.cos + b * table.sin
    elif order == 1:
        terms = table.d1 * (b * table.cos - a * table.sin)
    elif order == 2:
        terms = table.d2 * (b * table.cos - a * table.sin) - table.d1**2 * (
            a * table.cos + b * table.sin
        )
    else:
        raise ValidationError(f"order must be 0, 1 or 2, got {order}")
    return sample.scale * np.sum(terms, axis=1)


@dataclass(frozen=True, eq=False)
class RestrictedWave:
    """
    f = F o gamma for one sample and one curve.

    ``grid_table`` optionally carries a precomputed phase table for the
    counting grid; it depends only on (spec, curve, grid) and may be shared
    between samples.
    """

    sample: WaveSample
    curve: CurveDef
    grid_table: Optional[PhaseTable] = None

    @property
    def spec(self) -> EigenvalueSpec:
        return self.sample.spec

    @property
    def lam(self) -> float:
        return self.sample.spec.lam

    def with_sample(self, sample: WaveSample) -> "RestrictedWave":
        return RestrictedWave(sample=sample, curve=self.curve, grid_table=self.grid_table)

    def table(self, t: np.ndarray) -> PhaseTable:
        cached = self.grid_table
        if cached is not None and cached.t.shape == np.shape(t) and np.array_equal(cached.t, t):
            return cached
        return build_phase_table(self.spec, self.curve, t)


def batch_eval(
    rw: RestrictedWave, grid: Union[Sequence[float], np.ndarray], order: int = 0
) -> np.ndarray:
    """
    Evaluate f^(order) on an array of parameters.

    Args:
        rw: RestrictedWave
        grid: Parameters in [0, 1]
        order: 0, 1 or 2

    Returns:
        Array of values, one per grid entry
    """
    tt = np.atleast_1d(np.asarray(grid, dtype=float))
    if tt.size and (tt.min() < 0.0 or tt.max() > 1.0):
        raise ValidationError("grid parameters must lie in [0, 1]")
    return evaluate_table(rw.sample, rw.table(tt), order)


def eval_restricted(rw: RestrictedWave, t: float, order: int = 0) -> float:
    tt = float(t) - math.floor(float(t))
    return float(evaluate_table(rw.sample, rw.table(np.array([tt])), order)[0])


def derivative_bounds(rw: RestrictedWave) -> Tuple[float, float]:
    """
    Global bounds (L1, L2) on |f'| and |f''| from the coefficient sizes.

    L1 = 2 pi lam sqrt(2/N) sum sqrt(a^2 + b^2) and
    L2 = sqrt(2/N) sum sqrt(a^2 + b^2) (lam^2 + lam * curvature_max).
    """
    amp = rw.sample.scale * float(np.sum(np.hypot(rw.sample.a, rw.sample.b)))
    lam = rw.lam
    return TWO_PI * lam * amp, amp * (lam * lam + lam * rw.curve.curvature_max)


def restriction_ratio(rw: RestrictedWave, quadrature_points: int = 1024) -> float:
    """
    Ratio of the curve L2 mass of f to the torus L2 mass of F.

    The numerator uses the periodic trapezoid rule, which converges
    geometrically for analytic periodic integrands; the denominator is
    exactly sum(a^2 + b^2) / N.
    """
    if quadrature_points < 64:
        raise ValidationError("quadrature_points must be >= 64")
    torus = rw.sample.l2_norm() ** 2
    if torus == 0.0:
        raise ValidationError("restriction ratio is undefined for the zero function")
    k = max(quadrature_points, int(math.ceil(8.0 * rw.lam)))
    t = np.arange(k) / k
    values = batch_eval(rw, t, 0)
    return float(np.mean(values**2)) / torus


def sample_dump(sample: WaveSample) -> Dict[str, Any]:
    return {
        "m": sample.spec.m,
        "seed": sample.master_seed,
        "trial": sample.trial_index,
        "a": [float(v) for v in sample.a],
        "b": [float(v) for v in sample.b],
    }


def sample_from_dump(data: Mapping[str, Any]) -> WaveSample:
    spec = enumerate_lattice_points(int(data["m"]))
    spec.require_points(4)
    a = np.asarray(data["a"], dtype=float)
    b = np.asarray(data["b"], dtype=float)
    if a.shape != (len(spec.half_points),) or b.shape != a.shape:
        raise ValidationError("coefficient arrays do not match the half set size")
    seed = data.get("seed")
    trial = data.get("trial")
    return WaveSample(
        spec=spec,
        a=_frozen(a),
        b=_frozen(b),
        master_seed=None if seed is None else int(seed),
        trial_index=None if trial is None else int(trial),
    )
