"""
Unit-length, positively curved reference curves on the torus.

Two families are provided: the circle of radius 1/(2 pi), whose curvature is
constantly 2 pi, and an oval obtained from an ellipse by rescaling to unit
perimeter and reparametrizing by arc length. Curves sit inside the fundamental
domain; the wave phase 2 pi <mu, gamma(t)> does not care about wrapping.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Tuple, Union

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator
from scipy.special import ellipeinc

from .errors import NumericError, ValidationError

logger = logging.getLogger(__name__)

TOL_UNIT_SPEED = 1e-9
TOL_REPARAM = 1e-10
TOL_CLOSURE = 1e-9
REPARAM_KNOTS = 4096
VALIDATION_GRID = 4096
CIRCLE_RADIUS = 1.0 / (2.0 * math.pi)

ArrayLike = Union[float, np.ndarray]


class CurveKind(str, Enum):
    CIRCLE = "circle"
    ANALYTIC_OVAL = "analytic_oval"


@dataclass(frozen=True, eq=False)
class CurveDef:
    """
    Immutable curve description.

    For the oval, ``semi_axes`` are the native ellipse axes (A, B) and
    ``scale`` shrinks them so the perimeter is 1; ``t_knots``/``s_knots`` hold
    the arc-length table used to seed Newton polishing of s(t).
    """

    kind: CurveKind
    center: Tuple[float, float]
    semi_axes: Tuple[float, float]
    scale: float
    curvature_min: float
    curvature_max: float
    unit_speed: bool = True
    t_knots: np.ndarray = field(default_factory=lambda: np.zeros(0))
    s_knots: np.ndarray = field(default_factory=lambda: np.zeros(0))
    length: float = 1.0

    def describe(self) -> str:
        cx, cy = self.center
        if self.kind is CurveKind.CIRCLE:
            return f"circle:{cx!r},{cy!r}"
        a, b = self.semi_axes
        return f"oval:{a!r},{b!r},{cx!r},{cy!r}"


@dataclass(frozen=True)
class ValidationReport:
    curve: str
    grid_size: int
    max_speed_defect: float
    min_curvature: float
    max_curvature: float
    closure_position: float
    closure_velocity: float
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "curve": self.curve,
            "grid_size": self.grid_size,
            "max_speed_defect": self.max_speed_defect,
            "min_curvature": self.min_curvature,
            "max_curvature": self.max_curvature,
            "closure_position": self.closure_position,
            "closure_velocity": self.closure_velocity,
            "passed": self.passed,
        }


def _check_point(center: Tuple[float, float]) -> Tuple[float, float]:
    cx, cy = float(center[0]), float(center[1])
    if not (0.0 <= cx < 1.0 and 0.0 <= cy < 1.0):
        raise ValidationError(f"center must lie in [0,1)^2, got ({cx}, {cy})")
    return cx, cy


def make_circle(center: Tuple[float, float]) -> CurveDef:
    """
    Unit-length circle of radius 1/(2 pi) around ``center``.

    gamma(t) = center + rho (cos 2 pi t, sin 2 pi t).
    """
    cx, cy = _check_point(center)
    return CurveDef(
        kind=CurveKind.CIRCLE,
        center=(cx, cy),
        semi_axes=(CIRCLE_RADIUS, CIRCLE_RADIUS),
        scale=1.0,
        curvature_min=2.0 * math.pi,
        curvature_max=2.0 * math.pi,
    )


# -- ellipse arc length ------------------------------------------------------


def _native_speed(a: float, b: float, s: np.ndarray) -> np.ndarray:
    return np.sqrt((a * np.sin(s)) ** 2 + (b * np.cos(s)) ** 2)


def _native_arclength(a: float, b: float, s: np.ndarray) -> np.ndarray:
    """Arc length of (a cos u, b sin u) for u in [0, s], via incomplete E(phi|m)."""
    if a >= b:
        par = 1.0 - (b / a) ** 2
        return a * (ellipeinc(math.pi / 2, par) - ellipeinc(math.pi / 2 - s, par))
    par = 1.0 - (a / b) ** 2
    return b * ellipeinc(s, par)


def _invert_arclength(
    a: float, b: float, perimeter: float, t: np.ndarray, s0: np.ndarray
) -> np.ndarray:
    """
    Solve sigma(s) = t * perimeter by safeguarded Newton.

    Bisection takes over whenever a Newton step leaves the current bracket.
    """
    target = t * perimeter
    lo = np.zeros_like(t)
    hi = np.full_like(t, 2.0 * math.pi)
    s = np.clip(s0, lo, hi)
    for _ in range(80):
        resid = _native_arclength(a, b, s) - target
        if np.max(np.abs(resid), initial=0.0) <= TOL_REPARAM * perimeter * 1e-2:
            return s
        lo = np.where(resid < 0, s, lo)
        hi = np.where(resid > 0, s, hi)
        step = s - resid / _native_speed(a, b, s)
        outside = (step <= lo) | (step >= hi)
        s = np.where(outside, 0.5 * (lo + hi), step)
    resid = _native_arclength(a, b, s) - target
    worst = float(np.max(np.abs(resid), initial=0.0)) / perimeter
    if worst > TOL_REPARAM:
        raise NumericError(f"arc-length inversion stalled at residual {worst:.3e}")
    return s


def make_analytic_oval(
    A: float, B: float, center: Tuple[float, float], reparametrize: bool = True
) -> CurveDef:
    """
    Ellipse-derived analytic oval of unit length.

    The native curve (A cos s, B sin s) + center is scaled to unit perimeter
    and, unless ``reparametrize`` is False, reparametrized to unit speed. The
    non-reparametrized variant exists for validation experiments only.

    Args:
        A: First semi-axis (native units)
        B: Second semi-axis (native units), different from A
        center: Center in [0,1)^2
        reparametrize: Whether to use the arc-length parameter

    Returns:
        CurveDef of kind analytic_oval
    """
    a, b = float(A), float(B)
    if not (a > 0 and b > 0):
        raise ValidationError(f"semi-axes must be positive, got A={A}, B={B}")
    if a == b:
        raise ValidationError("A == B degenerates to a circle; use make_circle")
    cx, cy = _check_point(center)
    perimeter = float(_native_arclength(a, b, np.array([2.0 * math.pi]))[0])
    scale = 1.0 / perimeter
    ra, rb = scale * a, scale * b
    if cx - ra < 0 or cx + ra > 1 or cy - rb < 0 or cy + rb > 1:
        raise ValidationError(
            f"oval with half-extents ({ra:.4f}, {rb:.4f}) around ({cx}, {cy}) "
            "leaves the fundamental domain"
        )
    t_knots = np.linspace(0.0, 1.0, REPARAM_KNOTS + 1)
    s_knots = _invert_arclength(a, b, perimeter, t_knots, 2.0 * math.pi * t_knots)
    s_knots[0], s_knots[-1] = 0.0, 2.0 * math.pi
    curve = CurveDef(
        kind=CurveKind.ANALYTIC_OVAL,
        center=(cx, cy),
        semi_axes=(a, b),
        scale=scale,
        curvature_min=0.0,
        curvature_max=0.0,
        unit_speed=reparametrize,
        t_knots=t_knots,
        s_knots=s_knots,
    )
    grid = np.linspace(0.0, 1.0, VALIDATION_GRID, endpoint=False)
    kappa = np.linalg.norm(curve_eval(curve, grid, 2), axis=-1)
    object.__setattr__(curve, "curvature_min", float(kappa.min()))
    object.__setattr__(curve, "curvature_max", float(kappa.max()))
    if not curve.curvature_min > 0:
        raise NumericError("oval curvature vanished on the validation grid")
    logger.debug(
        "oval A=%g B=%g: scale=%.6f curvature in [%.6f, %.6f]",
        a, b, scale, curve.curvature_min, curve.curvature_max,
    )
    return curve


def _interpolator(curve: CurveDef) -> PchipInterpolator:
    cached = curve.__dict__.get("_pchip")
    if cached is None:
        cached = PchipInterpolator(curve.t_knots, curve.s_knots)
        object.__setattr__(curve, "_pchip", cached)
    return cached


def _oval_parameter(curve: CurveDef, t: np.ndarray) -> np.ndarray:
    if not curve.unit_speed:
        return 2.0 * math.pi * t
    a, b = curve.semi_axes
    s0 = _interpolator(curve)(t)
    return _invert_arclength(a, b, 1.0 / curve.scale, t, s0)


def _evaluate_raw(curve: CurveDef, t: np.ndarray, order: int) -> np.ndarray:
    cx, cy = curve.center
    if curve.kind is CurveKind.CIRCLE:
        ang = 2.0 * math.pi * t
        c, s = np.cos(ang), np.sin(ang)
        if order == 0:
            return np.stack([cx + CIRCLE_RADIUS * c, cy + CIRCLE_RADIUS * s], axis=-1)
        if order == 1:
            return np.stack([-s, c], axis=-1)
        return np.stack([-2.0 * math.pi * c, -2.0 * math.pi * s], axis=-1)

    a, b = curve.semi_axes
    k = curve.scale
    s = _oval_parameter(curve, t)
    cs, sn = np.cos(s), np.sin(s)
    if order == 0:
        return np.stack([cx + k * a * cs, cy + k * b * sn], axis=-1)
    if not curve.unit_speed:
        w = 2.0 * math.pi
        if order == 1:
            return np.stack([-w * k * a * sn, w * k * b * cs], axis=-1)
        return np.stack([-w * w * k * a * cs, -w * w * k * b * sn], axis=-1)
    v = _native_speed(a, b, s)
    if order == 1:
        return np.stack([-a * sn / v, b * cs / v], axis=-1)
    kappa = a * b / (k * v**3)
    return np.stack([-kappa * b * cs / v, -kappa * a * sn / v], axis=-1)


def curve_eval(curve: CurveDef, t: ArrayLike, order: int = 0) -> np.ndarray:
    """
    Evaluate gamma, gamma' or gamma'' in the arc-length parameter.

    t is reduced with t - floor(t), so curve_eval(t) == curve_eval(t + 1)
    holds bit for bit when t and t + 1 are dyadic rationals; for other t the
    two reductions can differ in the last bit of the parameter.

    Args:
        curve: CurveDef
        t: Scalar or array of parameters; reduced modulo 1 first
        order: 0, 1 or 2

    Returns:
        Array of shape (..., 2)
    """
    if order not in (0, 1, 2):
        raise ValidationError(f"order must be 0, 1 or 2, got {order}")
    tt = np.asarray(t, dtype=float)
    reduced = tt - np.floor(tt)
    return _evaluate_raw(curve, np.atleast_1d(reduced), order).reshape(tt.shape + (2,))


def curve_length(curve: CurveDef, t1: float = 0.0, t2: float = 1.0) -> float:
    """Length of gamma over [t1, t2] by adaptive quadrature of the speed."""

    def speed(t: float) -> float:
        return float(np.linalg.norm(curve_eval(curve, t, 1)))

    value, _ = integrate.quad(speed, t1, t2, epsabs=1e-13, epsrel=1e-12, limit=200)
    return float(value)


def validate_curve(curve: CurveDef, grid_size: int = VALIDATION_GRID) -> ValidationReport:
    """
    Check unit speed, positive curvature and closure on a uniform grid.

    A violation produces a failing report rather than an exception.
    """
    if grid_size < 1000:
        raise ValidationError(f"grid_size must be >= 1000, got {grid_size}")
    grid = np.linspace(0.0, 1.0, grid_size, endpoint=False)
    speed = np.linalg.norm(curve_eval(curve, grid, 1), axis=-1)
    kappa = np.linalg.norm(curve_eval(curve, grid, 2), axis=-1)
    end = np.array([1.0])
    closure_pos = float(
        np.linalg.norm(_evaluate_raw(curve, end, 0)[0] - curve_eval(curve, 0.0, 0))
    )
    closure_vel = float(
        np.linalg.norm(_evaluate_raw(curve, end, 1)[0] - curve_eval(curve, 0.0, 1))
    )
    speed_defect = float(np.max(np.abs(speed - 1.0)))
    passed = (
        speed_defect <= TOL_UNIT_SPEED
        and float(kappa.min()) > 0.0
        and closure_pos <= TOL_CLOSURE
        and closure_vel <= TOL_CLOSURE
    )
    if not passed:
        logger.info("curve %s failed validation", curve.describe())
    return ValidationReport(
        curve=curve.describe(),
        grid_size=grid_size,
        max_speed_defect=speed_defect,
        min_curvature=float(kappa.min()),
        max_curvature=float(kappa.max()),
        closure_position=closure_pos,
        closure_velocity=closure_vel,
        passed=passed,
    )


def parse_curve(text: str) -> CurveDef:
    """
    Build a curve from its command-line form.

    Args:
        text: "circle:cx,cy" or "oval:A,B,cx,cy"

    Returns:
        CurveDef
    """
    kind, _, rest = text.partition(":")
    try:
        values = [float(v) for v in rest.split(",")] if rest else []
    except ValueError:
        raise ValidationError(f"bad curve parameters in {text!r}") from None
    kind = kind.strip().lower()
    if kind == "circle" and len(values) == 2:
        return make_circle((values[0], values[1]))
    if kind == "oval" and len(values) == 4:
        return make_analytic_oval(values[0], values[1], (values[2], values[3]))
    raise ValidationError(
        f"unknown curve {text!r}; expected circle:cx,cy or oval:A,B,cx,cy"
    )
