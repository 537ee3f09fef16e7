"""
Exact integer arithmetic for the frequency sets E_lambda.

E_lambda is the set of integer vectors (mu1, mu2) with mu1^2 + mu2^2 = m. Its
size N is the dimension of the eigenspace with eigenvalue 4 pi^2 m. Everything
here is integer arithmetic except the angular Fourier coefficient, which is
formed from exact integers and rounded once.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from sympy import factorint

from .errors import ValidationError

logger = logging.getLogger(__name__)

TRIAL_DIVISION_LIMIT = 10**6
MAX_M = 2**63 - 1


Factorization = Tuple[Tuple[int, int], ...]


class LatticePoint(NamedTuple):
    mu1: int
    mu2: int


@dataclass(frozen=True)
class EigenvalueSpec:
    """
    Arithmetic ground truth for one eigenvalue 4 pi^2 m.

    ``points`` is E_lambda in lexicographic order, ``half_points`` keeps one
    vector of each antipodal pair (mu1 > 0, or mu1 == 0 and mu2 > 0), also in
    lexicographic order. Wave coefficients are indexed by ``half_points``.
    """

    m: int
    lam: float
    factorization: Factorization
    points: Tuple[LatticePoint, ...]
    half_points: Tuple[LatticePoint, ...]

    @property
    def N(self) -> int:
        return len(self.points)

    @cached_property
    def points_array(self) -> np.ndarray:
        return np.array(self.points, dtype=np.int64).reshape(-1, 2)

    @cached_property
    def half_array(self) -> np.ndarray:
        return np.array(self.half_points, dtype=np.int64).reshape(-1, 2)

    def require_points(self, minimum: int = 1) -> None:
        if self.N < minimum:
            raise ValidationError(
                f"m={self.m} has N={self.N} lattice points, need at least {minimum}"
            )


def factorize(m: int) -> Factorization:
    """
    Factor a positive integer.

    Trial division runs up to 10^6; any cofactor left over is split with
    sympy.factorint.

    Args:
        m: Integer in [1, 2^63 - 1]

    Returns:
        Tuple of (prime, exponent) pairs with strictly increasing primes
    """
    m = int(m)
    if not 1 <= m <= MAX_M:
        raise ValidationError(f"m must be in [1, 2^63 - 1], got {m}")
    found: Dict[int, int] = {}
    n = m
    while n % 2 == 0:
        found[2] = found.get(2, 0) + 1
        n //= 2
    p = 3
    limit = min(TRIAL_DIVISION_LIMIT, math.isqrt(n))
    while p <= limit:
        if n % p == 0:
            while n % p == 0:
                found[p] = found.get(p, 0) + 1
                n //= p
            limit = min(TRIAL_DIVISION_LIMIT, math.isqrt(n))
        p += 2
    if n > 1:
        if n <= TRIAL_DIVISION_LIMIT**2:
            # no factor below sqrt(n) survived trial division
            found[n] = found.get(n, 0) + 1
        else:
            for q, k in factorint(n).items():
                found[int(q)] = found.get(int(q), 0) + k
    return tuple(sorted(found.items()))


def multiplicity_formula(factorization: Factorization) -> int:
    """
    Number of representations of m as an ordered sum of two squares.

    Args:
        factorization: Output of ``factorize``

    Returns:
        4 * prod(a_j + 1) over primes p_j = 1 mod 4, or 0 when some prime
        3 mod 4 divides m to an odd power
    """
    count = 4
    for prime, exponent in factorization:
        if prime % 4 == 3:
            if exponent % 2:
                return 0
        elif prime % 4 == 1:
            count *= exponent + 1
    return count


def is_sum_of_two_squares(m: int) -> bool:
    return multiplicity_formula(factorize(m)) > 0


def _is_upper_half(mu1: int, mu2: int) -> bool:
    return mu1 > 0 or (mu1 == 0 and mu2 > 0)


def enumerate_lattice_points(m: int) -> EigenvalueSpec:
    """
    Enumerate E_lambda for eigenvalue 4 pi^2 m by scanning mu1.

    An m that is not a sum of two squares gives a spec with no points; callers
    that need N >= 1 must check (``EigenvalueSpec.require_points``).

    Args:
        m: Positive integer

    Returns:
        EigenvalueSpec with lexicographically sorted points
    """
    m = int(m)
    if m < 1:
        raise ValidationError(f"m must be >= 1, got {m}")
    factorization = factorize(m)
    points: List[LatticePoint] = []
    if multiplicity_formula(factorization) > 0:
        root = math.isqrt(m)
        for mu1 in range(-root, root + 1):
            rest = m - mu1 * mu1
            mu2 = math.isqrt(rest)
            if mu2 * mu2 != rest:
                continue
            if mu2 == 0:
                points.append(LatticePoint(mu1, 0))
            else:
                points.append(LatticePoint(mu1, -mu2))
                points.append(LatticePoint(mu1, mu2))
    points.sort()
    logger.debug("m=%d: %d lattice points", m, len(points))
    half = [p for p in points if _is_upper_half(p.mu1, p.mu2)]
    return EigenvalueSpec(
        m=m,
        lam=2.0 * math.pi * math.sqrt(m),
        factorization=factorization,
        points=tuple(points),
        half_points=tuple(half),
    )


def spectral_matrix(spec: EigenvalueSpec) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    """
    Sum of mu mu^T over E_lambda, in exact integers.

    The 8-fold symmetry of E_lambda forces this to equal (N m / 2) I.
    """
    spec.require_points()
    s11 = s12 = s22 = 0
    for mu1, mu2 in spec.points:
        s11 += mu1 * mu1
        s12 += mu1 * mu2
        s22 += mu2 * mu2
    return ((s11, s12), (s12, s22))


def _gaussian_power_real(mu1: int, mu2: int, k: int) -> int:
    """Real part of (mu1 + i mu2)^k in exact integers."""
    re, im = 1, 0
    base_re, base_im = mu1, mu2
    while k:
        if k & 1:
            re, im = re * base_re - im * base_im, re * base_im + im * base_re
        base_re, base_im = (
            base_re * base_re - base_im * base_im,
            2 * base_re * base_im,
        )
        k >>= 1
    return re


def angular_fourier(spec: EigenvalueSpec, k: int) -> float:
    """
    Fourier coefficient of the spectral measure tau_m at frequency k.

    cos(k theta_mu) = Re((mu1 + i mu2)^k) / m^(k/2), so for even k the whole
    average is a ratio of integers and is rounded once. Odd k vanish by the
    antipodal symmetry and return 0.0.

    Args:
        spec: EigenvalueSpec with N >= 1
        k: Integer frequency

    Returns:
        (1/N) sum over E_lambda of cos(k theta_mu), in [-1, 1]
    """
    spec.require_points()
    k = abs(int(k))
    if k % 2:
        return 0.0
    total = sum(_gaussian_power_real(mu1, mu2, k) for mu1, mu2 in spec.half_points)
    return float(Fraction(total, len(spec.half_points) * spec.m ** (k // 2)))


def _angle_order(spec: EigenvalueSpec) -> np.ndarray:
    pts = spec.points_array
    return pts[np.argsort(np.arctan2(pts[:, 1], pts[:, 0]), kind="stable")]


def _chord_sq(p: Any, q: Any) -> int:
    d1 = int(p[0]) - int(q[0])
    d2 = int(p[1]) - int(q[1])
    return d1 * d1 + d2 * d2


def _ccw_within_half_turn(p: Any, q: Any) -> bool:
    cross = int(p[0]) * int(q[1]) - int(p[1]) * int(q[0])
    dot = int(p[0]) * int(q[0]) + int(p[1]) * int(q[1])
    return cross > 0 or (cross == 0 and dot > 0)


def default_arc_window(m: int) -> float:
    return float(m) ** 0.25


def arc_statistic_B(spec: EigenvalueSpec, window: Optional[float] = None) -> int:
    """
    Largest number of points of E_lambda on one closed arc of chord <= window.

    Arcs live on the circle of radius sqrt(m). Points are sorted by angle once
    and a two-pointer window slides counter-clockwise around the circle; the
    chord test is exact in integers.

    An arc is measured by the chord between its end points, which grows with
    the angular span only up to a half turn. Arcs are therefore taken with
    span below a half turn while window < 2 sqrt(m); once the window reaches
    the diameter every arc qualifies and the whole of E_lambda is counted, so
    the statistic jumps to N at window = 2 sqrt(m).

    Args:
        spec: EigenvalueSpec with N >= 1
        window: Chord-length window; defaults to m^(1/4)

    Returns:
        The maximal arc population
    """
    spec.require_points()
    if window is None:
        window = default_arc_window(spec.m)
    if not window > 0:
        raise ValidationError(f"window must be positive, got {window}")
    n = spec.N
    if window * window >= 4 * spec.m:
        return n
    ordered = _angle_order(spec)
    w_sq = window * window
    best = 1
    j = 0
    for i in range(n):
        j = max(j, i)
        while j + 1 < i + n:
            nxt = ordered[(j + 1) % n]
            if not _ccw_within_half_turn(ordered[i], nxt):
                break
            if _chord_sq(ordered[i], nxt) > w_sq:
                break
            j += 1
        best = max(best, j - i + 1)
    return best


def arc_statistic_B_bruteforce(
    spec: EigenvalueSpec, window: Optional[float] = None
) -> int:
    """O(N^2) reference for ``arc_statistic_B``: every ordered pair spans an arc."""
    spec.require_points()
    if window is None:
        window = default_arc_window(spec.m)
    if window * window >= 4 * spec.m:
        return spec.N
    pts = [(int(a), int(b)) for a, b in spec.points_array]
    w_sq = window * window
    best = 1
    for p in pts:
        for q in pts:
            if p == q:
                continue
            if not _ccw_within_half_turn(p, q):
                continue
            if _chord_sq(p, q) > w_sq:
                continue
            # points r on the ccw arc from p to q
            inside = sum(
                1
                for r in pts
                if r == p
                or (
                    _ccw_within_half_turn(p, r)
                    and _chord_sq(p, r)
                    <= _chord_sq(p, q)
                )
            )
            best = max(best, inside)
    return best


def spec_to_dict(spec: EigenvalueSpec) -> Dict[str, Any]:
    return {
        "m": spec.m,
        "lambda": spec.lam,
        "N": spec.N,
        "points": [[p.mu1, p.mu2] for p in spec.points],
    }


def spec_from_dict(data: Dict[str, Any]) -> EigenvalueSpec:
    """
    Rebuild a spec from its JSON object and check it against enumeration.

    Raises:
        ValidationError: if the stored points or N disagree with E_lambda
    """
    spec = enumerate_lattice_points(int(data["m"]))
    stored = [tuple(int(v) for v in pair) for pair in data.get("points", [])]
    if stored != [tuple(p) for p in spec.points] or int(data.get("N", -1)) != spec.N:
        raise ValidationError(f"stored lattice data for m={spec.m} is inconsistent")
    return spec
