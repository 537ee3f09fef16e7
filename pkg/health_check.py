#!/usr/bin/env python3
"""
Health check script for torwave
Verifies the numeric stack and a few closed-form results; exit 0 when all pass
"""

import math
import sys
from typing import Callable, List, Tuple


def check_dependencies() -> bool:
    """Check if required dependencies are available"""
    try:
        import numpy  # noqa: F401
        import pandas  # noqa: F401
        import scipy  # noqa: F401
        import sympy  # noqa: F401

        return True
    except ImportError as e:
        print(f"Dependency check failed: {e}")
        return False


def check_lattice() -> bool:
    """N for m=325 and the fourth angular coefficient for m=5"""
    from torwave.lattice import angular_fourier, enumerate_lattice_points

    if enumerate_lattice_points(325).N != 24:
        print("Lattice check failed: N(325) != 24")
        return False
    return abs(angular_fourier(enumerate_lattice_points(5), 4) + 0.28) <= 1e-12


def check_curves() -> bool:
    """Circle and oval both pass validation"""
    from torwave.curve import make_analytic_oval, make_circle, validate_curve

    return (
        validate_curve(make_circle((0.5, 0.5))).passed
        and validate_curve(make_analytic_oval(2.0, 1.0, (0.5, 0.5))).passed
    )


def check_zero_counting() -> bool:
    """The m=1 cosine wave crosses the circle at t = 1/4 and 3/4"""
    import numpy as np

    from torwave.curve import make_circle
    from torwave.lattice import enumerate_lattice_points
    from torwave.wave import RestrictedWave, sample_from_mapping
    from torwave.zeros import count_zeros

    sample = sample_from_mapping(enumerate_lattice_points(1), {(1, 0): 1.0})
    result = count_zeros(RestrictedWave(sample, make_circle((0.25, 0.5))))
    return result.count == 2 and bool(np.allclose(result.roots, [0.25, 0.75], atol=1e-10))


def check_determinism() -> bool:
    """The same seed and trial give the same coefficients"""
    import numpy as np

    from torwave.lattice import enumerate_lattice_points
    from torwave.wave import CoefficientEnsemble, sample_coefficients

    spec = enumerate_lattice_points(25)
    first = sample_coefficients(spec, CoefficientEnsemble.GAUSSIAN, 7, 3)
    second = sample_coefficients(spec, CoefficientEnsemble.GAUSSIAN, 7, 3)
    return bool(np.array_equal(first.a, second.a) and np.array_equal(first.b, second.b))


def check_variance_term() -> bool:
    """The leading variance term vanishes on the circle"""
    from torwave.curve import make_circle
    from torwave.experiments import variance_leading_term
    from torwave.lattice import enumerate_lattice_points

    spec = enumerate_lattice_points(25)
    term = variance_leading_term(spec, make_circle((0.5, 0.5)), 128)
    return math.isfinite(term.value) and abs(term.value) <= 1e-6 * spec.m / spec.N


Check = Tuple[str, Callable[[], bool]]

CHECKS: List[Check] = [
    ("Dependencies", check_dependencies),
    ("Lattice", check_lattice),
    ("Curves", check_curves),
    ("Zero counting", check_zero_counting),
    ("Determinism", check_determinism),
    ("Variance term", check_variance_term),
]


def run_checks(checks: List[Check]) -> bool:
    """Print one status line per check; True when every check passed."""
    all_passed = True
    for name, check_func in checks:
        try:
            result = check_func()
        except Exception as e:
            print(f"{name:15} ERROR: {e}")
            all_passed = False
            continue
        print(f"{name:15} {'PASS' if result else 'FAIL'}")
        all_passed = all_passed and bool(result)
    return all_passed


def main() -> None:
    """Run all health checks"""
    print("torwave health check")
    print("=" * 40)
    all_passed = run_checks(CHECKS)
    print("=" * 40)
    if all_passed:
        print("All health checks passed")
        sys.exit(0)
    print("Some health checks failed")
    sys.exit(1)


if __name__ == "__main__":
    main()
