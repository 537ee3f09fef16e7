"""Tests for lattice point enumeration and arithmetic statistics."""

import math

import numpy as np
import pytest

from torwave.errors import ValidationError
from torwave.lattice import (
    angular_fourier,
    arc_statistic_B,
    arc_statistic_B_bruteforce,
    enumerate_lattice_points,
    factorize,
    is_sum_of_two_squares,
    multiplicity_formula,
    spec_from_dict,
    spec_to_dict,
    spectral_matrix,
)


def scan_count(m: int) -> int:
    r = math.isqrt(m)
    axis = np.arange(-r, r + 1)
    return int(np.sum(axis[:, None] ** 2 + axis[None, :] ** 2 == m))


class TestFactorize:
    @pytest.mark.parametrize(
        "m, expected",
        [(1, ()), (325, ((5, 2), (13, 1))), (65, ((5, 1), (13, 1))), (2**10, ((2, 10),))],
    )
    def test_small_values(self, m, expected):
        assert factorize(m) == expected

    def test_large_prime(self):
        """A Mersenne prime beyond the trial-division range stays whole."""
        p = 2**61 - 1
        assert factorize(p) == ((p, 1),)

    def test_product_of_two_large_primes(self):
        assert factorize(1000003 * 1000033) == ((1000003, 1), (1000033, 1))

    @pytest.mark.parametrize(
        "m, expected",
        [
            (2147483647**2, ((2147483647, 2),)),
            (3 * (2**61 - 1), ((3, 1), (2**61 - 1, 1))),
            (2**63 - 1, ((7, 2), (73, 1), (127, 1), (337, 1), (92737, 1), (649657, 1))),
        ],
    )
    def test_large_cofactors(self, m, expected):
        result = factorize(m)
        assert result == expected
        assert all(type(p) is int and type(k) is int for p, k in result)

    def test_rejects_non_positive(self):
        with pytest.raises(ValidationError):
            factorize(0)


class TestEnumeration:
    def test_unit_circle(self):
        spec = enumerate_lattice_points(1)
        assert [tuple(p) for p in spec.points] == [(-1, 0), (0, -1), (0, 1), (1, 0)]
        assert spec.N == 4
        assert [tuple(p) for p in spec.half_points] == [(0, 1), (1, 0)]

    def test_not_a_sum_of_two_squares(self):
        spec = enumerate_lattice_points(3)
        assert spec.N == 0
        assert spec.points == ()
        with pytest.raises(ValidationError):
            spec.require_points()

    def test_m25(self):
        spec = enumerate_lattice_points(25)
        assert spec.N == 12
        points = {tuple(p) for p in spec.points}
        assert {(3, 4), (4, 3), (5, 0), (-3, -4), (0, -5)} <= points

    def test_m325(self):
        spec = enumerate_lattice_points(325)
        assert spec.N == 24 == multiplicity_formula(spec.factorization)

    def test_lambda(self):
        spec = enumerate_lattice_points(65)
        assert spec.lam**2 == pytest.approx(4 * math.pi**2 * 65, rel=1e-15)

    @pytest.mark.parametrize("m", [5, 25, 65, 325, 1105])
    def test_symmetries(self, m):
        spec = enumerate_lattice_points(m)
        points = {tuple(p) for p in spec.points}
        for a, b in points:
            assert a * a + b * b == m
            assert {(-a, -b), (a, -b), (-a, b), (b, a)} <= points
        half = {tuple(p) for p in spec.half_points}
        assert len(half) == spec.N // 2
        assert all((-a, -b) not in half for a, b in half)
        assert spec.points == tuple(sorted(spec.points))

    def test_arrays(self):
        spec = enumerate_lattice_points(65)
        assert spec.points_array.shape == (16, 2)
        assert spec.half_array.shape == (8, 2)
        assert spec.points_array.dtype == np.int64


class TestMultiplicity:
    @pytest.mark.parametrize("m, expected", [(25, 12), (9, 4), (21, 0), (2, 4), (1105, 32)])
    def test_examples(self, m, expected):
        assert multiplicity_formula(factorize(m)) == expected

    def test_matches_scan(self):
        for m in range(1, 1500):
            assert multiplicity_formula(factorize(m)) == scan_count(m), m

    def test_is_sum_of_two_squares(self):
        assert is_sum_of_two_squares(50)
        assert not is_sum_of_two_squares(21)


class TestSpectralMatrix:
    @pytest.mark.parametrize(
        "m, expected",
        [(5, ((20, 0), (0, 20))), (1, ((2, 0), (0, 2))), (25, ((150, 0), (0, 150)))],
    )
    def test_examples(self, m, expected):
        assert spectral_matrix(enumerate_lattice_points(m)) == expected

    def test_isotropic_everywhere(self):
        for m in range(1, 800):
            spec = enumerate_lattice_points(m)
            if spec.N:
                half = spec.N * m // 2
                assert spectral_matrix(spec) == ((half, 0), (0, half))

    def test_empty_spec(self):
        with pytest.raises(ValidationError):
            spectral_matrix(enumerate_lattice_points(3))


class TestAngularFourier:
    @pytest.mark.parametrize("m, expected", [(1, 1.0), (2, -1.0), (5, -0.28)])
    def test_fourth_coefficient(self, m, expected):
        assert abs(angular_fourier(enumerate_lattice_points(m), 4) - expected) <= 1e-12

    @pytest.mark.parametrize("m", [1, 5, 25, 325])
    @pytest.mark.parametrize("k", [1, 3, 7])
    def test_odd_frequencies_vanish(self, m, k):
        assert angular_fourier(enumerate_lattice_points(m), k) == 0.0

    def test_matches_floating_point_average(self):
        spec = enumerate_lattice_points(1105)
        theta = np.arctan2(spec.points_array[:, 1], spec.points_array[:, 0])
        for k in (2, 4, 8):
            assert angular_fourier(spec, k) == pytest.approx(np.mean(np.cos(k * theta)), abs=1e-12)

    def test_bounded(self):
        for m in (65, 325, 1105, 5525):
            assert abs(angular_fourier(enumerate_lattice_points(m), 4)) <= 1.0

    def test_empty_spec(self):
        with pytest.raises(ValidationError):
            angular_fourier(enumerate_lattice_points(21), 4)


class TestArcStatistic:
    def test_m25_default_window(self):
        assert arc_statistic_B(enumerate_lattice_points(25)) == 2

    def test_m1_small_window(self):
        assert arc_statistic_B(enumerate_lattice_points(1), 0.5) == 1

    def test_window_covering_circle(self):
        spec = enumerate_lattice_points(65)
        assert arc_statistic_B(spec, 2 * math.sqrt(65) + 1) == spec.N

    def test_jump_at_the_diameter(self):
        spec = enumerate_lattice_points(25)
        below = arc_statistic_B(spec, 9.999)
        assert below == arc_statistic_B_bruteforce(spec, 9.999) == 6
        assert arc_statistic_B(spec, 10.0) == spec.N == 12

    def test_matches_bruteforce(self):
        for m in range(1, 600):
            spec = enumerate_lattice_points(m)
            if spec.N:
                assert arc_statistic_B(spec) == arc_statistic_B_bruteforce(spec), m

    @pytest.mark.parametrize("window", [1.0, 3.0, 10.0, 25.0])
    def test_matches_bruteforce_m325(self, window):
        spec = enumerate_lattice_points(325)
        assert arc_statistic_B(spec, window) == arc_statistic_B_bruteforce(spec, window)

    def test_rejects_bad_window(self):
        with pytest.raises(ValidationError):
            arc_statistic_B(enumerate_lattice_points(5), 0.0)


class TestSerialization:
    def test_round_trip(self):
        spec = enumerate_lattice_points(325)
        data = spec_to_dict(spec)
        assert data["N"] == 24
        assert spec_from_dict(data).points == spec.points

    def test_rejects_tampered_points(self):
        data = spec_to_dict(enumerate_lattice_points(25))
        data["points"] = data["points"][:-1]
        with pytest.raises(ValidationError):
            spec_from_dict(data)
