"""Tests for zero counting and the stability diagnostics."""

import math

import numpy as np
import pytest

from torwave.curve import make_circle
from torwave.errors import ValidationError
from torwave.lattice import enumerate_lattice_points
from torwave.wave import RestrictedWave, batch_eval, derivative_bounds, sample_from_mapping
from torwave.zeros import (
    GridConfig,
    StabilityParams,
    ZeroCountResult,
    classify_intervals,
    count_zeros,
    default_stability_params,
    jensen_diagnostic,
    large_sieve_check,
    perturbation_persistence,
    sieve_points,
    small_value_measure,
)


class TestCountZeros:
    def test_closed_form_crossing(self, cosine_wave):
        result = count_zeros(cosine_wave)
        assert result.count == 2
        assert np.allclose(result.roots, [0.25, 0.75], atol=1e-10)
        assert result.suspects == 0

    def test_closed_form_no_crossing(self):
        sample = sample_from_mapping(enumerate_lattice_points(1), {(1, 0): 1.0})
        result = count_zeros(RestrictedWave(sample, make_circle((0.5, 0.5))))
        assert result.count == 0
        assert result.roots.size == 0

    def test_zero_function_rejected(self, circle):
        zero = sample_from_mapping(enumerate_lattice_points(25), {})
        with pytest.raises(ValidationError):
            count_zeros(RestrictedWave(zero, circle))

    def test_coarse_grid_rejected(self):
        with pytest.raises(ValidationError):
            GridConfig(points_per_lambda=7)

    @pytest.mark.parametrize("tol", [0.0, -1e-9, math.inf, math.nan])
    def test_bad_tolerance_rejected(self, tol):
        with pytest.raises(ValidationError):
            GridConfig(bisection_tol=tol)

    def test_roots_are_sorted_and_accurate(self, gaussian_wave):
        rw = gaussian_wave(0)
        cfg = GridConfig()
        result = count_zeros(rw, cfg)
        lip1, _ = derivative_bounds(rw)
        assert np.all(np.diff(result.roots) > 0)
        assert np.all((result.roots >= 0.0) & (result.roots < 1.0))
        assert np.all(np.abs(batch_eval(rw, result.roots)) < lip1 * cfg.bisection_tol)

    def test_even_count_on_closed_curve(self, gaussian_wave):
        for trial in range(10):
            result = count_zeros(gaussian_wave(trial))
            if result.suspects == 0:
                assert result.count % 2 == 0

    def test_finer_grid_agrees(self, gaussian_wave):
        fine = GridConfig().finer(10)
        for trial in range(10):
            rw = gaussian_wave(trial)
            coarse_result = count_zeros(rw)
            fine_result = count_zeros(rw, fine)
            allowed = max(coarse_result.suspects, fine_result.suspects)
            assert abs(coarse_result.count - fine_result.count) <= allowed

    def test_within_sanity_envelope(self, gaussian_wave):
        rw = gaussian_wave(5)
        assert count_zeros(rw).count <= 10 * rw.lam

    def test_certified_fraction(self, gaussian_wave):
        rw = gaussian_wave(2)
        assert count_zeros(rw).certified_fraction == 0.0
        fraction = count_zeros(rw, GridConfig(certified_mode=True)).certified_fraction
        assert 0.0 <= fraction <= 1.0

    def test_certified_closed_form(self, cosine_wave):
        cfg = GridConfig(points_per_lambda=400, certified_mode=True)
        assert count_zeros(cosine_wave, cfg).certified_fraction > 0.5

    def test_close_pair_of_roots(self):
        """A shallow dip just below zero is found as two roots, not missed."""
        spec = enumerate_lattice_points(1)
        # 2 pi x1 dips about 1e-3 below pi/2 near t = 1/2, so f has two roots
        # about 0.014 apart inside a single coarse cell
        sample = sample_from_mapping(spec, {(1, 0): 1.0})
        rw = RestrictedWave(sample, make_circle((0.409, 0.5)))
        result = count_zeros(rw, GridConfig(points_per_lambda=8))
        fine = count_zeros(rw, GridConfig(points_per_lambda=2000))
        assert result.count == fine.count == 2

    @pytest.mark.parametrize("tol", [1e-18, 1e-300, 5e-324])
    def test_tolerance_below_float_spacing_terminates(self, cosine_wave, gaussian_wave, tol):
        cfg = GridConfig(bisection_tol=tol)
        result = count_zeros(cosine_wave, cfg)
        assert result.count == 2
        assert np.allclose(result.roots, [0.25, 0.75], atol=1e-12)
        rw = gaussian_wave(trial=3)
        assert count_zeros(rw, cfg).count == count_zeros(rw).count

    def test_result_round_trip(self, cosine_wave):
        result = count_zeros(cosine_wave)
        restored = ZeroCountResult.from_dict(result.to_dict())
        assert restored.count == 2
        assert np.array_equal(restored.roots, result.roots)

    def test_result_inconsistent(self):
        with pytest.raises(ValidationError):
            ZeroCountResult.from_dict({"count": 3, "roots": [0.1]})


class TestStabilityParams:
    @pytest.mark.parametrize("n", [4, 8, 12, 24, 96])
    def test_defaults_respect_standing_assumption(self, n):
        params = default_stability_params(n)
        assert params.delta * params.R < 0.25
        assert params.alpha == pytest.approx(params.delta**1.5)
        assert params.beta == pytest.approx(params.delta**0.75)
        assert params.tau == pytest.approx(params.delta**2)
        assert params.R == pytest.approx(4 * math.log(n))
        assert StabilityParams.defaults(n) == params

    def test_too_small(self):
        with pytest.raises(ValidationError):
            default_stability_params(1)


class TestClassifyIntervals:
    def test_alpha_zero_gives_no_unstable_intervals(self, gaussian_wave):
        result = classify_intervals(gaussian_wave(0), 0.0, 0.5, 4.0, 0.05, 32)
        assert result.unstable_count == 0
        assert not result.exceptional

    def test_closed_form_all_stable(self, cosine_wave):
        params = default_stability_params(4)
        result = classify_intervals(cosine_wave, 0.1, 0.1, params.R, params.delta, 32)
        assert result.unstable_count == 0
        assert all(stable for _, _, stable in result.intervals)

    def test_tiling(self, gaussian_wave):
        rw = gaussian_wave(0)
        result = classify_intervals(rw, 0.01, 0.1, 5.0, 0.04, 16)
        starts = [s for s, _, _ in result.intervals]
        ends = [e for _, e, _ in result.intervals]
        assert starts[0] == 0.0 and ends[-1] == pytest.approx(1.0)
        assert len(result.intervals) == math.ceil(rw.lam / 5.0)

    def test_monotone_in_thresholds(self, gaussian_wave):
        rw = gaussian_wave(3)
        counts = [
            classify_intervals(rw, alpha, beta, 4.0, 0.05, 32).unstable_count
            for alpha, beta in [(0.01, 0.05), (0.05, 0.05), (0.05, 0.2), (0.3, 0.5)]
        ]
        assert counts == sorted(counts)

    def test_exceptional_flag(self, gaussian_wave):
        rw = gaussian_wave(3)
        result = classify_intervals(rw, 0.3, 0.5, 4.0, 0.05, 32)
        assert result.exceptional == (result.unstable_count >= 0.05 * rw.lam)

    @pytest.mark.parametrize(
        "alpha, beta, R, delta, density",
        [(0.1, 0.1, 5.0, 0.05, 32), (-0.1, 0.1, 4.0, 0.05, 32), (0.1, 0.1, 4.0, 0.05, 8)],
    )
    def test_invalid(self, gaussian_wave, alpha, beta, R, delta, density):
        with pytest.raises(ValidationError):
            classify_intervals(gaussian_wave(0), alpha, beta, R, delta, density)

    def test_to_dict(self, cosine_wave):
        data = classify_intervals(cosine_wave, 0.1, 0.1, 5.0, 0.04, 16).to_dict()
        assert data["unstable_count"] == 0
        assert all(item["stable"] for item in data["intervals"])


class TestSmallValueMeasure:
    def test_monotone(self, gaussian_wave):
        rw = gaussian_wave(1)
        values = [small_value_measure(rw, a, a) for a in (0.0, 0.05, 0.2, 1.0)]
        assert values == sorted(values)
        assert 0.0 <= values[-1] <= 1.0


class TestJensen:
    def test_closed_form_whole_curve(self, cosine_wave):
        record = jensen_diagnostic(cosine_wave, (0.0, 1.0), 1.0)
        assert record.roots_in_interval == 2
        assert record.hypothesis
        assert record.holds
        assert record.bound == pytest.approx(2 * cosine_wave.lam)

    def test_gaussian_sample(self, gaussian_wave):
        record = jensen_diagnostic(gaussian_wave(0), (0.0, 0.2), 2.0)
        assert record.holds
        assert math.isfinite(record.jensen_quantity)

    def test_interval_without_roots(self):
        sample = sample_from_mapping(enumerate_lattice_points(1), {(1, 0): 1.0})
        rw = RestrictedWave(sample, make_circle((0.5, 0.5)))
        record = jensen_diagnostic(rw, (0.0, 0.5), 1.0)
        assert record.roots_in_interval == 0
        assert record.holds

    def test_too_short(self, gaussian_wave):
        with pytest.raises(ValidationError):
            jensen_diagnostic(gaussian_wave(0), (0.0, 0.01), 2.0)


class TestLargeSieve:
    def test_zero_function(self, circle):
        zero = RestrictedWave(sample_from_mapping(enumerate_lattice_points(25), {}), circle)
        assert large_sieve_check(zero, 0.01, 1) == 0.0

    def test_points_are_separated(self):
        points = sieve_points(0.3)
        assert np.allclose(points, [0.0, 0.3, 0.6, 0.9])
        assert sieve_points(0.25).tolist() == [0.0, 0.25, 0.5, 0.75]

    def test_ratio_positive(self, gaussian_wave):
        rw = gaussian_wave(0)
        for d in (1, 2):
            ratio = large_sieve_check(rw, 1e-3, d)
            assert math.isfinite(ratio) and ratio > 0.0

    @pytest.mark.parametrize("separation, d", [(0.5, 1), (0.0, 1), (0.01, 3)])
    def test_invalid(self, gaussian_wave, separation, d):
        with pytest.raises(ValidationError):
            large_sieve_check(gaussian_wave(0), separation, d)


class TestPersistence:
    def test_roots_persist(self, gaussian_wave):
        params = default_stability_params(12)
        for trial in range(3):
            record = perturbation_persistence(
                gaussian_wave(trial), params, np.random.default_rng(trial)
            )
            assert record.failures == 0
            assert record.perturbation_norm <= params.tau * (1 + 1e-12)

    def test_zero_perturbation(self, cosine_wave):
        params = default_stability_params(4)
        record = perturbation_persistence(cosine_wave, params, np.random.default_rng(0), tau=0.0)
        assert record.failures == 0
        assert record.roots_checked == 2
