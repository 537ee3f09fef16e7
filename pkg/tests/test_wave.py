"""Tests for random waves and their restriction to curves."""

import math

import numpy as np
import pytest

from torwave.curve import curve_eval
from torwave.errors import ValidationError
from torwave.lattice import enumerate_lattice_points
from torwave.rng import trial_generator
from torwave.wave import (
    CoefficientEnsemble,
    RestrictedWave,
    WaveSample,
    batch_eval,
    complex_coefficients,
    derivative_bounds,
    eval_restricted,
    eval_torus,
    eval_torus_complex,
    parse_ensemble,
    perturb,
    restriction_ratio,
    sample_coefficients,
    sample_dump,
    sample_from_dump,
    sample_from_mapping,
)


class TestSampling:
    def test_deterministic(self, spec25):
        first = sample_coefficients(spec25, CoefficientEnsemble.GAUSSIAN, 42, 7)
        second = sample_coefficients(spec25, CoefficientEnsemble.GAUSSIAN, 42, 7)
        assert np.array_equal(first.a, second.a)
        assert np.array_equal(first.b, second.b)
        assert first.a.shape == first.b.shape == (6,)

    def test_trials_differ(self, spec25):
        first = sample_coefficients(spec25, CoefficientEnsemble.GAUSSIAN, 42, 0)
        second = sample_coefficients(spec25, CoefficientEnsemble.GAUSSIAN, 42, 1)
        assert not np.array_equal(first.a, second.a)

    def test_ensemble_supports(self, spec25):
        rade = sample_coefficients(spec25, CoefficientEnsemble.RADEMACHER, 1, 0)
        assert set(np.abs(np.concatenate([rade.a, rade.b]))) == {1.0}
        uni = sample_coefficients(spec25, CoefficientEnsemble.UNIFORM, 1, 0)
        assert np.all(np.abs(np.concatenate([uni.a, uni.b])) <= math.sqrt(3.0))

    @pytest.mark.parametrize("ensemble", list(CoefficientEnsemble))
    def test_unit_variance(self, ensemble):
        draws = ensemble.draw(trial_generator(5, 0), 200_000)
        assert abs(draws.mean()) < 0.01
        assert draws.var() == pytest.approx(1.0, abs=0.02)

    def test_needs_four_points(self):
        with pytest.raises(ValidationError):
            sample_coefficients(enumerate_lattice_points(3), CoefficientEnsemble.GAUSSIAN, 0, 0)

    def test_parse_ensemble(self):
        assert parse_ensemble(" Rademacher ") is CoefficientEnsemble.RADEMACHER
        with pytest.raises(ValidationError):
            parse_ensemble("cauchy")

    def test_mapping_rejects_lower_half(self):
        with pytest.raises(ValidationError):
            sample_from_mapping(enumerate_lattice_points(1), {(-1, 0): 1.0})


class TestTorus:
    def test_unit_variance_at_a_point(self, spec25):
        values = [
            eval_torus(sample_coefficients(spec25, CoefficientEnsemble.GAUSSIAN, 9, i), [0.1, 0.7])
            for i in range(4000)
        ]
        assert np.var(values) == pytest.approx(1.0, abs=0.1)

    def test_complex_form_agrees(self, spec25):
        sample = sample_coefficients(spec25, CoefficientEnsemble.GAUSSIAN, 3, 2)
        for x in ([0.0, 0.0], [0.31, 0.77], [0.9, 0.05]):
            value = eval_torus_complex(sample, x)
            assert value.real == pytest.approx(eval_torus(sample, x), abs=1e-12)
            assert abs(value.imag) <= 1e-12

    def test_conjugate_symmetry(self, spec25):
        sample = sample_coefficients(spec25, CoefficientEnsemble.GAUSSIAN, 3, 2)
        points, eps = complex_coefficients(sample)
        lookup = {tuple(p): e for p, e in zip(points, eps)}
        for (a, b), e in lookup.items():
            assert lookup[(-a, -b)] == np.conj(e)

    def test_periodic(self, spec25):
        sample = sample_coefficients(spec25, CoefficientEnsemble.GAUSSIAN, 3, 2)
        assert eval_torus(sample, [1.2, -0.3]) == pytest.approx(
            eval_torus(sample, [0.2, 0.7]), abs=1e-12
        )


class TestRestriction:
    def test_closed_form_values(self, cosine_wave):
        assert eval_restricted(cosine_wave, 0.25) == pytest.approx(0.0, abs=1e-15)
        assert abs(eval_restricted(cosine_wave, 0.25, 1)) == pytest.approx(
            math.pi * math.sqrt(2.0), abs=1e-12
        )
        expected = math.sqrt(0.5) * math.cos(2 * math.pi * (0.25 + 1 / (2 * math.pi)))
        assert eval_restricted(cosine_wave, 0.0) == pytest.approx(expected, abs=1e-14)

    def test_batch_matches_pointwise(self, gaussian_wave):
        rw = gaussian_wave(3)
        t = np.random.default_rng(0).random(50)
        batch = batch_eval(rw, t, 0)
        single = np.array([eval_restricted(rw, v, 0) for v in t])
        assert np.max(np.abs(batch - single)) <= 1e-12

    @pytest.mark.parametrize("order", [1, 2])
    def test_derivatives_match_difference_quotients(self, gaussian_wave, order):
        rw = gaussian_wave(1)
        t = np.array([0.1, 0.45, 0.8])
        h = 1e-6
        approx = (batch_eval(rw, t + h, order - 1) - batch_eval(rw, t - h, order - 1)) / (2 * h)
        scale = rw.lam**order
        assert np.allclose(batch_eval(rw, t, order), approx, atol=1e-5 * scale)

    def test_oval_derivative(self, spec25, oval):
        sample = sample_coefficients(spec25, CoefficientEnsemble.GAUSSIAN, 11, 0)
        rw = RestrictedWave(sample, oval)
        t = np.array([0.2, 0.7])
        h = 1e-6
        approx = (batch_eval(rw, t + h) - batch_eval(rw, t - h)) / (2 * h)
        assert np.allclose(batch_eval(rw, t, 1), approx, atol=1e-4 * rw.lam)

    def test_rejects_parameters_outside_unit_interval(self, gaussian_wave):
        with pytest.raises(ValidationError):
            batch_eval(gaussian_wave(), [0.5, 1.5])

    def test_derivative_bounds_hold(self, gaussian_wave):
        rw = gaussian_wave(4)
        lip1, lip2 = derivative_bounds(rw)
        t = np.linspace(0.0, 1.0, 4001)
        assert np.max(np.abs(batch_eval(rw, t, 1))) <= lip1
        assert np.max(np.abs(batch_eval(rw, t, 2))) <= lip2

    def test_restriction_ratio(self, gaussian_wave):
        ratio = restriction_ratio(gaussian_wave(2))
        assert math.isfinite(ratio) and ratio > 0.0

    def test_restriction_ratio_zero_function(self, circle):
        zero = sample_from_mapping(enumerate_lattice_points(25), {})
        with pytest.raises(ValidationError):
            restriction_ratio(RestrictedWave(zero, circle))


class TestRestrictedMoments:
    """Pointwise moments of f and f' over 20000 coefficient draws."""

    TRIALS = 20_000
    POINTS = np.array([0.0, 0.37, 0.81])

    def _values(self, spec, curve, ensemble):
        # f is linear in (a, b): evaluate each basis coefficient once
        half = len(spec.half_points)
        basis = np.eye(2 * half)
        f_basis = np.empty((2 * half, self.POINTS.size))
        df_basis = np.empty_like(f_basis)
        for j, row in enumerate(basis):
            unit = WaveSample(spec=spec, a=row[:half], b=row[half:])
            rw = RestrictedWave(unit, curve)
            f_basis[j] = batch_eval(rw, self.POINTS, 0)
            df_basis[j] = batch_eval(rw, self.POINTS, 1)
        draws = ensemble.draw(trial_generator(2024, 0), (self.TRIALS, 2 * half))
        return draws @ f_basis, draws @ df_basis

    @pytest.mark.parametrize("ensemble", list(CoefficientEnsemble))
    @pytest.mark.parametrize("curve_name", ["circle", "oval"])
    def test_derivative_variance_and_orthogonality(
        self, request, spec25, ensemble, curve_name
    ):
        curve = request.getfixturevalue(curve_name)
        f, df = self._values(spec25, curve, ensemble)
        speed2 = np.sum(curve_eval(curve, self.POINTS, 1) ** 2, axis=-1)
        target = 2 * math.pi**2 * spec25.m * speed2
        n = self.TRIALS

        sq = df**2
        assert np.all(np.abs(sq.mean(axis=0) - target) <= 4 * sq.std(axis=0) / math.sqrt(n))

        cross = f * df
        assert np.all(np.abs(cross.mean(axis=0)) <= 4 * cross.std(axis=0) / math.sqrt(n))

        sq0 = f**2
        assert np.all(np.abs(sq0.mean(axis=0) - 1.0) <= 4 * sq0.std(axis=0) / math.sqrt(n))


class TestPerturb:
    def test_norm_bounded(self, spec25):
        sample = sample_coefficients(spec25, CoefficientEnsemble.GAUSSIAN, 1, 0)
        rng = np.random.default_rng(3)
        for _ in range(20):
            moved, g = perturb(sample, 1e-3, rng)
            assert g.l2_norm() <= 1e-3 * (1 + 1e-12)
            assert np.allclose(moved.a - sample.a, g.a)

    def test_zero_tau(self, spec25):
        sample = sample_coefficients(spec25, CoefficientEnsemble.GAUSSIAN, 1, 0)
        moved, g = perturb(sample, 0.0, np.random.default_rng(0))
        assert g.is_zero()
        assert np.array_equal(moved.a, sample.a)

    def test_negative_tau(self, spec25):
        sample = sample_coefficients(spec25, CoefficientEnsemble.GAUSSIAN, 1, 0)
        with pytest.raises(ValidationError):
            perturb(sample, -1.0, np.random.default_rng(0))


class TestDump:
    def test_round_trip(self, spec25):
        sample = sample_coefficients(spec25, CoefficientEnsemble.GAUSSIAN, 8, 5)
        restored = sample_from_dump(sample_dump(sample))
        assert np.array_equal(restored.a, sample.a)
        assert restored.trial_index == 5

    def test_wrong_size(self, spec25):
        data = sample_dump(sample_coefficients(spec25, CoefficientEnsemble.GAUSSIAN, 8, 5))
        data["a"] = data["a"][:-1]
        with pytest.raises(ValidationError):
            sample_from_dump(data)
