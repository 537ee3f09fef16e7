"""Tests for counter-based streams and environment settings."""

import numpy as np
import pytest

from torwave.config import Settings, load_settings
from torwave.errors import ValidationError
from torwave.rng import SEED_LIMIT, check_seed, derive_seed, trial_generator


class TestTrialGenerator:
    def test_reproducible(self):
        first = trial_generator(42, 17).standard_normal(8)
        second = trial_generator(42, 17).standard_normal(8)
        assert np.array_equal(first, second)

    def test_streams_differ(self):
        base = trial_generator(42, 0).standard_normal(8)
        assert not np.array_equal(base, trial_generator(42, 1).standard_normal(8))
        assert not np.array_equal(base, trial_generator(43, 0).standard_normal(8))

    def test_long_draws_do_not_reach_next_trial(self):
        """Word 0 of the counter advances; the trial word stays put."""
        long = trial_generator(5, 0).random(100_000)
        other = trial_generator(5, 1).random(16)
        assert not np.isin(other, long).any()

    @pytest.mark.parametrize("seed", [-1, SEED_LIMIT])
    def test_seed_range(self, seed):
        with pytest.raises(ValidationError):
            check_seed(seed)

    def test_largest_seed(self):
        assert trial_generator(SEED_LIMIT - 1, 0).random() < 1.0

    def test_negative_trial(self):
        with pytest.raises(ValidationError):
            trial_generator(0, -1)


class TestDeriveSeed:
    def test_stable_and_distinct(self):
        assert derive_seed(7, 1) == derive_seed(7, 1)
        assert derive_seed(7, 1) != derive_seed(7, 2)
        assert 0 <= derive_seed(7, 1) < SEED_LIMIT


class TestSettings:
    def test_defaults(self, monkeypatch):
        for name in ("TORWAVE_WORKERS", "TORWAVE_LOG_LEVEL", "TORWAVE_CHUNK_SIZE"):
            monkeypatch.delenv(name, raising=False)
        assert load_settings() == Settings()

    def test_from_env(self, monkeypatch):
        monkeypatch.setenv("TORWAVE_WORKERS", "4")
        monkeypatch.setenv("TORWAVE_LOG_LEVEL", "info")
        monkeypatch.setenv("TORWAVE_CHUNK_SIZE", "32")
        assert load_settings() == Settings(workers=4, log_level="INFO", chunk_size=32)

    @pytest.mark.parametrize("value", ["zero", "0", "-3"])
    def test_bad_workers(self, monkeypatch, value):
        monkeypatch.setenv("TORWAVE_WORKERS", value)
        with pytest.raises(ValidationError):
            load_settings()
