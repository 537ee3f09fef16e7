"""Tests for the acceptance presets that run in seconds."""

import pytest

from torwave.errors import ValidationError
from torwave.presets import PRESETS, PresetOptions, run_preset

EXPECTED = {
    "lattice-exhaustive", "angular", "closed-form", "mean-m25", "mean-m65", "mean-m325",
    "variance-scale", "variance-term", "repulsion", "markov", "concentration",
    "universality", "determinism", "sieve", "perturbation", "exceptional", "grid-oracle",
}


class TestRegistry:
    def test_names(self):
        assert set(PRESETS) == EXPECTED

    def test_unknown(self):
        with pytest.raises(ValidationError):
            run_preset("nope")

    def test_trial_override(self):
        assert PresetOptions(trials=5).scaled(20_000) == 5
        assert PresetOptions().scaled(20_000) == 20_000


class TestFastPresets:
    @pytest.mark.parametrize("name", ["angular", "closed-form", "variance-term"])
    def test_passes(self, name):
        table = run_preset(name)
        assert list(table.columns) == ["preset", "check", "passed", "value", "target"]
        assert table["passed"].all()
        assert (table["preset"] == name).all()

    def test_determinism_small(self):
        table = run_preset("determinism", PresetOptions(trials=80))
        assert table["passed"].all()

    def test_grid_oracle_small(self):
        table = run_preset("grid-oracle", PresetOptions(trials=5, workers=1))
        assert table["passed"].all()

    @pytest.mark.slow
    def test_lattice_exhaustive(self):
        assert run_preset("lattice-exhaustive")["passed"].all()
