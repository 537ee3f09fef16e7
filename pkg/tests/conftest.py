import pytest

from torwave.curve import make_analytic_oval, make_circle
from torwave.lattice import enumerate_lattice_points
from torwave.wave import (
    CoefficientEnsemble,
    RestrictedWave,
    sample_coefficients,
    sample_from_mapping,
)


@pytest.fixture
def circle():
    return make_circle((0.5, 0.5))


@pytest.fixture
def oval():
    return make_analytic_oval(2.0, 1.0, (0.5, 0.5))


@pytest.fixture
def spec25():
    return enumerate_lattice_points(25)


@pytest.fixture
def cosine_wave():
    """f(t) = sqrt(1/2) cos(2 pi (1/4 + cos(2 pi t) / (2 pi))) on the circle at (1/4, 1/2)."""
    sample = sample_from_mapping(enumerate_lattice_points(1), {(1, 0): 1.0})
    return RestrictedWave(sample, make_circle((0.25, 0.5)))


@pytest.fixture
def gaussian_wave(spec25, circle):
    def build(trial: int = 0, seed: int = 1234) -> RestrictedWave:
        sample = sample_coefficients(spec25, CoefficientEnsemble.GAUSSIAN, seed, trial)
        return RestrictedWave(sample, circle)

    return build
