import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nemflow.initdata import InitSpec, initial_state
from nemflow.model import Params
from nemflow.spectral import make_grid

settings.register_profile(
    "nemflow", deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile("nemflow")


def random_real(n, seed, components=None):
    rng = np.random.default_rng(seed)
    shape = (n, n) if components is None else (components, n, n)
    return rng.standard_normal(shape)


@pytest.fixture
def grid32():
    return make_grid(32, 2 * math.pi)


@pytest.fixture
def small_state():
    """Smooth nonlinear state on a small box, angle mode."""
    g = make_grid(32, 16.0)
    spec = InitSpec(amplitude=4.0, slope=0.0, seed=3, eps0=0.1, director_amplitude=0.8)
    return initial_state(g, Params(), spec)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
