"""Named reference configurations shared by the CLI examples and the test suites."""

from __future__ import annotations

import math

from .config import RunConfig, parse_config

STANDARD = """\
# generic run: slope-0 velocity plus a director bump, eps0 = 0.1
grid.n = 128
grid.length = 32
init.family = spectral_slope
init.amplitude = 20
init.slope = 0
init.seed = 7
init.eps0 = 0.1
init.director_amplitude = 1.2
step.dt = 0.0025
step.t_end = 10
step.sample_interval = 0.01
step.mode = angle
diag.inequalities = weighted_energy, heat_weighted, time_weighted, pointwise
diag.heat_stride = 10
fit.t_lo = 1
fit.t_hi = 10
output.dir = out/standard
"""

TAYLOR_GREEN = f"""\
# exact Navier-Stokes decay, lowest mode of a 4 pi box
grid.n = 32
grid.length = {4 * math.pi!r}
init.family = taylor_green
init.amplitude = 1
step.dt = 0.01
step.t_end = 8
step.sample_interval = 0.01
fit.t_lo = 1
fit.t_hi = 7.5
output.dir = out/taylor_green
"""

ZERO = """\
# nothing moves
grid.n = 16
grid.length = 32
init.amplitude = 0
init.director_amplitude = 0
step.cfl = 0.5
step.t_end = 2
step.sample_interval = 0.1
diag.inequalities = weighted_energy, heat_weighted, time_weighted, pointwise
fit.t_lo = 1
fit.t_hi = 2
output.dir = out/zero
"""

LARGE_BOX = """\
# large box for decay rates; window [5, 50] sits well before saturation
grid.n = 256
grid.length = 256
init.family = spectral_slope
init.amplitude = 100
init.slope = 0
init.seed = 7
init.eps0 = 0.1
init.director_amplitude = 1.2
step.cfl = 0.5
step.t_end = 50
step.sample_interval = 0.5
# trapezoid error of the budget at a 0.5 cadence is a few percent
diag.budget_tol = 0.05
fit.t_lo = 5
fit.t_hi = 50
output.dir = out/large_box
"""


def standard() -> RunConfig:
    return parse_config(STANDARD)


def taylor_green() -> RunConfig:
    return parse_config(TAYLOR_GREEN)


def zero() -> RunConfig:
    return parse_config(ZERO)


def large_box(nonlinear: bool = True, slope: float = 0.0) -> RunConfig:
    """Large-box run; the linear variant keeps the director flat."""
    text = LARGE_BOX.replace("init.slope = 0", f"init.slope = {slope!r}")
    if not nonlinear:
        text = text.replace("init.director_amplitude = 1.2", "init.director_amplitude = 0")
        text = text.replace("init.amplitude = 100", "init.amplitude = 20")
        text += "step.nonlinear = false\n"
        text += f"fit.target = {slope + 1.0!r}\n"
    return parse_config(text)


CAMPAIGN_SEEDS = (1, 2, 3)
CAMPAIGN_DIRECTOR_AMPLITUDES = (0.6, 1.2, 1.4)


def standard_campaign() -> list:
    """Seeds times director amplitudes on the standard box, adaptive steps."""
    configs = []
    for seed in CAMPAIGN_SEEDS:
        for amp in CAMPAIGN_DIRECTOR_AMPLITUDES:
            text = (STANDARD
                    .replace("init.seed = 7", f"init.seed = {seed}")
                    .replace("init.director_amplitude = 1.2", f"init.director_amplitude = {amp!r}")
                    .replace("step.dt = 0.0025", "step.cfl = 0.5")
                    .replace("step.sample_interval = 0.01", "step.sample_interval = 0.1")
                    .replace("diag.inequalities = weighted_energy, heat_weighted, time_weighted, pointwise",
                             "diag.inequalities = none")
                    .replace("output.dir = out/standard", f"output.dir = out/campaign/s{seed}_a{amp:g}")
                    # trapezoid error of the budget at a 0.1 cadence is about 2e-3
                    + "diag.budget_tol = 0.01\n")
            configs.append(parse_config(text))
    return configs


__all__ = [
    "STANDARD", "TAYLOR_GREEN", "ZERO", "LARGE_BOX", "standard", "taylor_green", "zero",
    "large_box", "standard_campaign",
]
