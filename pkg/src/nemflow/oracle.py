"""Slow closed-form references for tests and the ``selftest`` command.

Nothing here calls the FFT-based kernels; the Taylor–Green state is
assembled directly from its eight nonzero Fourier coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .model import FlowState, Params

BRUTEFORCE_MAX_N = 16


@dataclass(frozen=True)
class OracleTolerance:
    abs: float = 1e-12
    rel: float = 1e-10

    def __post_init__(self):
        if not (self.abs > 0 and self.rel > 0):
            raise ConfigurationError("oracle tolerances must be positive")

    def close(self, actual, expected) -> bool:
        actual = np.asarray(actual)
        expected = np.asarray(expected)
        return bool(np.all(np.abs(actual - expected) <= self.abs + self.rel * np.abs(expected)))


def dft_bruteforce(f) -> np.ndarray:
    """Direct double-sum DFT with the mean normalisation of the fast transform."""
    f = np.asarray(f, dtype=float)
    n = f.shape[-1]
    if f.shape[-2:] != (n, n):
        raise ConfigurationError("dft_bruteforce expects a square field")
    if n > BRUTEFORCE_MAX_N:
        raise ConfigurationError(f"dft_bruteforce is limited to n <= {BRUTEFORCE_MAX_N}, got {n}")
    idx = np.arange(n)
    out = np.zeros(f.shape, dtype=complex)
    for k1 in range(n):
        for k2 in range(n):
            phase = np.exp(-2j * np.pi * (k1 * idx[:, None] + k2 * idx[None, :]) / n)
            out[..., k1, k2] = np.sum(f * phase, axis=(-2, -1)) / n ** 2
    return out


def heat_energy_exact(s: float, t, amplitude: float = 1.0, nu: float = 1.0):
    """Continuum squared energy of heat-evolved slope data.

    For ``|u_hat(xi, 0)| = A |xi|^s exp(-|xi|^2)`` on the plane,
    ``int |u_hat(xi, t)|^2 dxi = A^2 pi Gamma(s+1) (2 (1 + nu t))^-(s+1)``.
    """
    if s <= -1:
        raise ConfigurationError(f"slope must exceed -1, got {s!r}")
    t = np.asarray(t, dtype=float)
    return amplitude ** 2 * math.pi * math.gamma(s + 1.0) * (2.0 * (1.0 + nu * t)) ** (-(s + 1.0))


def heat_mode_budget_residual(e0: float, rate: float, h: float, steps: int) -> float:
    """Trapezoid residual of the energy budget for ``E(t) = e0 exp(-rate t)``.

    The dissipation ``-E'`` is integrated with the trapezoid rule on a grid
    of spacing ``h``; after ``steps`` intervals the budget misses by
    ``e0 (1 - r^N) ((rate h / 2) coth(rate h / 2) - 1)`` with ``r = exp(-rate h)``.
    """
    if rate == 0.0:
        return 0.0
    x = 0.5 * rate * h
    return e0 * (1.0 - math.exp(-rate * h * steps)) * (x / math.tanh(x) - 1.0)


def taylor_green_exact(amplitude: float, nu: float, t: float, n: int = 64,
                       length: float = 2.0 * math.pi, lam: float = 1.0,
                       gamma: float = 1.0) -> FlowState:
    """Decaying Taylor–Green vortex with a constant director ``theta = pi/2``.

    ``u = A exp(-2 nu kappa^2 t) (sin kx cos ky, -cos kx sin ky)`` with
    ``kappa = 2 pi / L``; on the ``2 pi`` box the decay factor is ``exp(-2 nu t)``.
    """
    from .spectral import make_grid

    grid = make_grid(n, length)
    kappa = 2.0 * math.pi / length
    a = amplitude * math.exp(-2.0 * nu * kappa ** 2 * t)
    q = a / 4j
    u_hat = np.zeros((2, n, n), dtype=complex)
    for s1 in (1, -1):
        for s2 in (1, -1):
            u_hat[0][s1 % n, s2 % n] = s1 * q
            u_hat[1][s1 % n, s2 % n] = -s2 * q
    theta_hat = np.zeros((n, n), dtype=complex)
    theta_hat[0, 0] = math.pi / 2
    return FlowState(grid, t, u_hat, theta_hat=theta_hat, params=Params(nu, lam, gamma))
