"""Seeded initial data.

Random phases come from ``splitmix64-v1``: the SplitMix64 sequence of
Steele, Lea and Flood evaluated in counter form.  Output ``i`` for seed
``s`` is ``mix(s + (i + 1) * 0x9E3779B97F4A7C15)`` in wrapping 64-bit
arithmetic, with the standard finaliser ``mix``.  The counter of mode
``(k1, k2)`` is ``zigzag(k1) << 32 | zigzag(k2)``, so a given wavevector
index receives the same phase at every grid size.  A phase is
``2 pi (x >> 11) 2^-53``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import spectral as sp
from .errors import ConfigurationError
from .model import ANGLE, MODES, FlowState, Params, director_from_angle

RNG_NAME = "splitmix64-v1"
FAMILIES = ("taylor_green", "spectral_slope", "vortex_pair")

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_DIRECTOR_SALT = 0xD1B54A32D192ED03
_MASK64 = (1 << 64) - 1


def splitmix64(seed: int, counters) -> np.ndarray:
    """Outputs ``counters`` (array of uint64) of the SplitMix64 stream ``seed``."""
    c = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & _MASK64) + (c + np.uint64(1)) * _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _zigzag(k):
    k = np.asarray(k, dtype=np.int64)
    return np.where(k >= 0, 2 * k, -2 * k - 1).astype(np.uint64)


def mode_phases(grid: sp.SpectralGrid, seed: int) -> np.ndarray:
    """Conjugate-odd phase per mode: ``phi(-k) = -phi(k)``, zero at k = 0."""
    k1, k2 = grid.k
    upper = (k1 > 0) | ((k1 == 0) & (k2 > 0))
    sign = np.where(upper, 1.0, -1.0)
    c1 = np.where(upper, k1, -k1)
    c2 = np.where(upper, k2, -k2)
    counter = (_zigzag(c1) << np.uint64(32)) | _zigzag(c2)
    bits = splitmix64(seed, counter) >> np.uint64(11)
    phase = 2.0 * np.pi * bits.astype(np.float64) * 2.0 ** -53
    phase = sign * phase
    phase[0, 0] = 0.0
    return phase


@dataclass(frozen=True)
class InitSpec:
    family: str = "spectral_slope"
    amplitude: float = 1.0
    slope: float = 0.0
    seed: int = 0
    eps0: float = 0.1
    director_amplitude: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(f"unknown initial data family {self.family!r}")
        if not np.isfinite(self.amplitude):
            raise ConfigurationError("amplitude must be finite")
        if not -1.0 < self.slope <= 2.0:
            raise ConfigurationError(f"slope must lie in (-1, 2], got {self.slope!r}")
        if not 0 <= int(self.seed) <= _MASK64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer")
        if not 0.0 < self.eps0 < 1.0:
            raise ConfigurationError(f"eps0 must lie in (0, 1), got {self.eps0!r}")
        check_director_guard(self.eps0, self.director_amplitude)


def check_director_guard(eps0: float, director_amplitude: float):
    limit = math.pi / 2 - math.asin(eps0)
    if not 0.0 <= director_amplitude < limit:
        raise ConfigurationError(
            f"director_amplitude must lie in [0, {limit:.6g}) for eps0 = {eps0}, "
            f"got {director_amplitude!r}")


def taylor_green(grid: sp.SpectralGrid, amplitude: float, params: Params = Params(),
                 mode: str = ANGLE) -> FlowState:
    """``A (sin kx cos ky, -cos kx sin ky)`` with ``k = 2 pi / L`` and ``d = (0, 1)``."""
    u_hat = _taylor_green_velocity(grid, amplitude)
    return _assemble(grid, params, u_hat, np.full(grid.shape, math.pi / 2), mode)


def _taylor_green_velocity(grid, amplitude):
    x, y = grid.coords()
    kappa = grid.dxi
    u = amplitude * np.stack([np.sin(kappa * x) * np.cos(kappa * y),
                              -np.cos(kappa * x) * np.sin(kappa * y)])
    return sp.leray_project(grid, sp.forward_transform(grid, u))


def spectral_slope_field(grid: sp.SpectralGrid, s: float, seed: int, amplitude: float) -> np.ndarray:
    """Solenoidal velocity with ``|u_hat(xi)| ~ amplitude |xi|^s exp(-|xi|^2)``.

    ``amplitude`` refers to the continuum transform, so the box energy
    approximates ``int A^2 |xi|^(2s) exp(-2 |xi|^2) dxi`` whatever ``L`` is.
    Built from a stream function: ``u_hat = i (-xi_2, xi_1) / |xi| * m e^{i phi}``.
    """
    if not -1.0 < s <= 2.0:
        raise ConfigurationError(f"slope must lie in (-1, 2], got {s!r}")
    xi2 = grid.xi2
    r = np.sqrt(xi2)
    safe = np.where(r == 0.0, 1.0, r)
    mag = (2.0 * np.pi / grid.length ** 2) * amplitude * safe ** s * np.exp(-xi2)
    mag = np.where((r == 0.0) | grid.nyquist, 0.0, mag) * grid.dealias_mask
    carrier = mag * np.exp(1j * mode_phases(grid, seed)) / safe
    u_hat = 1j * np.stack([-grid.xi[1] * carrier, grid.xi[0] * carrier])
    return sp.leray_project(grid, u_hat)


def slope_field_energy(grid: sp.SpectralGrid, s: float, amplitude: float) -> float:
    """Energy of :func:`spectral_slope_field` as an explicit shell sum."""
    keep = grid.dealias_mask & ~grid.nyquist & (grid.xi2 > 0)
    xi2 = grid.xi2[keep]
    return float(amplitude ** 2 * np.sum(xi2 ** s * np.exp(-2.0 * xi2)) * grid.dxi ** 2)


def vortex_pair(grid: sp.SpectralGrid, amplitude: float, radius: float = 1.0) -> np.ndarray:
    """Counter-rotating Gaussian vortices a quarter box apart, spectral velocity."""
    x, y = grid.coords()
    L = grid.length
    omega = np.zeros(grid.shape)
    for cx, sign in ((0.375 * L, 1.0), (0.625 * L, -1.0)):
        dx = (x - cx + L / 2) % L - L / 2
        dy = y - L / 2
        omega += sign * np.exp(-(dx ** 2 + dy ** 2) / radius ** 2)
    w_hat = sp.forward_transform(grid, amplitude * omega)
    w_hat[0, 0] = 0.0
    xi2 = np.where(grid.xi2 == 0.0, 1.0, grid.xi2)
    psi_hat = w_hat / xi2
    u_hat = np.stack([1j * grid.xi[1] * psi_hat, -1j * grid.xi[0] * psi_hat])
    return sp.leray_project(grid, sp.dealias(grid, u_hat))


def director_bump(grid: sp.SpectralGrid, eps0: float, director_amplitude: float,
                  seed: int) -> np.ndarray:
    """Angle field ``pi/2 + a p`` with ``p`` smooth, zero mean and ``max |p| = 1``.

    ``p`` carries seeded phases on modes with ``|k| <= n/8`` under a
    Gaussian envelope, so ``d_2 = sin(theta) >= cos(a) > eps0``.
    """
    check_director_guard(eps0, director_amplitude)
    base = np.full(grid.shape, math.pi / 2)
    if director_amplitude == 0.0:
        return base
    k1, k2 = grid.k
    band = (k1 ** 2 + k2 ** 2 <= (grid.n / 8) ** 2) & ~grid.nyquist
    env = np.where(band, np.exp(-grid.xi2), 0.0)
    env[0, 0] = 0.0
    p = sp.to_physical(env * np.exp(1j * mode_phases(grid, seed ^ _DIRECTOR_SALT)))
    peak = np.max(np.abs(p))
    if peak == 0.0:
        return base
    p = p - np.mean(p)
    p /= np.max(np.abs(p))
    return base + director_amplitude * p


def lp_norm_estimate(grid: sp.SpectralGrid, field, p: float) -> float:
    """Grid quadrature ``(sum |f|^p dx^2)^(1/p)``; vector fields use ``|f|`` pointwise."""
    if not p >= 1:
        raise ConfigurationError(f"p must be at least 1, got {p!r}")
    f = np.asarray(field, dtype=float)
    mag = np.sqrt(np.sum(f ** 2, axis=0)) if f.ndim == 3 else np.abs(f)
    return float((np.sum(mag ** p) * grid.dx ** 2) ** (1.0 / p))


def _assemble(grid, params, u_hat, theta, mode) -> FlowState:
    if mode not in MODES:
        raise ConfigurationError(f"unknown director mode {mode!r}")
    if mode == ANGLE:
        return FlowState(grid, 0.0, u_hat, theta_hat=sp.to_spectral(theta), params=params)
    return FlowState(grid, 0.0, u_hat, d=director_from_angle(theta), params=params)


def initial_state(grid: sp.SpectralGrid, params: Params, spec: InitSpec,
                  mode: str = ANGLE) -> FlowState:
    """Velocity of the requested family plus a seeded director bump."""
    if spec.family == "taylor_green":
        u_hat = _taylor_green_velocity(grid, spec.amplitude)
    elif spec.family == "spectral_slope":
        u_hat = spectral_slope_field(grid, spec.slope, spec.seed, spec.amplitude)
    else:
        u_hat = vortex_pair(grid, spec.amplitude)
    theta = director_bump(grid, spec.eps0, spec.director_amplitude, spec.seed)
    return _assemble(grid, params, u_hat, theta, mode)


__all__ = [
    "RNG_NAME", "FAMILIES", "InitSpec", "splitmix64", "mode_phases", "taylor_green",
    "spectral_slope_field", "slope_field_energy", "vortex_pair", "director_bump",
    "lp_norm_estimate", "initial_state", "check_director_guard",
]
