"""Integrating-factor Heun stepping and trajectory sampling.

With ``E = exp(-Lambda dt)`` (``Lambda = nu |xi|^2`` for the velocity,
``gamma |xi|^2`` for the director) and ``N`` the nonlinear tendency, one
step reads::

    y*    = E (y + dt N(y))
    y_new = E y + dt/2 (E N(y) + N(y*))

which is second order, and exact whenever ``N`` vanishes.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import spectral as sp
from .errors import BlowUpError, ConfigurationError, DegeneracyError
from .model import ANGLE, MODES, EnergyReport, FlowState, energy_report, tendencies

EPS_FLOOR = 1e-8
DEFAULT_MAX_DT = 0.1
_TIME_SNAP = 1e-9


@dataclass(frozen=True)
class StepPolicy:
    """Either a fixed ``dt`` or a Courant number ``cfl`` (capped by ``max_dt``)."""

    t_end: float
    sample_interval: float
    dt: float | None = None
    cfl: float | None = None
    mode: str = ANGLE
    max_dt: float = DEFAULT_MAX_DT
    nonlinear: bool = True

    def __post_init__(self):
        if self.dt is None and self.cfl is None:
            raise ConfigurationError("step policy needs dt or cfl")
        if self.dt is not None and not self.dt > 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt!r}")
        if self.cfl is not None and not 0 < self.cfl <= 1:
            raise ConfigurationError(f"cfl must lie in (0, 1], got {self.cfl!r}")
        if not self.sample_interval > 0:
            raise ConfigurationError("sample_interval must be positive")
        if not self.t_end >= 0:
            raise ConfigurationError("t_end must be nonnegative")
        if not self.max_dt > 0:
            raise ConfigurationError("max_dt must be positive")
        if self.mode not in MODES:
            raise ConfigurationError(f"unknown director mode {self.mode!r}")


@dataclass
class Sample:
    t: float
    report: EnergyReport
    state: FlowState | None = None
    probes: dict = field(default_factory=dict)


@dataclass
class Trajectory:
    """Samples in increasing time; the first one is the initial state."""

    samples: list = field(default_factory=list)
    steps: int = 0
    grid: object = None
    params: object = None
    nonlinear: bool = True

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def reports(self) -> list:
        return [s.report for s in self.samples]

    def series(self, name: str) -> np.ndarray:
        return np.array([getattr(s.report, name) for s in self.samples])

    def probe(self, name: str) -> list:
        return [s.probes[name] for s in self.samples]

    def __len__(self):
        return len(self.samples)


def stable_dt(state: FlowState, cfl: float) -> float:
    """Advective limit ``cfl dx / max(|u|_inf, 1e-8)``; diffusion is exact."""
    umax = float(np.max(np.abs(state.velocity())))
    return cfl * state.grid.dx / max(umax, EPS_FLOOR)


def renormalize_director(d) -> np.ndarray:
    """Pointwise ``d / |d|``; refuses fields that come close to vanishing."""
    d = np.asarray(d, dtype=float)
    norm = np.sqrt(d[0] ** 2 + d[1] ** 2)
    if np.min(norm) < 0.5:
        raise DegeneracyError(f"director magnitude fell to {np.min(norm):.3e} (under-resolved)")
    return d / norm


@functools.lru_cache(maxsize=16)
def _factors(grid, nu, gamma, dt):
    return np.exp(-nu * grid.xi2 * dt), np.exp(-gamma * grid.xi2 * dt)


def _uncoupled_vector_step(grid, params, d_hat, ed, dt):
    def rhs(dh):
        gd = sp.to_physical(sp.gradient(grid, dh))
        g2 = np.sum(gd ** 2, axis=(0, 1))
        return sp.to_spectral(params.gamma * g2 * sp.to_physical(dh)) * grid.dealias_mask

    n0 = rhs(d_hat)
    d1 = ed * (d_hat + dt * n0)
    return ed * d_hat + 0.5 * dt * (ed * n0 + rhs(d1))


def _advance(grid, params, mode, u_hat, dir_hat, dt, nonlinear):
    eu, ed = _factors(grid, params.nu, params.gamma, dt)
    if not nonlinear:
        if mode == ANGLE:
            return eu * u_hat, ed * dir_hat
        return eu * u_hat, _uncoupled_vector_step(grid, params, dir_hat, ed, dt)
    nu0, nd0 = tendencies(grid, params, u_hat, dir_hat, mode)
    u1 = eu * (u_hat + dt * nu0)
    d1 = ed * (dir_hat + dt * nd0)
    nu1, nd1 = tendencies(grid, params, u1, d1, mode)
    u_new = eu * u_hat + 0.5 * dt * (eu * nu0 + nu1)
    d_new = ed * dir_hat + 0.5 * dt * (ed * nd0 + nd1)
    return u_new, d_new


def step(state: FlowState, dt: float, nonlinear: bool = True) -> FlowState:
    """Advance one step of size ``dt``; vector mode renormalises ``d`` afterwards.

    With ``nonlinear=False`` advection and elastic forcing are dropped: the
    velocity follows the heat equation and the director the uncoupled
    harmonic map flow (pure diffusion of the angle in angle mode).
    """
    if not dt > 0:
        raise ConfigurationError(f"dt must be positive, got {dt!r}")
    limit = stable_dt(state, 1.0)
    if nonlinear and dt > limit * (1 + 1e-12):
        raise ConfigurationError(f"dt = {dt:.3e} exceeds the advective limit {limit:.3e}")
    g = state.grid
    u_new, dir_new = _advance(g, state.params, state.mode, state.u_hat,
                              state.director_hat, dt, nonlinear)
    if not (np.all(np.isfinite(u_new)) and np.all(np.isfinite(dir_new))):
        raise BlowUpError(f"non-finite values after step from t = {state.t}", state.t)
    t_new = state.t + dt
    if state.mode == ANGLE:
        return FlowState(g, t_new, u_new, theta_hat=dir_new, params=state.params)
    d = renormalize_director(sp.to_physical(dir_new))
    return FlowState(g, t_new, u_new, d=d, params=state.params)


def _sample(state, keep_state, probes):
    values = {name: fn(state) for name, fn in (probes or {}).items()}
    return Sample(state.t, energy_report(state), state if keep_state else None, values)


def evolve(state: FlowState, policy: StepPolicy,
           sink: Callable[[Sample], None] | None = None,
           probes: dict | None = None, keep_states: bool = False) -> Trajectory:
    """Integrate to ``policy.t_end`` and sample every ``sample_interval``.

    Steps are shortened so that each sample lands exactly on
    ``k * sample_interval`` (and on ``t_end``).  ``probes`` maps names to
    callables evaluated on the state at each sample; ``sink`` receives
    each finished :class:`Sample`.  On blow-up the partial trajectory is
    attached to the raised :class:`BlowUpError`.
    """
    if state.mode != policy.mode:
        raise ConfigurationError(f"state is in {state.mode} mode but the policy asks for {policy.mode}")
    traj = Trajectory(grid=state.grid, params=state.params, nonlinear=policy.nonlinear)

    def record(s):
        sample = _sample(s, keep_states, probes)
        traj.samples.append(sample)
        if sink is not None:
            sink(sample)

    record(state)
    n_samples = math.floor(policy.t_end / policy.sample_interval + _TIME_SNAP)
    targets = [k * policy.sample_interval for k in range(1, n_samples + 1)]
    if not targets or policy.t_end - targets[-1] > _TIME_SNAP * max(1.0, policy.t_end):
        if policy.t_end > 0:
            targets.append(policy.t_end)
    current = state
    try:
        for target in targets:
            while target - current.t > _TIME_SNAP * max(1.0, target):
                if policy.dt is not None:
                    h = policy.dt
                else:
                    h = min(stable_dt(current, policy.cfl), policy.max_dt)
                remaining = target - current.t
                nsub = max(1, math.ceil(remaining / h - _TIME_SNAP))
                h = remaining / nsub
                for _ in range(nsub):
                    current = step(current, h, policy.nonlinear)
                    traj.steps += 1
                    if policy.dt is None:
                        break
            current = current.replace(t=target)
            record(current)
    except BlowUpError as exc:
        exc.trajectory = traj
        raise
    return traj


__all__ = [
    "StepPolicy", "Sample", "Trajectory", "stable_dt", "renormalize_director", "step",
    "evolve", "EPS_FLOOR", "DEFAULT_MAX_DT",
]
