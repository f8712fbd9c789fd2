"""Nematic flow state, nonlinear tendencies and energy functionals.

The system integrated is

    u_t + P div(u (x) u) + lam P div(grad d . grad d) = nu Lap u,
    d_t + u . grad d = gamma (Lap d + |grad d|^2 d),   |d| = 1,

with ``P`` the Leray projector.  Two director formulations exist:

* ``angle``: ``d = (cos theta, sin theta)``.  Because
  ``Lap d + |grad d|^2 d = (Lap theta) d_perp`` the director equation
  becomes ``theta_t + u . grad theta = gamma Lap theta`` and ``|d| = 1``
  holds identically.
* ``vector``: ``d`` stored as two real fields, renormalised after every
  step by the integrator.

The stiff diffusion terms are never part of the tendencies here; the
integrator applies them exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import spectral as sp
from .errors import ConfigurationError

ANGLE = "angle"
VECTOR = "vector"
MODES = (ANGLE, VECTOR)

DIVERGENCE_TOL = 1e-10
UNIT_TOL = 1e-6


@dataclass(frozen=True)
class Params:
    """Viscosity ``nu``, elastic coupling ``lam`` and relaxation ``gamma``."""

    nu: float = 1.0
    lam: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        for name in ("nu", "lam", "gamma"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ConfigurationError(f"parameter {name} must be positive, got {v!r}")


def _readonly(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FlowState:
    """Immutable snapshot: time, spectral velocity and the director.

    Exactly one of ``theta_hat`` (spectral angle, angle mode) and ``d``
    (physical unit vector field of shape ``(2, n, n)``, vector mode)
    is set.
    """

    grid: sp.SpectralGrid
    t: float
    u_hat: np.ndarray
    theta_hat: np.ndarray | None = None
    d: np.ndarray | None = None
    params: Params = field(default_factory=Params)

    def __post_init__(self):
        g = self.grid
        if (self.theta_hat is None) == (self.d is None):
            raise ConfigurationError("exactly one of theta_hat and d must be given")
        if not self.t >= 0:
            raise ConfigurationError(f"time must be nonnegative, got {self.t!r}")
        object.__setattr__(self, "t", float(self.t))
        u_hat = _readonly(self.u_hat, complex)
        if u_hat.shape != (2,) + g.shape:
            raise ConfigurationError(f"u_hat must have shape (2, {g.n}, {g.n})")
        object.__setattr__(self, "u_hat", u_hat)
        scale = np.max(np.abs(u_hat))
        if scale > 0:
            div = np.max(np.abs(g.xi[0] * u_hat[0] + g.xi[1] * u_hat[1]))
            if div > DIVERGENCE_TOL * scale * max(1.0, np.max(np.abs(g.xi))):
                raise ConfigurationError(f"velocity is not divergence free (|xi.u| = {div:.3e})")
        if self.theta_hat is not None:
            th = _readonly(self.theta_hat, complex)
            if th.shape != g.shape:
                raise ConfigurationError(f"theta_hat must have shape ({g.n}, {g.n})")
            object.__setattr__(self, "theta_hat", th)
        else:
            d = _readonly(self.d, float)
            if d.shape != (2,) + g.shape:
                raise ConfigurationError(f"d must have shape (2, {g.n}, {g.n})")
            drift = np.max(np.abs(d[0] ** 2 + d[1] ** 2 - 1.0))
            if drift > UNIT_TOL:
                raise ConfigurationError(f"director is not unit length (max drift {drift:.3e})")
            object.__setattr__(self, "d", d)

    @property
    def mode(self) -> str:
        return ANGLE if self.theta_hat is not None else VECTOR

    @property
    def director_hat(self) -> np.ndarray:
        """Spectral director variable the integrator evolves."""
        return self.theta_hat if self.mode == ANGLE else sp.to_spectral(self.d)

    def velocity(self) -> np.ndarray:
        return sp.to_physical(self.u_hat)

    def director(self) -> np.ndarray:
        """Physical unit director field, shape ``(2, n, n)``."""
        if self.mode == ANGLE:
            return director_from_angle(sp.to_physical(self.theta_hat))
        return np.array(self.d)

    def replace(self, **changes) -> "FlowState":
        kw = dict(grid=self.grid, t=self.t, u_hat=self.u_hat, theta_hat=self.theta_hat,
                  d=self.d, params=self.params)
        kw.update(changes)
        return FlowState(**kw)


def to_vector_mode(state: FlowState) -> FlowState:
    """Same physical state expressed with an explicit unit vector director."""
    if state.mode == VECTOR:
        return state
    return FlowState(state.grid, state.t, state.u_hat, d=state.director(), params=state.params)


@dataclass(frozen=True)
class EnergyReport:
    """Energy functionals of one state, all as squared L2/L4 norms.

    ``lap_l2_sq`` is ``||Lap d||^2`` and ``grad_l4_fourth`` is
    ``||grad d||_4^4``; together they form the coercive dissipation.
    """

    kinetic: float
    elastic: float
    viscous_dissipation: float
    director_dissipation: float
    lap_l2_sq: float
    grad_l4_fourth: float

    def energy(self, params: Params) -> float:
        """Conserved-law energy ``||u||^2 + lam ||grad d||^2``."""
        return self.kinetic + params.lam * self.elastic

    def dissipation_rate(self, params: Params) -> float:
        """Rate ``2 (nu ||grad u||^2 + lam gamma ||Lap d + |grad d|^2 d||^2)``."""
        return 2.0 * (params.nu * self.viscous_dissipation
                      + params.lam * params.gamma * self.director_dissipation)


# ---------------------------------------------------------------------------
# director geometry

def director_from_angle(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    return np.stack([np.cos(theta), np.sin(theta)])


def director_gradient(state: FlowState) -> np.ndarray:
    """Physical ``grad d`` with layout ``[component c, derivative j]``.

    Angle mode uses the chain rule ``d_j d = (d_j theta) d_perp`` at the
    grid points, which keeps ``|grad d| = |grad theta|`` exact.
    """
    g = state.grid
    if state.mode == ANGLE:
        th = sp.to_physical(state.theta_hat)
        gth = sp.to_physical(sp.gradient(g, state.theta_hat))
        d_perp = np.stack([-np.sin(th), np.cos(th)])
        return d_perp[:, None] * gth[None, :]
    return sp.to_physical(sp.gradient(g, sp.to_spectral(state.d)))


def elastic_stress(state: FlowState) -> np.ndarray:
    """Tensor ``(grad d . grad d)_ij = d_i d . d_j d`` of shape ``(2, 2, n, n)``."""
    g = state.grid
    if state.mode == ANGLE:
        gth = sp.to_physical(sp.gradient(g, state.theta_hat))
        return gth[:, None] * gth[None, :]
    gd = director_gradient(state)
    return np.einsum("cinm,cjnm->ijnm", gd, gd)


# ---------------------------------------------------------------------------
# tendencies

def _stress_divergence(grid, tensor_phys):
    """Spectral ``div T`` for a symmetric physical tensor, dealiased."""
    t00, t01, t11 = (sp.to_spectral(tensor_phys[i, j]) for i, j in ((0, 0), (0, 1), (1, 1)))
    xi = grid.xi_deriv
    div = np.stack([1j * (xi[0] * t00 + xi[1] * t01), 1j * (xi[0] * t01 + xi[1] * t11)])
    return div * grid.dealias_mask


def tendencies(grid, params: Params, u_hat, dir_hat, mode: str):
    """Nonlinear tendencies of ``(u_hat, director_hat)``.

    ``dir_hat`` is the spectral angle or the spectral vector director
    (which need not be unit length at intermediate stages).  Returns the
    dealiased spectral tendencies; the velocity part is solenoidal.
    """
    u = sp.to_physical(u_hat)
    if mode == ANGLE:
        gth = sp.to_physical(sp.gradient(grid, dir_hat))
        stress = gth[:, None] * gth[None, :]
        adv = u[0] * gth[0] + u[1] * gth[1]
        ddir = -sp.to_spectral(adv) * grid.dealias_mask
    else:
        d = sp.to_physical(dir_hat)
        gd = sp.to_physical(sp.gradient(grid, dir_hat))
        stress = np.einsum("cinm,cjnm->ijnm", gd, gd)
        adv = np.einsum("jnm,cjnm->cnm", u, gd)
        g2 = np.sum(gd ** 2, axis=(0, 1))
        ddir = sp.to_spectral(-adv + params.gamma * g2 * d) * grid.dealias_mask
    tensor = u[:, None] * u[None, :] + params.lam * stress
    du = -sp.leray_project(grid, _stress_divergence(grid, tensor))
    return du, ddir


def velocity_rhs(state: FlowState) -> np.ndarray:
    """``-P div(u (x) u) - lam P div(grad d . grad d)``, dealiased, spectral."""
    return tendencies(state.grid, state.params, state.u_hat, state.director_hat, state.mode)[0]


def director_rhs(state: FlowState) -> np.ndarray:
    """Angle mode: ``-u . grad theta``; vector mode: ``-u . grad d + gamma |grad d|^2 d``."""
    return tendencies(state.grid, state.params, state.u_hat, state.director_hat, state.mode)[1]


# ---------------------------------------------------------------------------
# energetics

def _quad(grid, values) -> float:
    return float(np.sum(values) * grid.dx ** 2)


def vector_director_functionals(grid, d) -> dict:
    """Director functionals computed from a physical unit field ``d``."""
    d_hat = sp.to_spectral(d)
    xi2 = grid.xi2
    l2 = grid.length ** 2
    gd = sp.to_physical(sp.gradient(grid, d_hat))
    g2 = np.sum(gd ** 2, axis=(0, 1))
    lap = sp.to_physical(-xi2 * d_hat)
    tension = lap + g2 * d
    return dict(
        elastic=float(l2 * np.sum(xi2 * np.abs(d_hat) ** 2)),
        director_dissipation=_quad(grid, np.sum(tension ** 2, axis=0)),
        lap_l2_sq=float(l2 * np.sum(xi2 ** 2 * np.abs(d_hat) ** 2)),
        grad_l4_fourth=_quad(grid, g2 ** 2),
    )


def angle_director_functionals(grid, theta_hat) -> dict:
    """Same functionals via the chart identities of the angle formulation."""
    l2 = grid.length ** 2
    p = np.abs(theta_hat) ** 2
    gth = sp.to_physical(sp.gradient(grid, theta_hat))
    g4 = _quad(grid, np.sum(gth ** 2, axis=0) ** 2)
    lap_theta = float(l2 * np.sum(grid.xi2 ** 2 * p))
    return dict(
        elastic=float(l2 * np.sum(grid.xi2 * p)),
        director_dissipation=lap_theta,
        lap_l2_sq=lap_theta + g4,
        grad_l4_fourth=g4,
    )


def energy_report(state: FlowState) -> EnergyReport:
    g = state.grid
    l2 = g.length ** 2
    pu = np.abs(state.u_hat) ** 2
    if state.mode == ANGLE:
        dirf = angle_director_functionals(g, state.theta_hat)
    else:
        dirf = vector_director_functionals(g, state.d)
    return EnergyReport(
        kinetic=float(l2 * np.sum(pu)),
        viscous_dissipation=float(l2 * np.sum(g.xi2 * pu)),
        **dirf,
    )


def compute_pressure(state: FlowState) -> np.ndarray:
    """Mean-zero pressure solving ``-Lap P = div div(u (x) u + lam grad d . grad d)``."""
    g = state.grid
    u = state.velocity()
    tensor = u[:, None] * u[None, :] + state.params.lam * elastic_stress(state)
    xi = g.xi_deriv
    th = [[sp.to_spectral(tensor[i, j]) for j in range(2)] for i in range(2)]
    ddt = sum(xi[i] * xi[j] * th[i][j] for i in range(2) for j in range(2))
    xi2 = np.where(g.xi2 == 0.0, 1.0, g.xi2)
    p_hat = np.where(g.xi2 == 0.0, 0.0, -ddt / xi2) * g.dealias_mask
    return sp.to_physical(p_hat)
