"""Energy budgets, rigidity, and Fourier-space inequality verifiers.

Spectral sums that only involve radial weights are evaluated on shells
of equal ``|k|^2`` (see :func:`spectral_digest`), which keeps per-sample
storage small enough for long, densely sampled trajectories.  All
energies carry the Plancherel factor ``L^2`` so that they coincide with
continuum integrals ``int |f_hat|^2 dxi``.

Inequality time integrals use the local-cubic rule of
:mod:`nemflow.quadrature`, which stays fourth order through the corners
of ``|f|``; the energy budget keeps the trapezoid rule so that its
residual is a clean second-order quantity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from . import quadrature as quad
from . import spectral as sp
from .errors import ConfigurationError, InconsistencyError, NemflowError
from .model import ANGLE, EnergyReport, FlowState, Params, director_gradient

TOL_REL = 1e-6
ROUNDOFF = 1e-13
SPLIT_RULES = ("G", "log", "algebraic")
WEIGHTED = ("weighted_energy", "heat_weighted", "time_weighted")
PARTS = ("u", "grad_d")


class TrajectoryInputError(NemflowError, ValueError):
    """Trajectory lacks samples or probe data a verifier needs."""


# ---------------------------------------------------------------------------
# reports

@dataclass
class InequalityReport:
    """Both sides of an inequality on a set of evaluation points.

    ``holds`` is true iff ``slack >= -tol_rel * |rhs|`` everywhere.
    ``points`` holds per-row labels (times, parts, modes) and ``terms``
    the individual right-hand contributions.
    """

    name: str
    lhs: np.ndarray
    rhs: np.ndarray
    points: dict = field(default_factory=dict)
    terms: dict = field(default_factory=dict)
    tol_rel: float = TOL_REL

    def __post_init__(self):
        self.lhs = np.atleast_1d(np.asarray(self.lhs, dtype=float))
        self.rhs = np.atleast_1d(np.asarray(self.rhs, dtype=float))

    @property
    def slack(self) -> np.ndarray:
        return self.rhs - self.lhs

    @property
    def ok(self) -> np.ndarray:
        return self.slack >= -self.tol_rel * np.abs(self.rhs)

    @property
    def holds(self) -> bool:
        return bool(np.all(self.ok))

    @property
    def worst_relative_slack(self) -> float:
        """Smallest ``slack / |rhs|`` (``inf`` for an empty report)."""
        if self.lhs.size == 0:
            return math.inf
        scale = np.where(self.rhs == 0.0, 1.0, np.abs(self.rhs))
        return float(np.min(self.slack / scale))

    def summary(self) -> dict:
        return {
            "name": self.name,
            "holds": self.holds,
            "checked": int(self.lhs.size),
            "violations": int(np.sum(~self.ok)),
            "worst_relative_slack": self.worst_relative_slack,
            "tol_rel": self.tol_rel,
        }


@dataclass
class EnergyLedger:
    times: np.ndarray
    energy: np.ndarray
    cumulative_viscous: np.ndarray
    cumulative_director: np.ndarray
    budget_residual: np.ndarray

    @property
    def max_residual(self) -> float:
        return float(np.max(self.budget_residual))


@dataclass(frozen=True)
class RigidityReport:
    """Rigidity quantities of one director field.

    ``omega`` is ``1 - ratio``.  ``coercive_rhs_margin`` is
    ``coercive_lhs - (omega/2)(lap_l2_sq + grad_l4_fourth)``, and
    ``coercive_constant`` the largest factor ``c`` with
    ``coercive_lhs >= (c/2)(lap_l2_sq + grad_l4_fourth)``.
    """

    grad_l4_fourth: float
    lap_l2_sq: float
    coercive_lhs: float
    ratio: float | None
    omega: float | None
    coercive_rhs_margin: float | None
    coercive_constant: float | None
    zero_gradient: bool
    in_hypothesis: bool | None = None


@dataclass(frozen=True)
class MultiplierSpec:
    """Multipliers of the frequency-splitting arguments.

    ``phi = exp(-|xi|^2 t)``, ``psi = 1 - phi``, ``E = (1+t)^k`` and the
    split radius chosen by ``split_rule``:

    * ``G``: ``(k / (2 (1+t)))^(1/2)``
    * ``log``: ``(omega_bar (e+t) ln(e+t))^(-1/2)``
    * ``algebraic``: ``(2 omega_bar (1+t))^(-1/2)``
    """

    k: float = 3.0
    split_rule: str = "G"
    omega_bar: float | None = None

    def __post_init__(self):
        if not self.k > 0:
            raise ConfigurationError("weight exponent k must be positive")
        if self.split_rule not in SPLIT_RULES:
            raise ConfigurationError(f"unknown split rule {self.split_rule!r}")
        if self.omega_bar is not None and not 0 < self.omega_bar <= 1:
            raise ConfigurationError("omega_bar must lie in (0, 1]")

    @staticmethod
    def phi(xi2, t):
        return np.exp(-np.asarray(xi2) * t)

    def psi(self, xi2, t):
        return -np.expm1(-np.asarray(xi2) * t)

    def dpsi(self, xi2, t):
        xi2 = np.asarray(xi2)
        return xi2 * np.exp(-xi2 * t)

    def weight(self, t):
        return (1.0 + np.asarray(t, dtype=float)) ** self.k

    def dweight(self, t):
        return self.k * (1.0 + np.asarray(t, dtype=float)) ** (self.k - 1.0)

    def radius(self, t, omega_bar: float | None = None):
        t = np.asarray(t, dtype=float)
        if self.split_rule == "G":
            return np.sqrt(self.k / (2.0 * (1.0 + t)))
        w = omega_bar if omega_bar is not None else self.omega_bar
        if w is None:
            raise ConfigurationError(f"split rule {self.split_rule!r} needs omega_bar")
        if self.split_rule == "log":
            return 1.0 / np.sqrt(w * (math.e + t) * np.log(math.e + t))
        return 1.0 / np.sqrt(2.0 * w * (1.0 + t))


# ---------------------------------------------------------------------------
# pointwise quantities

def grad_director_hat(state: FlowState) -> np.ndarray:
    """Spectral ``grad d`` with layout ``[c, j]``."""
    if state.mode == ANGLE:
        return sp.to_spectral(director_gradient(state))
    return sp.gradient(state.grid, sp.to_spectral(state.d))


def min_d2(state: FlowState) -> float:
    if state.mode == ANGLE:
        return float(np.min(np.sin(sp.to_physical(state.theta_hat))))
    return float(np.min(state.d[1]))


def max_unit_defect(state: FlowState) -> float:
    """``max | |d| - 1 |`` over the grid."""
    d = state.director()
    return float(np.max(np.abs(np.sqrt(d[0] ** 2 + d[1] ** 2) - 1.0)))


def rigidity_from_report(report: EnergyReport, min_d2_value: float | None = None,
                         eps0: float | None = None) -> RigidityReport:
    g4 = report.grad_l4_fourth
    lap = report.lap_l2_sq
    lhs = report.director_dissipation
    in_hyp = None
    if min_d2_value is not None and eps0 is not None:
        in_hyp = bool(min_d2_value >= eps0)
    if lap == 0.0:
        if g4 > 0.0:
            raise InconsistencyError("grad d has positive L4 norm but Lap d vanishes")
        return RigidityReport(g4, lap, lhs, None, None, None, None, True, in_hyp)
    ratio = g4 / lap
    omega = 1.0 - ratio
    total = lap + g4
    return RigidityReport(g4, lap, lhs, ratio, omega, lhs - 0.5 * omega * total,
                          2.0 * lhs / total, False, in_hyp)


def rigidity_report(state: FlowState, eps0: float | None = None) -> RigidityReport:
    from .model import energy_report

    return rigidity_from_report(energy_report(state), min_d2(state), eps0)


def frequency_split_energy(state: FlowState, radius: float):
    """``(low, high)``: ``int |u_hat|^2 + |grad d_hat|^2`` inside and outside ``|xi| <= radius``."""
    g = state.grid
    per_mode = (np.sum(np.abs(state.u_hat) ** 2, axis=0)
                + np.sum(np.abs(grad_director_hat(state)) ** 2, axis=(0, 1)))
    inside = g.xi2 <= radius ** 2
    l2 = g.length ** 2
    return float(l2 * np.sum(per_mode[inside])), float(l2 * np.sum(per_mode[~inside]))


# ---------------------------------------------------------------------------
# per-sample probes

def shell_spectrum(state: FlowState) -> dict:
    """Shell energies of ``u`` and ``grad d`` (Plancherel-scaled)."""
    g = state.grid
    l2 = g.length ** 2
    return {
        "eu": l2 * g.shell_sum(np.sum(np.abs(state.u_hat) ** 2, axis=0)),
        "ed": l2 * g.shell_sum(np.sum(np.abs(grad_director_hat(state)) ** 2, axis=(0, 1))),
    }


def _flux(grid, coef_conj, tensor_hat):
    """``Re sum conj(a_i) i xi_j T_ij`` per mode for ``a`` with layout ``[i]``."""
    xi = grid.xi
    acc = 0.0
    for i in range(coef_conj.shape[0]):
        div = 1j * (xi[0] * tensor_hat[i][0] + xi[1] * tensor_hat[i][1])
        acc = acc + np.real(np.conj(coef_conj[i]) * div)
    return acc


def spectral_digest(state: FlowState) -> dict:
    """Shell sums feeding the weighted inequality verifiers.

    With ``G = grad d_hat``:

    * ``eu``, ``ed``: ``|u_hat|^2`` and ``|G|^2``
    * ``a_uu``, ``a_ud``: ``Re conj(u_hat_i) i xi_j F(u_i u_j)`` and the
      same with ``d_i d . d_j d``
    * ``b_adv``, ``b_cub``: ``Re conj(G_cj) i xi_j F(u . grad d_c)`` and the
      same with ``|grad d|^2 d_c``

    so that per mode ``d/dt |u_hat|^2 = -2 nu |xi|^2 |u_hat|^2 - 2 (a_uu + lam a_ud)``
    and ``d/dt |G|^2 = -2 gamma |xi|^2 |G|^2 - 2 b_adv + 2 gamma b_cub``.
    """
    g = state.grid
    l2 = g.length ** 2
    u = state.velocity()
    gd = director_gradient(state)
    d = state.director()
    gh = sp.to_spectral(gd)
    sym = ((0, 0), (0, 1), (1, 1))

    def tensor_hat(phys):
        h = {ij: sp.to_spectral(phys(*ij)) for ij in sym}
        return [[h[(0, 0)], h[(0, 1)]], [h[(0, 1)], h[(1, 1)]]]

    t_uu = tensor_hat(lambda i, j: u[i] * u[j])
    t_dd = tensor_hat(lambda i, j: gd[0, i] * gd[0, j] + gd[1, i] * gd[1, j])
    adv = sp.to_spectral(np.einsum("jnm,cjnm->cnm", u, gd))
    g2 = np.sum(gd ** 2, axis=(0, 1))
    cub = sp.to_spectral(g2 * d)
    # G_cj = i xi_j d_c, so the flux with a vector source s_c is sum_c conj(G_c.) . i xi s_c
    xi = g.xi

    def director_flux(src):
        acc = 0.0
        for c in range(2):
            for j in range(2):
                acc = acc + np.real(np.conj(gh[c, j]) * 1j * xi[j] * src[c])
        return acc

    shell = g.shell_sum
    return {
        "eu": l2 * shell(np.sum(np.abs(state.u_hat) ** 2, axis=0)),
        "ed": l2 * shell(np.sum(np.abs(gh) ** 2, axis=(0, 1))),
        "a_uu": l2 * shell(_flux(g, state.u_hat, t_uu)),
        "a_ud": l2 * shell(_flux(g, state.u_hat, t_dd)),
        "b_adv": l2 * shell(director_flux(adv)),
        "b_cub": l2 * shell(director_flux(cub)),
    }


class PointwiseProbe:
    """Per-sample data for the pointwise Fourier bound.

    With ``A(xi, t) = |F u(xi, t)| + |F grad d(xi, t)|`` in the ``1/(2 pi)``
    convention, records the largest ``(A(t) - A(0)) / |xi|`` over nonzero
    modes, the mode attaining it, and the mean-mode excess.
    """

    def __init__(self, initial: FlowState):
        self.grid = initial.grid
        self.a0 = self.amplitude(initial)
        r = np.sqrt(self.grid.xi2)
        self.inv_r = np.where(r == 0.0, 0.0, 1.0 / np.where(r == 0.0, 1.0, r))

    def amplitude(self, state: FlowState) -> np.ndarray:
        cf = sp.continuum_factor(state.grid)
        au = np.sqrt(np.sum(np.abs(state.u_hat) ** 2, axis=0))
        ag = np.sqrt(np.sum(np.abs(grad_director_hat(state)) ** 2, axis=(0, 1)))
        return cf * (au + ag)

    def __call__(self, state: FlowState) -> dict:
        a = self.amplitude(state)
        growth = (a - self.a0) * self.inv_r
        growth[0, 0] = -np.inf
        idx = np.unravel_index(int(np.argmax(growth)), growth.shape)
        return {
            "ratio": float(growth[idx]),
            "a": float(a[idx]),
            "a0": float(self.a0[idx]),
            "xi": float(np.sqrt(self.grid.xi2[idx])),
            "mean_excess": float(a[0, 0] - self.a0[0, 0]),
            "roundoff": float(ROUNDOFF * np.max(self.a0)),
        }


def standard_probes(initial: FlowState, digest: bool = True, pointwise: bool = True) -> dict:
    probes = {"min_d2": min_d2, "unit_defect": max_unit_defect}
    probes["spectrum"] = spectral_digest if digest else shell_spectrum
    if pointwise:
        probes["pointwise"] = PointwiseProbe(initial)
    return probes


# ---------------------------------------------------------------------------
# budgets

def _params(traj) -> Params:
    return traj.params if traj.params is not None else Params()


def _require(traj, probe=None):
    if traj is None or len(traj.samples) == 0:
        raise TrajectoryInputError("trajectory has no samples")
    if probe is not None and probe not in traj.samples[0].probes:
        raise TrajectoryInputError(f"trajectory lacks the {probe!r} probe")


def energy_budget(traj) -> EnergyLedger:
    """Per-sample residual of the energy law, relative to the initial energy.

    ``E = ||u||^2 + lam ||grad d||^2`` and
    ``E(t) + 2 int (nu ||grad u||^2 + lam gamma ||Lap d + |grad d|^2 d||^2) = E(0)``,
    integrated with the trapezoid rule.
    """
    _require(traj)
    p = _params(traj)
    t = traj.times
    energy = np.array([r.energy(p) for r in traj.reports])
    visc = traj.series("viscous_dissipation")
    dird = traj.series("director_dissipation")
    cv = cumulative_trapezoid(visc, t, initial=0.0)
    cd = cumulative_trapezoid(dird, t, initial=0.0)
    lhs = energy + 2.0 * (p.nu * cv + p.lam * p.gamma * cd)
    scale = energy[0] if energy[0] > 0 else 1.0
    return EnergyLedger(t, energy, cv, cd, np.abs(lhs - energy[0]) / scale)


def empirical_omega(traj) -> float:
    """Smallest ``1 - ratio`` over samples; 1 when the director never bends."""
    omegas = [rigidity_from_report(r).omega for r in traj.reports]
    omegas = [w for w in omegas if w is not None]
    return min(1.0, min(omegas)) if omegas else 1.0


def coercive_budget(traj, omega_bar: float | None = None) -> InequalityReport:
    """``E(t) + w int (nu ||grad u||^2 + lam gamma ||Lap d||^2) <= E(0)`` per sample."""
    _require(traj)
    p = _params(traj)
    w = empirical_omega(traj) if omega_bar is None else omega_bar
    t = traj.times
    energy = np.array([r.energy(p) for r in traj.reports])
    integrand = p.nu * traj.series("viscous_dissipation") + p.lam * p.gamma * traj.series("lap_l2_sq")
    lhs = energy + w * cumulative_trapezoid(integrand, t, initial=0.0)
    rhs = np.full_like(lhs, energy[0])
    return InequalityReport("coercive_budget", lhs, rhs, {"t": t}, {"omega_bar": w})


# ---------------------------------------------------------------------------
# weighted Fourier inequalities

def _digest_arrays(traj):
    _require(traj, "spectrum")
    spec = traj.probe("spectrum")
    if "a_uu" not in spec[0]:
        raise TrajectoryInputError("trajectory has shell spectra but no flux digest")
    return {key: np.array([s[key] for s in spec]) for key in spec[0]}


def _part_terms(dg, part, p: Params, nonlinear: bool):
    """Energy per shell, linear rate, and the nonlinear flux arrays with their factors."""
    if part == "u":
        fluxes = [(dg["a_uu"], 1.0), (dg["a_ud"], p.lam)] if nonlinear else []
        return dg["eu"], p.nu, fluxes
    fluxes = [(dg["b_cub"], p.gamma)]
    if nonlinear:
        fluxes.insert(0, (dg["b_adv"], 1.0))
    return dg["ed"], p.gamma, fluxes


def _default_starts(times, count=12):
    idx = np.unique(np.linspace(1, len(times) - 2, count).astype(int)) if len(times) > 2 else []
    return [int(i) for i in idx if 0 < i < len(times) - 1]


def verify_weighted_inequality(traj, spec: MultiplierSpec | None = None,
                               which: str = "time_weighted", starts=None,
                               stride: int = 1) -> InequalityReport:
    """Check a weighted Fourier-space energy inequality along a trajectory.

    ``which`` selects

    * ``weighted_energy``: multiplier ``psi`` with absolute values on
      every right-hand integrand
    * ``heat_weighted``: multiplier ``exp(-rate (t - tau)) phi(t)``, for
      which the linear integrand cancels
    * ``time_weighted``: time weight ``E(t) = (1+t)^k`` and multiplier
      ``psi``, signed linear integrand

    The check runs for every start index in ``starts`` (default: twelve
    spread over the run) against every later sample (every ``stride``-th
    for ``heat_weighted``), for the ``u`` and ``grad_d`` parts separately.
    """
    if which not in WEIGHTED:
        raise ConfigurationError(f"unknown inequality {which!r}; expected one of {WEIGHTED}")
    spec = spec or MultiplierSpec()
    dg = _digest_arrays(traj)
    t = traj.times
    grid = traj.grid
    xi2 = grid.shell_xi2
    p = _params(traj)
    starts = _default_starts(t) if starts is None else list(starts)
    for s in starts:
        if not 0 <= s < len(t) - 1:
            raise ConfigurationError(f"start index {s} leaves no later sample")
    rows = {"lhs": [], "rhs": [], "s": [], "t": [], "part": [], "start": []}
    for part in PARTS:
        e, rate, fluxes = _part_terms(dg, part, p, traj.nonlinear)
        if which == "heat_weighted":
            _heat_weighted_rows(rows, part, e, rate, fluxes, t, xi2, starts, stride, spec)
        else:
            _psi_rows(rows, part, e, rate, fluxes, t, xi2, starts, spec, which == "time_weighted")
    return InequalityReport(
        which, np.array(rows["lhs"]), np.array(rows["rhs"]),
        {"s": np.array(rows["s"]), "t": np.array(rows["t"]), "part": rows["part"]},
        {"start": np.array(rows["start"])})


def _psi_rows(rows, part, e, rate, fluxes, t, xi2, starts, spec, time_weighted):
    psi = spec.psi(xi2[None, :], t[:, None])
    dpsi = spec.dpsi(xi2[None, :], t[:, None])
    energy = np.sum(psi ** 2 * e, axis=1)
    linear = np.sum((psi * dpsi - rate * xi2[None, :] * psi ** 2) * e, axis=1)
    w = spec.weight(t) if time_weighted else np.ones_like(t)
    cum = np.zeros_like(t)
    for f, c in fluxes:
        cum += 2.0 * c * quad.cumulative(w * np.sum(psi ** 2 * f, axis=1), t, absolute=True)
    if time_weighted:
        cum += quad.cumulative(spec.dweight(t) * energy + 2.0 * w * linear, t)
    else:
        cum += 2.0 * quad.cumulative(linear, t, absolute=True)
    lhs_all = w * energy
    for s in starts:
        later = slice(s + 1, len(t))
        rhs = lhs_all[s] + (cum[later] - cum[s])
        rows["lhs"].extend(lhs_all[later])
        rows["rhs"].extend(rhs)
        rows["start"].extend(np.full(len(rhs), lhs_all[s]))
        rows["s"].extend(np.full(len(rhs), t[s]))
        rows["t"].extend(t[later])
        rows["part"].extend([part] * len(rhs))


def _heat_weighted_rows(rows, part, e, rate, fluxes, t, xi2, starts, stride, spec):
    for s in starts:
        for j in range(s + 1, len(t), max(1, stride)):
            tt = t[j]
            phi2 = spec.phi(xi2, tt) ** 2
            damp = np.exp(-2.0 * rate * xi2[None, :] * (tt - t[s:j + 1, None]))
            w = damp * phi2[None, :]
            lhs = float(np.sum(phi2 * e[j]))
            start = float(np.sum(w[0] * e[s]))
            integral = 0.0
            for f, c in fluxes:
                integral += 2.0 * c * quad.integrate(np.sum(w * f[s:j + 1], axis=1),
                                                     t[s:j + 1], absolute=True)
            rows["lhs"].append(lhs)
            rows["rhs"].append(start + integral)
            rows["start"].append(start)
            rows["s"].append(t[s])
            rows["t"].append(tt)
            rows["part"].append(part)


def pointwise_fourier_bound(traj) -> InequalityReport:
    """``A(xi, t) <= A(xi, 0) + c |xi| int_0^t (||u||^2 + ||grad d||^2)`` at every mode.

    ``c = 2 max(1, lam, gamma)``, which is the unit-parameter constant 2
    and dominates the general-parameter constant.  The mean mode must
    not grow beyond transform roundoff.  Rows come in three kinds: the
    worst mode's two sides, the binding growth ratio
    ``max (A - A0) / |xi|`` against ``c int``, and the mean-mode excess.
    """
    _require(traj, "pointwise")
    probes = traj.probe("pointwise")
    if traj.samples[0].t != 0.0:
        raise TrajectoryInputError("pointwise bound needs the initial sample")
    p = _params(traj)
    c = 2.0 * max(1.0, p.lam, p.gamma)
    t = traj.times
    norms = traj.series("kinetic") + traj.series("elastic")
    integral = quad.cumulative(norms, t)
    lhs = np.array([q["a"] for q in probes])
    rhs = np.array([q["a0"] + c * q["xi"] * i for q, i in zip(probes, integral)])
    excess = np.array([q["mean_excess"] for q in probes])
    # the growth ratio is the binding quantity; fold it into the reported rows
    ratio = np.array([q["ratio"] for q in probes])
    bound = c * integral
    # the mean mode is conserved; allow transform roundoff only
    floor = np.array([q["roundoff"] for q in probes])
    lhs_all = np.concatenate([lhs, ratio, excess])
    rhs_all = np.concatenate([rhs, bound, floor])
    kind = ["worst_mode"] * len(t) + ["growth_ratio"] * len(t) + ["mean_mode"] * len(t)
    return InequalityReport("pointwise", lhs_all, rhs_all,
                            {"t": np.concatenate([t, t, t]), "kind": kind})


def shell_energy_bound(grid: sp.SpectralGrid, field_hat, g: float, p: float) -> InequalityReport:
    """Low-frequency ball energy against the Hausdorff–Young/Hölder bound.

    LHS is ``sum_{|xi| <= g} |F f|^2 dxi^2`` in the ``1/(2 pi)`` convention;
    RHS is ``(4 pi)^-(2/p - 1) ||f||_p^2 g^(2 (2/p - 1))``, combining the
    Riesz–Thorin constant ``(2 pi)^-(2/p - 1)`` with the ball area ``pi g^2``.
    """
    if not 1.0 <= p < 2.0:
        raise ConfigurationError(f"p must lie in [1, 2), got {p!r}")
    if not g > 0:
        raise ConfigurationError("g must be positive")
    fh = np.asarray(field_hat)
    if fh.ndim == 2:
        fh = fh[None]
    cf = sp.continuum_factor(grid)
    inside = grid.xi2 <= g ** 2
    lhs = float(np.sum(np.abs(cf * fh[:, inside]) ** 2) * grid.dxi ** 2)
    f = sp.to_physical(fh)
    lp = float((np.sum(np.sqrt(np.sum(f ** 2, axis=0)) ** p) * grid.dx ** 2) ** (1.0 / p))
    a = 2.0 / p - 1.0
    rhs = (4.0 * np.pi) ** (-a) * lp ** 2 * g ** (2.0 * a)
    return InequalityReport("shell", [lhs], [rhs], {"g": [g], "p": [p]},
                            {"lp_norm": lp, "constant": (4.0 * np.pi) ** (-a) * lp ** 2})


def splitting_decay_trace(traj, spec: MultiplierSpec | None = None,
                          omega_bar: float | None = None) -> dict:
    """Per-sample total, ball/complement split and weighted energies.

    The split radius follows ``spec.split_rule``; the ``log`` and
    ``algebraic`` rules use ``omega_bar`` (default: the trajectory's
    empirical value).
    """
    spec = spec or MultiplierSpec()
    _require(traj, "spectrum")
    t = traj.times
    if spec.split_rule != "G" and omega_bar is None and spec.omega_bar is None:
        omega_bar = empirical_omega(traj)
    radius = spec.radius(t, omega_bar)
    xi2 = traj.grid.shell_xi2
    low = np.empty_like(t)
    high = np.empty_like(t)
    for i, s in enumerate(traj.probe("spectrum")):
        per_shell = s["eu"] + s["ed"]
        inside = xi2 <= radius[i] ** 2
        low[i] = np.sum(per_shell[inside])
        high[i] = np.sum(per_shell[~inside])
    total = traj.series("kinetic") + traj.series("elastic")
    return {
        "t": t,
        "total": total,
        "radius": radius,
        "low": low,
        "high": high,
        "weighted_1t": (1.0 + t) * total,
        "weighted_log": np.log(math.e + t) ** 2 * total,
    }
