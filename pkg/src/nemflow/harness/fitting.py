"""Least-squares decay fits in transformed coordinates."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ..errors import ConfigurationError, NumericalInputError

MODELS = ("algebraic", "logarithmic", "exponential")
MIN_SAMPLES = 8
POOR_FIT_RESIDUAL = 0.05


@dataclass(frozen=True)
class DecayFit:
    """``y ~ C (1+t)^-alpha``, ``C ln(e+t)^-alpha`` or ``C exp(-alpha t)``.

    ``residual`` is the rms misfit of ``log y`` over the window.
    """

    exponent: float
    amplitude: float
    window: tuple
    residual: float
    model: str
    samples: int

    def envelope(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.model == "exponential":
            return self.amplitude * np.exp(-self.exponent * t)
        return self.amplitude * _basis(self.model, t) ** (-self.exponent)

    @property
    def poor(self) -> bool:
        return self.residual > POOR_FIT_RESIDUAL

    def to_dict(self) -> dict:
        out = asdict(self)
        out["window"] = list(self.window)
        out["poor"] = self.poor
        return out


def _basis(model, t):
    if model == "algebraic":
        return 1.0 + t
    return np.log(math.e + t)


def fit_decay(t, y, window=None, model: str = "algebraic") -> DecayFit:
    """Fit a decay law to samples ``(t, y)`` restricted to ``window``.

    Needs at least eight samples inside the window, all with ``y > 0``.
    """
    if model not in MODELS:
        raise ConfigurationError(f"unknown decay model {model!r}")
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.shape != y.shape or t.ndim != 1:
        raise NumericalInputError("t and y must be one-dimensional and of equal length")
    if window is None:
        window = (float(t[0]), float(t[-1])) if len(t) else (0.0, 0.0)
    lo, hi = float(window[0]), float(window[1])
    sel = (t >= lo - 1e-9) & (t <= hi + 1e-9)
    if np.count_nonzero(sel) < MIN_SAMPLES:
        raise NumericalInputError(
            f"{np.count_nonzero(sel)} samples in window [{lo}, {hi}], need at least {MIN_SAMPLES}")
    ts, ys = t[sel], y[sel]
    if not np.all(np.isfinite(ys)) or np.any(ys <= 0):
        raise NumericalInputError("decay fit needs finite positive values in the window")
    x = ts if model == "exponential" else np.log(_basis(model, ts))
    design = np.stack([np.ones_like(x), x], axis=1)
    coef, *_ = np.linalg.lstsq(design, np.log(ys), rcond=None)
    misfit = np.log(ys) - design @ coef
    return DecayFit(
        exponent=float(-coef[1]),
        amplitude=float(np.exp(coef[0])),
        window=(lo, hi),
        residual=float(np.sqrt(np.mean(misfit ** 2))),
        model=model,
        samples=int(len(ts)),
    )


def envelope_check(t, y, exponent: float, window) -> dict:
    """Whether ``y`` stays below ``C (1+t)^-exponent`` anchored at the window start."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    sel = (t >= window[0] - 1e-9) & (t <= window[1] + 1e-9)
    ts, ys = t[sel], y[sel]
    if len(ts) == 0:
        raise NumericalInputError("no samples in the envelope window")
    c = ys[0] * (1.0 + ts[0]) ** exponent
    bound = c * (1.0 + ts) ** (-exponent)
    ratio = ys / bound
    return {"exponent": exponent, "amplitude": float(c), "max_ratio": float(np.max(ratio)),
            "holds": bool(np.all(ratio <= 1.0 + 1e-12))}


__all__ = ["DecayFit", "fit_decay", "envelope_check", "MODELS", "MIN_SAMPLES", "POOR_FIT_RESIDUAL"]
