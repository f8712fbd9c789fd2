"""Self-contained log-log SVG plots of decay series.

The horizontal axis is ``1 + t`` so that ``t = 0`` is representable.
Every coordinate is printed with fixed precision, so the document is a
pure function of its input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

from ..errors import ConfigurationError
from .fitting import DecayFit

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


@dataclass
class PlotSeries:
    label: str
    t: np.ndarray
    y: np.ndarray
    fit: DecayFit | None = None


@dataclass(frozen=True)
class PlotStyle:
    title: str = "energy decay"
    reference_exponent: float | None = 1.0
    width: int = 640
    height: int = 440
    ylabel: str = "energy"


@dataclass
class _Frame:
    x0: float
    x1: float
    y0: float
    y1: float
    style: PlotStyle
    margin: dict = field(default_factory=lambda: {"l": 70, "r": 20, "t": 40, "b": 50})

    def px(self, lx):
        w = self.style.width - self.margin["l"] - self.margin["r"]
        return self.margin["l"] + (lx - self.x0) / (self.x1 - self.x0) * w

    def py(self, ly):
        h = self.style.height - self.margin["t"] - self.margin["b"]
        return self.margin["t"] + (self.y1 - ly) / (self.y1 - self.y0) * h


def _points(frame, t, y):
    keep = (y > 0) & np.isfinite(y)
    lx = np.log10(1.0 + t[keep])
    ly = np.log10(y[keep])
    return " ".join(f"{frame.px(a):.2f},{frame.py(b):.2f}" for a, b in zip(lx, ly))


def _span(values):
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    return math.floor(lo), math.ceil(hi)


def emit_plot(series, style: PlotStyle | None = None) -> str:
    """Render ``series`` (a sequence of :class:`PlotSeries`) as an SVG string.

    Fitted envelopes are drawn dashed; the reference slope line
    ``(1+t)^-reference_exponent`` is anchored at the first series' first
    positive sample.
    """
    style = style or PlotStyle()
    series = list(series)
    if not series:
        raise ConfigurationError("emit_plot needs at least one series")
    clean = []
    for s in series:
        t = np.asarray(s.t, dtype=float)
        y = np.asarray(s.y, dtype=float)
        keep = (y > 0) & np.isfinite(y) & np.isfinite(t)
        if not np.any(keep):
            raise ConfigurationError(f"series {s.label!r} has no positive samples")
        clean.append((s, t[keep], y[keep]))
    all_lx = np.concatenate([np.log10(1.0 + t) for _, t, _ in clean])
    all_ly = np.concatenate([np.log10(y) for _, _, y in clean])
    fx = _span(all_lx)
    fy = _span(all_ly)
    frame = _Frame(fx[0], fx[1], fy[0], fy[1], style)
    w, h = style.width, style.height
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>',
        f'<text x="{w / 2:.1f}" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="15">{escape(style.title)}</text>',
    ]
    left, right = frame.px(frame.x0), frame.px(frame.x1)
    top, bottom = frame.py(frame.y1), frame.py(frame.y0)
    out.append(f'<rect x="{left:.2f}" y="{top:.2f}" width="{right - left:.2f}" '
               f'height="{bottom - top:.2f}" fill="none" stroke="black"/>')
    for d in range(frame.x0, frame.x1 + 1):
        x = frame.px(d)
        out.append(f'<line x1="{x:.2f}" y1="{bottom:.2f}" x2="{x:.2f}" y2="{bottom + 5:.2f}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{bottom + 18:.2f}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">1e{d}</text>')
    for d in range(frame.y0, frame.y1 + 1):
        y = frame.py(d)
        out.append(f'<line x1="{left - 5:.2f}" y1="{y:.2f}" x2="{left:.2f}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8:.2f}" y="{y + 4:.2f}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">1e{d}</text>')
    out.append(f'<text x="{(left + right) / 2:.1f}" y="{h - 10}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12">1 + t</text>')
    out.append(f'<text x="16" y="{(top + bottom) / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="12" transform="rotate(-90 16 {(top + bottom) / 2:.1f})">'
               f'{escape(style.ylabel)}</text>')
    legend_y = top + 16
    for i, (s, t, y) in enumerate(clean):
        color = PALETTE[i % len(PALETTE)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{_points(frame, t, y)}"/>')
        label = s.label
        if s.fit is not None:
            lo, hi = s.fit.window
            tt = np.linspace(lo, hi, 32)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1" stroke-dasharray="6,4" '
                       f'points="{_points(frame, tt, s.fit.envelope(tt))}"/>')
            label += f" (fit {s.fit.exponent:.3f})"
        out.append(f'<text x="{right - 8:.2f}" y="{legend_y:.2f}" text-anchor="end" fill="{color}" '
                   f'font-family="sans-serif" font-size="11">{escape(label)}</text>')
        legend_y += 15
    if style.reference_exponent is not None:
        _, t, y = clean[0]
        tt = np.array([t[0], t[-1]])
        yy = y[0] * ((1.0 + tt) / (1.0 + t[0])) ** (-style.reference_exponent)
        out.append(f'<polyline fill="none" stroke="gray" stroke-width="1" stroke-dasharray="2,3" '
                   f'points="{_points(frame, tt, yy)}"/>')
        out.append(f'<text x="{right - 8:.2f}" y="{legend_y:.2f}" text-anchor="end" fill="gray" '
                   f'font-family="sans-serif" font-size="11">reference slope '
                   f'{style.reference_exponent:g}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


__all__ = ["PlotSeries", "PlotStyle", "emit_plot"]
