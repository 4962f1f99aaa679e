"""Minimal SVG scatter, line and error-bar charts, written as plain text."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf")

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 70, 20, 36, 56


@dataclass
class Series:
    label: str
    x: np.ndarray
    y: np.ndarray
    style: str = "scatter"  # scatter | line | errorbar
    lo: np.ndarray | None = None
    hi: np.ndarray | None = None
    color: str | None = None


@dataclass
class Chart:
    title: str
    xlabel: str
    ylabel: str
    series: list[Series] = field(default_factory=list)
    comment: str = ""

    def add(self, *args, **kwargs) -> "Chart":
        self.series.append(Series(*args, **kwargs))
        return self

    def render(self) -> str:
        return render(self)

    def save(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.render())
        return path


def nice_ticks(lo: float, hi: float, n: int = 6) -> np.ndarray:
    """Round-number ticks covering [lo, hi]."""
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return np.array([0.0])
    if hi <= lo:
        hi = lo + (abs(lo) or 1.0)
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = next(s * mag for s in (1, 2, 2.5, 5, 10) if s * mag >= raw)
    start = math.floor(lo / step) * step
    stop = math.ceil(hi / step) * step
    return np.round(np.arange(start, stop + step / 2, step), 12)


def _fmt_tick(v: float) -> str:
    return f"{v:.6g}"


def _bounds(chart: Chart) -> tuple[float, float, float, float]:
    xs, ys = [], []
    for s in chart.series:
        xs.append(np.asarray(s.x, float))
        ys.append(np.asarray(s.y, float))
        if s.lo is not None:
            ys.append(np.asarray(s.lo, float))
        if s.hi is not None:
            ys.append(np.asarray(s.hi, float))
    x = np.concatenate(xs) if xs else np.array([0.0, 1.0])
    y = np.concatenate(ys) if ys else np.array([0.0, 1.0])
    x, y = x[np.isfinite(x)], y[np.isfinite(y)]
    if x.size == 0:
        x = np.array([0.0, 1.0])
    if y.size == 0:
        y = np.array([0.0, 1.0])
    return float(x.min()), float(x.max()), float(y.min()), float(y.max())


def render(chart: Chart) -> str:
    x0, x1, y0, y1 = _bounds(chart)
    xt, yt = nice_ticks(x0, x1), nice_ticks(y0, y1)
    x0, x1, y0, y1 = xt[0], xt[-1], yt[0], yt[-1]
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    pw, ph = _W - _ML - _MR, _H - _MT - _MB

    def px(v):
        return _ML + (np.asarray(v, float) - x0) / (x1 - x0) * pw

    def py(v):
        return _MT + ph - (np.asarray(v, float) - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="11">']
    if chart.comment:
        out.append(f"<!-- {escape(chart.comment.replace('--', '- -'))} -->")
    out.append(f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>')
    out.append(f'<text x="{_W / 2}" y="20" text-anchor="middle" font-size="14">{escape(chart.title)}</text>')
    for v in xt:
        X = px(v)
        out.append(f'<line x1="{X:.2f}" y1="{_MT}" x2="{X:.2f}" y2="{_MT + ph}" stroke="#e5e5e5"/>')
        out.append(f'<text x="{X:.2f}" y="{_MT + ph + 16}" text-anchor="middle">{_fmt_tick(v)}</text>')
    for v in yt:
        Y = py(v)
        out.append(f'<line x1="{_ML}" y1="{Y:.2f}" x2="{_ML + pw}" y2="{Y:.2f}" stroke="#e5e5e5"/>')
        out.append(f'<text x="{_ML - 6}" y="{Y + 4:.2f}" text-anchor="end">{_fmt_tick(v)}</text>')
    out.append(f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    out.append(f'<text x="{_ML + pw / 2}" y="{_H - 14}" text-anchor="middle">{escape(chart.xlabel)}</text>')
    out.append(f'<text x="16" y="{_MT + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 16 {_MT + ph / 2})">{escape(chart.ylabel)}</text>')

    for i, s in enumerate(chart.series):
        color = s.color or PALETTE[i % len(PALETTE)]
        X, Y = px(s.x), py(s.y)
        ok = np.isfinite(X) & np.isfinite(Y)
        if s.style == "line":
            pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(X[ok], Y[ok]))
            out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        else:
            if s.style == "errorbar" and s.lo is not None and s.hi is not None:
                for a, lo, hi in zip(X, py(s.lo), py(s.hi)):
                    out.append(f'<line x1="{a:.2f}" y1="{lo:.2f}" x2="{a:.2f}" y2="{hi:.2f}" stroke="{color}"/>')
                    for yy in (lo, hi):
                        out.append(f'<line x1="{a - 4:.2f}" y1="{yy:.2f}" x2="{a + 4:.2f}" y2="{yy:.2f}" stroke="{color}"/>')
            r = 2.0 if s.style == "scatter" else 3.5
            out.extend(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="{r}" fill="{color}" fill-opacity="0.7"/>'
                       for a, b in zip(X[ok], Y[ok]))
        ly = _MT + 14 + 14 * i
        out.append(f'<rect x="{_ML + 8}" y="{ly - 8}" width="10" height="10" fill="{color}"/>')
        out.append(f'<text x="{_ML + 22}" y="{ly + 1}">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
