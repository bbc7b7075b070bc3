"""Minimal deterministic SVG plotting: polyline charts and cell heat maps.

No plotting dependency is warranted for static figures, so this module
emits SVG text directly.  All coordinates and labels use fixed formats and
the output contains nothing session-dependent, which keeps the artifact
hashes in the run manifest reproducible.
"""

from __future__ import annotations

import math

import numpy as np

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
    "#9467bd", "#8c564b", "#17becf", "#7f7f7f",
)

# dark-blue -> yellow ramp for heat maps (low value = dark)
_RAMP = ((68, 1, 84), (59, 82, 139), (33, 145, 140), (94, 201, 98), (253, 231, 37))

_MISSING = "#c8c8c8"  # non-finite cells

_MARGIN = (64.0, 16.0, 30.0, 46.0)  # left, right, top, bottom


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ramp_color(t: float) -> str:
    t = min(max(float(t), 0.0), 1.0)
    pos = t * (len(_RAMP) - 1)
    i = min(int(pos), len(_RAMP) - 2)
    frac = pos - i
    rgb = [round(a + frac * (b - a)) for a, b in zip(_RAMP[i], _RAMP[i + 1])]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list:
    if not hi > lo:
        lo, hi = lo - 0.5, hi + 0.5
    raw = (hi - lo) / max(target, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    step = 10 * mag
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def _tick_label(value: float, log: bool) -> str:
    if log:
        k = int(round(value))
        return f"{10.0 ** k:g}" if -2 <= k <= 3 else f"1e{k}"
    return f"{value:.6g}"


class _Frame:
    """Data-to-pixel mapping over the plot rectangle, with optional log axes."""

    def __init__(self, width, height, xlim, ylim, logx, logy):
        self.width, self.height = float(width), float(height)
        self.left, right, self.top, bottom = _MARGIN
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        self.logx, self.logy = logx, logy
        self.px0, self.px1 = self.left, self.width - right
        self.py0, self.py1 = self.height - bottom, self.top

    def x(self, v: float) -> float:
        span = self.x1 - self.x0
        t = 0.5 if span == 0 else (v - self.x0) / span
        return self.px0 + t * (self.px1 - self.px0)

    def y(self, v: float) -> float:
        span = self.y1 - self.y0
        t = 0.5 if span == 0 else (v - self.y0) / span
        return self.py0 + t * (self.py1 - self.py0)

    def frame_elements(self, title, xlabel, ylabel) -> list:
        out = [
            f'<rect x="0" y="0" width="{self.width:g}" height="{self.height:g}" fill="#ffffff"/>',
            f'<rect x="{_fmt(self.px0)}" y="{_fmt(self.py1)}" width="{_fmt(self.px1 - self.px0)}"'
            f' height="{_fmt(self.py0 - self.py1)}" fill="none" stroke="#000000"/>',
        ]
        if title:
            out.append(
                f'<text x="{_fmt((self.px0 + self.px1) / 2)}" y="18" font-size="13"'
                f' text-anchor="middle" font-family="sans-serif">{title}</text>'
            )
        if xlabel:
            out.append(
                f'<text x="{_fmt((self.px0 + self.px1) / 2)}" y="{_fmt(self.height - 8)}"'
                f' font-size="12" text-anchor="middle" font-family="sans-serif">{xlabel}</text>'
            )
        if ylabel:
            cx, cy = 14.0, (self.py0 + self.py1) / 2
            out.append(
                f'<text x="{_fmt(cx)}" y="{_fmt(cy)}" font-size="12" text-anchor="middle"'
                f' font-family="sans-serif" transform="rotate(-90 {_fmt(cx)} {_fmt(cy)})">{ylabel}</text>'
            )
        return out

    def axis_elements(self) -> list:
        out = []
        if self.logx:
            xticks = list(range(math.ceil(self.x0 - 1e-9), math.floor(self.x1 + 1e-9) + 1))
            while len(xticks) > 8:  # thin dense decade ticks
                xticks = xticks[::2]
        else:
            xticks = _nice_ticks(self.x0, self.x1)
        for t in xticks:
            px = self.x(t)
            out.append(f'<line x1="{_fmt(px)}" y1="{_fmt(self.py0)}" x2="{_fmt(px)}"'
                       f' y2="{_fmt(self.py0 + 4)}" stroke="#000000"/>')
            out.append(f'<text x="{_fmt(px)}" y="{_fmt(self.py0 + 17)}" font-size="10"'
                       f' text-anchor="middle" font-family="sans-serif">{_tick_label(t, self.logx)}</text>')
        if self.logy:
            yticks = list(range(math.ceil(self.y0 - 1e-9), math.floor(self.y1 + 1e-9) + 1))
            while len(yticks) > 8:
                yticks = yticks[::2]
        else:
            yticks = _nice_ticks(self.y0, self.y1)
        for t in yticks:
            py = self.y(t)
            out.append(f'<line x1="{_fmt(self.px0 - 4)}" y1="{_fmt(py)}" x2="{_fmt(self.px0)}"'
                       f' y2="{_fmt(py)}" stroke="#000000"/>')
            out.append(f'<text x="{_fmt(self.px0 - 6)}" y="{_fmt(py + 3)}" font-size="10"'
                       f' text-anchor="end" font-family="sans-serif">{_tick_label(t, self.logy)}</text>')
        return out


def _finite_range(values) -> tuple:
    arr = np.asarray(values, dtype=float)
    arr = arr[np.isfinite(arr)]
    if arr.size == 0:
        return 0.0, 1.0
    lo, hi = float(arr.min()), float(arr.max())
    if hi == lo:
        pad = 0.5 if lo == 0 else abs(lo) * 0.05
        return lo - pad, hi + pad
    pad = 0.04 * (hi - lo)
    return lo - pad, hi + pad


def _to_axis(values, log: bool) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if log:
        with np.errstate(divide="ignore", invalid="ignore"):
            arr = np.where(arr > 0, np.log10(np.abs(arr) + (arr <= 0)), np.nan)
    return arr


def _document(width, height, body) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}"'
            f' height="{height:g}" viewBox="0 0 {width:g} {height:g}">')
    return "\n".join([head, *body, "</svg>"]) + "\n"


def line_plot(series, *, title="", xlabel="", ylabel="", logx=False, logy=False,
              width=640, height=440, markers=True) -> str:
    """Polyline chart.  ``series`` is a sequence of ``(label, xs, ys)``.

    Non-finite points (and non-positive ones on a log axis) break the line
    into segments rather than erroring, so noncentred divergence traces and
    exact-zero errors still plot.  With no drawable data the axes frame is
    still emitted.
    """
    prepared = []
    for label, xs, ys in series:
        prepared.append((str(label), _to_axis(xs, logx), _to_axis(ys, logy)))
    xlim = _finite_range(np.concatenate([p[1] for p in prepared]) if prepared else [])
    ylim = _finite_range(np.concatenate([p[2] for p in prepared]) if prepared else [])
    frame = _Frame(width, height, xlim, ylim, logx, logy)
    body = frame.frame_elements(title, xlabel, ylabel) + frame.axis_elements()
    for k, (label, xs, ys) in enumerate(prepared):
        color = PALETTE[k % len(PALETTE)]
        ok = np.isfinite(xs) & np.isfinite(ys)
        segment = []
        for i in range(len(xs) + 1):
            if i < len(xs) and ok[i]:
                segment.append(f"{_fmt(frame.x(xs[i]))},{_fmt(frame.y(ys[i]))}")
            elif segment:
                if len(segment) > 1:
                    body.append(f'<polyline points="{" ".join(segment)}" fill="none"'
                                f' stroke="{color}" stroke-width="1.5"/>')
                segment = []
        if markers and int(ok.sum()) <= 64:
            for xv, yv in zip(xs[ok], ys[ok]):
                body.append(f'<circle cx="{_fmt(frame.x(xv))}" cy="{_fmt(frame.y(yv))}"'
                            f' r="2.5" fill="{color}"/>')
        ly = frame.py1 + 14 + 14 * k
        body.append(f'<line x1="{_fmt(frame.px1 - 110)}" y1="{_fmt(ly - 4)}"'
                    f' x2="{_fmt(frame.px1 - 92)}" y2="{_fmt(ly - 4)}" stroke="{color}" stroke-width="2"/>')
        body.append(f'<text x="{_fmt(frame.px1 - 88)}" y="{_fmt(ly)}" font-size="10"'
                    f' font-family="sans-serif">{label}</text>')
    return _document(width, height, body)


def heat_map(x_centers, y_centers, values, *, overlays=(), title="", xlabel="",
             ylabel="", log_color=True, width=560, height=470) -> str:
    """Cell-rectangle heat map of ``values[i, j]`` at ``(x_centers[i], y_centers[j])``.

    Colors are normalized on ``log10(value - min + 1e-3)`` by default (the
    objective surfaces span many decades); the top percentile is clipped so
    a few enormous cells cannot wash out the picture.  Non-finite cells are
    drawn grey.  ``overlays`` is a sequence of ``(label, xs, ys, style)``
    with style ``"dots"`` or ``"line"``.
    """
    xc = np.asarray(x_centers, dtype=float)
    yc = np.asarray(y_centers, dtype=float)
    vals = np.asarray(values, dtype=float)
    if vals.shape != (len(xc), len(yc)):
        raise ValueError("values must have shape (len(x_centers), len(y_centers))")
    dx = xc[1] - xc[0] if len(xc) > 1 else 1.0
    dy = yc[1] - yc[0] if len(yc) > 1 else 1.0
    xlim = (xc[0] - dx / 2, xc[-1] + dx / 2)
    ylim = (yc[0] - dy / 2, yc[-1] + dy / 2)
    frame = _Frame(width, height, xlim, ylim, False, False)
    finite = vals[np.isfinite(vals)]
    if finite.size:
        shifted = vals - finite.min() + 1e-3
        scaled = np.where(np.isfinite(shifted), shifted, np.nan)
        if log_color:
            scaled = np.log10(scaled)
        finite_scaled = scaled[np.isfinite(scaled)]
        lo = float(finite_scaled.min())
        hi = float(np.percentile(finite_scaled, 99.0))
        if hi <= lo:
            hi = lo + 1.0
    else:
        scaled = vals
        lo, hi = 0.0, 1.0
    body = frame.frame_elements(title, xlabel, ylabel)
    cell_w = abs(frame.x(xc[0] + dx) - frame.x(xc[0])) + 0.25  # overlap hides seams
    cell_h = abs(frame.y(yc[0] + dy) - frame.y(yc[0])) + 0.25
    for i in range(len(xc)):
        px = frame.x(xc[i] - dx / 2)
        for j in range(len(yc)):
            v = scaled[i, j]
            color = _MISSING if not np.isfinite(v) else _ramp_color((v - lo) / (hi - lo))
            py = frame.y(yc[j] + dy / 2)
            body.append(f'<rect x="{_fmt(px)}" y="{_fmt(py)}" width="{_fmt(cell_w)}"'
                        f' height="{_fmt(cell_h)}" fill="{color}"/>')
    for k, (label, xs, ys, style) in enumerate(overlays):
        color = PALETTE[k % len(PALETTE)]
        pts = [(frame.x(x), frame.y(y)) for x, y in zip(xs, ys)
               if np.isfinite(x) and np.isfinite(y)]
        if style == "line" and len(pts) > 1:
            joined = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in pts)
            body.append(f'<polyline points="{joined}" fill="none" stroke="{color}"'
                        f' stroke-width="2"/>')
        else:
            for a, b in pts:
                body.append(f'<circle cx="{_fmt(a)}" cy="{_fmt(b)}" r="1.6" fill="{color}"/>')
        ly = frame.py1 + 14 + 14 * k
        body.append(f'<text x="{_fmt(frame.px1 - 118)}" y="{_fmt(ly)}" font-size="10"'
                    f' font-family="sans-serif" fill="{color}">{label}</text>')
    body.extend(frame.axis_elements())
    return _document(width, height, body)
