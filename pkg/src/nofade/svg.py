"""Minimal deterministic SVG plots: labelled scatter and bar histogram.

Output depends only on the inputs: no timestamps, ids or random jitter.
Each data mark carries ``data-*`` attributes holding the exact values that
the sibling CSV holds, and a ``<metadata>`` element describes the axes.
"""

from __future__ import annotations

import json
import math
from xml.sax.saxutils import escape, quoteattr

WIDTH = 720
HEIGHT = 480
MARGIN_LEFT = 80
MARGIN_RIGHT = 30
MARGIN_TOP = 40
MARGIN_BOTTOM = 60

MARKERS = ("circle", "square", "triangle", "diamond")
COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

LINEAR = "linear"
LOG10 = "log10"


def _f(v):
    return f"{v:.2f}"


def _nice_step(span, target=5):
    if span <= 0:
        return 1.0
    raw = span / target
    mag = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 2.5, 5, 10):
        if raw <= m * mag:
            return m * mag
    return 10 * mag


class Axis:
    def __init__(self, label, scale, lo, hi, pixel_lo, pixel_hi):
        if scale not in (LINEAR, LOG10):
            raise ValueError(f"unknown axis scale {scale!r}")
        self.label = label
        self.scale = scale
        self.pixel_lo, self.pixel_hi = pixel_lo, pixel_hi
        if scale == LOG10:
            if lo <= 0:
                raise ValueError(f"log axis {label!r} needs positive values, got {lo!r}")
            self.lo = math.floor(math.log10(lo))
            self.hi = math.ceil(math.log10(hi))
            if self.hi == self.lo:
                self.hi += 1
        else:
            lo = min(lo, 0.0)
            step = _nice_step(hi - lo if hi > lo else abs(hi) or 1.0)
            self.lo = math.floor(lo / step) * step
            self.hi = math.ceil(hi / step) * step
            if self.hi <= self.lo:
                self.hi = self.lo + step
            self.step = step

    def position(self, value):
        t = math.log10(value) if self.scale == LOG10 else value
        frac = (t - self.lo) / (self.hi - self.lo)
        return self.pixel_lo + frac * (self.pixel_hi - self.pixel_lo)

    def ticks(self):
        if self.scale == LOG10:
            return [(10.0 ** e, f"1e{e}") for e in range(int(self.lo), int(self.hi) + 1)]
        out = []
        n = int(round((self.hi - self.lo) / self.step))
        for k in range(n + 1):
            v = self.lo + k * self.step
            out.append((v, f"{v:g}"))
        return out

    def meta(self):
        return {"label": self.label, "scale": self.scale}


def _marker(shape, x, y, colour, attrs):
    r = 4.5
    if shape == "circle":
        return f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{r}" fill="{colour}"{attrs}/>'
    if shape == "square":
        return (f'<rect x="{_f(x - r)}" y="{_f(y - r)}" width="{2 * r}" height="{2 * r}" '
                f'fill="{colour}"{attrs}/>')
    if shape == "triangle":
        pts = f"{_f(x)},{_f(y - r)} {_f(x - r)},{_f(y + r)} {_f(x + r)},{_f(y + r)}"
    else:
        pts = f"{_f(x)},{_f(y - r)} {_f(x + r)},{_f(y)} {_f(x)},{_f(y + r)} {_f(x - r)},{_f(y)}"
    return f'<polygon points="{pts}" fill="{colour}"{attrs}/>'


def _frame(title, xaxis, yaxis, meta):
    x0, x1 = MARGIN_LEFT, WIDTH - MARGIN_RIGHT
    y0, y1 = HEIGHT - MARGIN_BOTTOM, MARGIN_TOP
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f"<metadata>{escape(json.dumps(meta, sort_keys=True))}</metadata>",
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="{MARGIN_TOP / 2 + 4}" text-anchor="middle" font-size="14">'
        f"{escape(title)}</text>",
        f'<g class="axes" stroke="black" stroke-width="1">'
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/>'
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/></g>',
    ]
    ticks = ['<g class="ticks">']
    for v, text in xaxis.ticks():
        px = xaxis.position(v)
        ticks.append(f'<line x1="{_f(px)}" y1="{y0}" x2="{_f(px)}" y2="{y0 + 5}" stroke="black"/>'
                     f'<text x="{_f(px)}" y="{y0 + 18}" text-anchor="middle">{escape(text)}</text>')
    for v, text in yaxis.ticks():
        py = yaxis.position(v)
        ticks.append(f'<line x1="{x0 - 5}" y1="{_f(py)}" x2="{x0}" y2="{_f(py)}" stroke="black"/>'
                     f'<text x="{x0 - 8}" y="{_f(py + 4)}" text-anchor="end">{escape(text)}</text>')
    ticks.append("</g>")
    parts.extend(ticks)
    xlabel = xaxis.label + (" (log scale)" if xaxis.scale == LOG10 else "")
    ylabel = yaxis.label + (" (log scale)" if yaxis.scale == LOG10 else "")
    parts.append(f'<text class="x-label" x="{(x0 + x1) / 2}" y="{HEIGHT - 15}" '
                 f'text-anchor="middle">{escape(xlabel)}</text>')
    parts.append(f'<text class="y-label" x="18" y="{(y0 + y1) / 2}" text-anchor="middle" '
                 f'transform="rotate(-90 18 {(y0 + y1) / 2})">{escape(ylabel)}</text>')
    return parts


def scatter_svg(points, title, x_label, y_label, x_scale=LINEAR, y_scale=LINEAR):
    """Labelled scatter plot.

    ``points`` is a sequence of dicts with keys ``label``, ``group``, ``x``,
    ``y`` and ``x_text``/``y_text`` (the CSV strings of x and y). Each group
    gets its own marker shape.
    """
    if not points:
        raise ValueError("scatter plot needs at least one point")
    xs = [p["x"] for p in points]
    ys = [p["y"] for p in points]
    xaxis = Axis(x_label, x_scale, min(xs), max(xs), MARGIN_LEFT + 10, WIDTH - MARGIN_RIGHT - 10)
    yaxis = Axis(y_label, y_scale, min(ys), max(ys), HEIGHT - MARGIN_BOTTOM - 10, MARGIN_TOP + 10)
    groups = sorted({p["group"] for p in points})
    style = {g: (MARKERS[i % len(MARKERS)], COLOURS[i % len(COLOURS)]) for i, g in enumerate(groups)}
    meta = {"kind": "scatter", "x_axis": xaxis.meta(), "y_axis": yaxis.meta(),
            "point_count": len(points), "groups": groups}
    parts = _frame(title, xaxis, yaxis, meta)

    parts.append('<g class="points">')
    for p in points:
        px, py = xaxis.position(p["x"]), yaxis.position(p["y"])
        shape, colour = style[p["group"]]
        attrs = (f' class="point" data-label={quoteattr(p["label"])} data-group={quoteattr(p["group"])}'
                 f' data-x={quoteattr(p["x_text"])} data-y={quoteattr(p["y_text"])}')
        parts.append(_marker(shape, px, py, colour, attrs))
        parts.append(f'<text class="point-label" x="{_f(px + 7)}" y="{_f(py - 6)}">'
                     f'{escape(p["label"])}</text>')
    parts.append("</g>")

    if len(groups) > 1:
        parts.append('<g class="legend">')
        for i, g in enumerate(groups):
            shape, colour = style[g]
            lx, ly = WIDTH - MARGIN_RIGHT - 140, MARGIN_TOP + 12 + 16 * i
            parts.append(_marker(shape, lx, ly, colour, ""))
            parts.append(f'<text x="{lx + 10}" y="{ly + 4}">{escape(g)}</text>')
        parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def histogram_svg(edges, counts, count_texts, title, x_label="entropy (bits)", y_label="image count"):
    """Bar chart over contiguous bins ``edges[k]..edges[k + 1]``."""
    if len(edges) != len(counts) + 1:
        raise ValueError("need one more edge than counts")
    xaxis = Axis(x_label, LINEAR, edges[0], edges[-1], MARGIN_LEFT, WIDTH - MARGIN_RIGHT)
    yaxis = Axis(y_label, LINEAR, 0.0, max(max(counts), 1), HEIGHT - MARGIN_BOTTOM, MARGIN_TOP + 10)
    meta = {"kind": "histogram", "x_axis": xaxis.meta(), "y_axis": yaxis.meta(),
            "bin_count": len(counts)}
    parts = _frame(title, xaxis, yaxis, meta)
    parts.append('<g class="bars" fill="#4c72b0">')
    base = yaxis.position(0.0)
    for k, (c, text) in enumerate(zip(counts, count_texts)):
        left, right = xaxis.position(edges[k]), xaxis.position(edges[k + 1])
        top = yaxis.position(c)
        parts.append(f'<rect class="bar" x="{_f(left)}" y="{_f(top)}" width="{_f(right - left)}" '
                     f'height="{_f(base - top)}" data-bin="{k}" data-count={quoteattr(text)}/>')
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
