"""Deterministic SVG renderings of the three aggregate plots.

Every data point becomes exactly one mark element (``rect.bar`` for non-empty
histogram bins, ``circle`` for scatter points), so tests can count them.
Coordinates are printed with fixed precision; identical inputs give
identical bytes.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .stats import ArchitectureReport, top_fraction_episodes

KINDS = ("mean-histogram", "rank-scatter", "variance-vs-mean")

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 40, 50
EPISODE_COLOR = "#7f7f7f"
TOP_COLOR = "#2ca02c"
MEAN_COLOR = "#000000"
BAR_COLOR = "#1f77b4"


class PlotSpecError(ValueError):
    pass


@dataclass(frozen=True)
class PlotSpec:
    kind: str
    x_range: tuple = None
    y_range: tuple = None
    highlight_fraction: float = 0.001
    title: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotSpecError(f"unknown plot kind {self.kind!r}; choose from {KINDS}")
        for name in ("x_range", "y_range"):
            r = getattr(self, name)
            if r is not None:
                if len(r) != 2 or not all(math.isfinite(v) for v in r) or not r[0] < r[1]:
                    raise PlotSpecError(f"{name} must be a finite (lo, hi) with lo < hi, got {r!r}")
        if not 0 < self.highlight_fraction <= 1:
            raise PlotSpecError(f"highlight_fraction must lie in (0, 1], got {self.highlight_fraction}")


def _f(v: float) -> str:
    return f"{v:.2f}"


def _span(values, given=None, pad=0.0):
    if given is not None:
        return float(given[0]), float(given[1])
    lo, hi = float(np.min(values)), float(np.max(values))
    if lo == hi:
        return lo - 0.5, hi + 0.5
    margin = (hi - lo) * pad
    return lo - margin, hi + margin


def _ticks(lo, hi, count=5):
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


class _Canvas:
    def __init__(self, xr, yr, title, xlabel, ylabel, ylog=False):
        self.xr, self.yr, self.ylog = xr, yr, ylog
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}">',
            f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        ]
        if title:
            self.parts.append(f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
        self._axes(xlabel, ylabel)
        self.parts.append('<g class="marks">')

    def x(self, v):
        lo, hi = self.xr
        return LEFT + (v - lo) / (hi - lo) * (WIDTH - LEFT - RIGHT)

    def y(self, v):
        lo, hi = self.yr
        if self.ylog:
            v, lo, hi = math.log10(v), math.log10(lo), math.log10(hi)
        return HEIGHT - BOTTOM - (v - lo) / (hi - lo) * (HEIGHT - TOP - BOTTOM)

    def _axes(self, xlabel, ylabel):
        x0, x1 = LEFT, WIDTH - RIGHT
        y0, y1 = HEIGHT - BOTTOM, TOP
        p = self.parts
        p.append('<g class="axes" stroke="#000000" stroke-width="1" fill="none">')
        p.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/>')
        p.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/>')
        p.append("</g>")
        p.append('<g class="ticks" font-size="10" fill="#000000">')
        for v in _ticks(*self.xr):
            p.append(f'<text x="{_f(self.x(v))}" y="{y0 + 15}" text-anchor="middle">{v:.4g}</text>')
        if self.ylog:
            lo, hi = math.ceil(math.log10(self.yr[0])), math.floor(math.log10(self.yr[1]))
            yticks = [10.0**k for k in range(lo, hi + 1)]
        else:
            yticks = _ticks(*self.yr)
        for v in yticks:
            p.append(f'<text x="{x0 - 6}" y="{_f(self.y(v) + 3)}" text-anchor="end">{v:.4g}</text>')
        p.append("</g>")
        p.append(f'<text x="{(x0 + x1) / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>')
        p.append(
            f'<text x="16" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" font-size="12" '
            f'transform="rotate(-90 16 {(y0 + y1) / 2:.1f})">{escape(ylabel)}</text>'
        )

    def add(self, element):
        self.parts.append(element)

    def finish(self) -> str:
        return "\n".join(self.parts + ["</g>", "</svg>"]) + "\n"


def _mean_histogram(report: ArchitectureReport, plot: PlotSpec) -> str:
    edges, counts = report.histogram.edges, report.histogram.counts
    xr = _span(edges, plot.x_range)
    # log axis: start below 1 so single-count bins stay visible
    yr = plot.y_range or (0.5, max(2.0, float(counts.max()) * 2.0))
    if yr[0] <= 0:
        raise PlotSpecError("log-scale histogram needs a positive lower y bound")
    c = _Canvas(xr, yr, plot.title, "mean score", "count (log)", ylog=True)
    base = c.y(yr[0])
    for lo, hi, n in zip(edges[:-1], edges[1:], counts):
        if n == 0:
            continue  # log(0) undefined: empty bins are drawn as gaps
        top = c.y(float(n))
        c.add(
            f'<rect class="bar" x="{_f(c.x(lo))}" y="{_f(top)}" width="{_f(c.x(hi) - c.x(lo))}" '
            f'height="{_f(base - top)}" fill="{BAR_COLOR}" stroke="#ffffff" stroke-width="0.5"/>'
        )
    return c.finish()


def _rank_scatter(S, report: ArchitectureReport, plot: PlotSpec) -> str:
    S = np.asarray(S, dtype=np.float64)
    order = report.stats.order
    top = top_fraction_episodes(S, plot.highlight_fraction)
    highlighted = np.zeros(S.shape, dtype=bool)
    highlighted[top[:, 0], top[:, 1]] = True
    xr = plot.x_range or (-0.5, max(S.shape[0] - 0.5, 0.5))
    yr = _span(S, plot.y_range, pad=0.02)
    c = _Canvas(xr, yr, plot.title, "rank (sorted by mean score)", "episode score")
    later = []
    for rank, n in enumerate(order):
        cx = _f(c.x(rank))
        for e in range(S.shape[1]):
            mark = f'<circle cx="{cx}" cy="{_f(c.y(S[n, e]))}" r="1.2" class="%s" fill="%s"/>'
            if highlighted[n, e]:
                later.append(mark % ("episode top", TOP_COLOR))
            else:
                c.add(mark % ("episode", EPISODE_COLOR))
    for m in later:  # green marks on top
        c.add(m)
    means = report.stats.mean[order]
    pts = " ".join(f"{_f(c.x(r))},{_f(c.y(m))}" for r, m in enumerate(means))
    c.add(f'<polyline class="mean" points="{pts}" fill="none" stroke="{MEAN_COLOR}" stroke-width="1.5"/>')
    return c.finish()


def _variance_vs_mean(report: ArchitectureReport, plot: PlotSpec) -> str:
    mean, var = report.stats.mean, report.stats.variance
    xr = _span(mean, plot.x_range, pad=0.02)
    yr = _span(var, plot.y_range, pad=0.02)
    c = _Canvas(xr, yr, plot.title, "mean score", "score variance")
    for m, v in zip(mean, var):
        c.add(f'<circle cx="{_f(c.x(m))}" cy="{_f(c.y(v))}" r="1.5" class="sample" fill="{BAR_COLOR}"/>')
    return c.finish()


def render_svg(S, report: ArchitectureReport, plot: PlotSpec, destination=None) -> str:
    """Render one plot of one architecture; writes it when ``destination`` is given."""
    if not isinstance(plot, PlotSpec):
        raise PlotSpecError("plot must be a PlotSpec")
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != report.stats.mean.size:
        raise PlotSpecError("score slice does not match the report's sample count")
    if plot.kind == "mean-histogram":
        svg = _mean_histogram(report, plot)
    elif plot.kind == "rank-scatter":
        svg = _rank_scatter(S, report, plot)
    else:
        svg = _variance_vs_mean(report, plot)
    if destination is not None:
        with open(os.fspath(destination), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(svg)
    return svg
