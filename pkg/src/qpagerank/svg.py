"""Minimal static SVG charts: grouped bars, line curves, log-log fits, heatmaps.

Plots only read the arrays they are given; they never modify numeric outputs.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"]

W, H = 640, 400
ML, MR, MT, MB = 64, 150, 30, 48


def _doc(body: list[str], title: str) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">'
    )
    t = f'<text x="{W / 2:.1f}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>'
    return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', t, *body, "</svg>"]) + "\n"


class _Axes:
    def __init__(self, xlo, xhi, ylo, yhi):
        if xhi == xlo:
            xhi = xlo + 1
        if yhi == ylo:
            yhi = ylo + 1
        self.xlo, self.xhi, self.ylo, self.yhi = xlo, xhi, ylo, yhi
        self.pw = W - ML - MR
        self.ph = H - MT - MB

    def x(self, v):
        return ML + (v - self.xlo) / (self.xhi - self.xlo) * self.pw

    def y(self, v):
        return MT + (1 - (v - self.ylo) / (self.yhi - self.ylo)) * self.ph

    def frame(self, xlabel, ylabel, xticks=None, yticks=None, xfmt="{:.3g}", yfmt="{:.3g}"):
        out = [
            f'<rect x="{ML}" y="{MT}" width="{self.pw}" height="{self.ph}" fill="none" stroke="black"/>',
            f'<text x="{ML + self.pw / 2:.1f}" y="{H - 10}" text-anchor="middle">{escape(xlabel)}</text>',
            f'<text x="14" y="{MT + self.ph / 2:.1f}" text-anchor="middle" '
            f'transform="rotate(-90 14 {MT + self.ph / 2:.1f})">{escape(ylabel)}</text>',
        ]
        if xticks is None:
            xticks = np.linspace(self.xlo, self.xhi, 5)
        if yticks is None:
            yticks = np.linspace(self.ylo, self.yhi, 5)
        for t in xticks:
            px = self.x(t)
            out.append(f'<line x1="{px:.1f}" y1="{MT + self.ph}" x2="{px:.1f}" y2="{MT + self.ph + 4}" stroke="black"/>')
            out.append(f'<text x="{px:.1f}" y="{MT + self.ph + 16}" text-anchor="middle">{xfmt.format(t)}</text>')
        for t in yticks:
            py = self.y(t)
            out.append(f'<line x1="{ML - 4}" y1="{py:.1f}" x2="{ML}" y2="{py:.1f}" stroke="black"/>')
            out.append(f'<text x="{ML - 6}" y="{py + 4:.1f}" text-anchor="end">{yfmt.format(t)}</text>')
        return out


def _legend(names) -> list[str]:
    out = []
    for k, name in enumerate(names):
        y = MT + 12 + 16 * k
        c = PALETTE[k % len(PALETTE)]
        out.append(f'<rect x="{W - MR + 12}" y="{y - 8}" width="10" height="10" fill="{c}"/>')
        out.append(f'<text x="{W - MR + 28}" y="{y + 1}">{escape(str(name))}</text>')
    return out


def bar_chart(series: dict, title: str = "", xlabel: str = "node", ylabel: str = "PageRank", labels=None) -> str:
    """Grouped bars, one group per node and one bar per series."""
    names = list(series)
    data = np.array([np.asarray(series[k], dtype=float) for k in names])
    n = data.shape[1]
    ax = _Axes(-0.5, n - 0.5, 0.0, float(data.max()) * 1.05 if data.size else 1.0)
    labels = labels if labels is not None else [str(i) for i in range(n)]
    ticks = range(n) if n <= 40 else range(0, n, max(1, n // 20))
    body = ax.frame(xlabel, ylabel, xticks=[], yticks=None)
    for i in ticks:
        body.append(f'<text x="{ax.x(i):.1f}" y="{MT + ax.ph + 16}" text-anchor="middle">{escape(labels[i])}</text>')
    width = 0.8 / len(names)
    for s, name in enumerate(names):
        c = PALETTE[s % len(PALETTE)]
        for i in range(n):
            x0 = ax.x(i - 0.4 + s * width)
            x1 = ax.x(i - 0.4 + (s + 1) * width)
            y = ax.y(data[s, i])
            body.append(
                f'<rect x="{x0:.2f}" y="{y:.2f}" width="{max(x1 - x0, 0.5):.2f}" '
                f'height="{ax.y(0) - y:.2f}" fill="{c}"/>'
            )
    body += _legend(names)
    return _doc(body, title)


def line_chart(x, series: dict, title: str = "", xlabel: str = "alpha", ylabel: str = "fidelity") -> str:
    x = np.asarray(x, dtype=float)
    names = list(series)
    ys = [np.asarray(series[k], dtype=float) for k in names]
    lo = min(float(y.min()) for y in ys)
    hi = max(float(y.max()) for y in ys)
    pad = 0.02 * (hi - lo or 1.0)
    ax = _Axes(float(x.min()), float(x.max()), lo - pad, hi + pad)
    body = ax.frame(xlabel, ylabel)
    for s, y in enumerate(ys):
        pts = " ".join(f"{ax.x(a):.2f},{ax.y(b):.2f}" for a, b in zip(x, y))
        body.append(f'<polyline points="{pts}" fill="none" stroke="{PALETTE[s % len(PALETTE)]}" stroke-width="1.5"/>')
    body += _legend(names)
    return _doc(body, title)


def loglog_chart(series: dict, fits: dict | None = None, title: str = "", xlabel: str = "log i", ylabel: str = "log I") -> str:
    """Sorted distributions on log axes with optional fit lines and tail-cut markers.

    ``fits`` maps a series name to ``(beta, intercept, cut_index)``.
    """
    names = list(series)
    ys = [np.log(np.asarray(series[k], dtype=float)) for k in names]
    n = max(len(y) for y in ys)
    xs = np.log(np.arange(1, n + 1))
    lo = min(float(y.min()) for y in ys)
    hi = max(float(y.max()) for y in ys)
    ax = _Axes(0.0, float(xs[-1]) if n > 1 else 1.0, lo - 0.1, hi + 0.1)
    body = ax.frame(xlabel, ylabel)
    for s, y in enumerate(ys):
        c = PALETTE[s % len(PALETTE)]
        for a, b in zip(xs, y):
            body.append(f'<circle cx="{ax.x(a):.2f}" cy="{ax.y(b):.2f}" r="2" fill="{c}"/>')
        if fits and names[s] in fits:
            beta, icpt, cut = fits[names[s]]
            xe = xs[(cut or len(y)) - 1]
            body.append(
                f'<line x1="{ax.x(0):.2f}" y1="{ax.y(icpt):.2f}" x2="{ax.x(xe):.2f}" '
                f'y2="{ax.y(icpt - beta * xe):.2f}" stroke="{c}" stroke-dasharray="4 2"/>'
            )
            if cut is not None:
                xc = ax.x(math.log(cut + 1))
                body.append(f'<line x1="{xc:.2f}" y1="{MT}" x2="{xc:.2f}" y2="{MT + ax.ph}" stroke="{c}" stroke-dasharray="1 3"/>')
    body += _legend(names)
    return _doc(body, title)


def _color(v: float, lo: float, hi: float) -> str:
    t = 0.0 if hi <= lo else min(max((v - lo) / (hi - lo), 0.0), 1.0)
    # dark blue -> yellow
    r = int(round(30 + t * (250 - 30)))
    g = int(round(30 + t * (230 - 30)))
    b = int(round(120 + t * (40 - 120)))
    return f"#{r:02x}{g:02x}{b:02x}"


def heatmap(alphas, M, title: str = "", label: str = "fidelity") -> str:
    alphas = np.asarray(alphas, dtype=float)
    M = np.asarray(M, dtype=float)
    k = len(alphas)
    lo, hi = float(M.min()), float(M.max())
    size = min(W - ML - MR, H - MT - MB)
    cell = size / k
    ax = _Axes(float(alphas[0]), float(alphas[-1]), float(alphas[0]), float(alphas[-1]))
    ax.pw = ax.ph = size
    body = []
    for i in range(k):
        for j in range(k):
            body.append(
                f'<rect x="{ML + j * cell:.2f}" y="{MT + (k - 1 - i) * cell:.2f}" '
                f'width="{cell + 0.05:.2f}" height="{cell + 0.05:.2f}" fill="{_color(M[i, j], lo, hi)}"/>'
            )
    body += ax.frame("alpha", "alpha'")
    bx = ML + size + 20
    for s in range(21):
        v = lo + (hi - lo) * s / 20
        body.append(f'<rect x="{bx}" y="{MT + size - (s + 1) * size / 21:.2f}" width="14" height="{size / 21 + 0.5:.2f}" fill="{_color(v, lo, hi)}"/>')
    body.append(f'<text x="{bx + 18}" y="{MT + size:.1f}">{lo:.3f}</text>')
    body.append(f'<text x="{bx + 18}" y="{MT + 10}">{hi:.3f}</text>')
    body.append(f'<text x="{bx}" y="{MT + size + 20:.1f}">{escape(label)}</text>')
    return _doc(body, title)
