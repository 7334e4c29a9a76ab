"""
Self-contained SVG plots: line plots of checkpoint traces and labelled
scatter plots of traffic positions. Output is plain SVG text with fixed
number formatting, so identical inputs give identical files.
"""
from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

WIDTH = 640
HEIGHT = 420
MARGIN = 50

# lowest class first; matches the green/blue/red reading of class ranks
CLASS_COLORS = ["#2ca02c", "#1f77b4", "#d62728", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"]
SERIES_COLORS = ["#1f77b4", "#d62728", "#2ca02c"]


def _scale(values: np.ndarray, lo: float, hi: float, out_lo: float, out_hi: float) -> np.ndarray:
    span = hi - lo if hi > lo else 1.0
    return out_lo + (values - lo) / span * (out_hi - out_lo)


def _frame(title: str, xlabel: str, ylabel: str) -> List[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="22" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14">{escape(title)}</text>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT - 12}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="12">{escape(xlabel)}</text>',
        f'<text x="14" y="{HEIGHT / 2:.0f}" text-anchor="middle" font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 14 {HEIGHT / 2:.0f})">{escape(ylabel)}</text>',
    ]


def _ticks(lo: float, hi: float, axis: str) -> List[str]:
    out = []
    for frac in (0.0, 0.5, 1.0):
        value = lo + frac * (hi - lo)
        if axis == "x":
            px = MARGIN + frac * (WIDTH - 2 * MARGIN)
            out.append(f'<text x="{px:.1f}" y="{HEIGHT - MARGIN + 16}" text-anchor="middle" '
                       f'font-family="sans-serif" font-size="10">{value:.4g}</text>')
        else:
            py = HEIGHT - MARGIN - frac * (HEIGHT - 2 * MARGIN)
            out.append(f'<text x="{MARGIN - 4}" y="{py + 3:.1f}" text-anchor="end" '
                       f'font-family="sans-serif" font-size="10">{value:.4g}</text>')
    return out


def line_plot(
    x: Sequence[float],
    series: Dict[str, Sequence[float]],
    title: str = "",
    xlabel: str = "k",
    ylabel: str = "",
) -> str:
    """Polylines sharing one x axis; each series is scaled to the common y range."""
    xs = np.asarray(x, dtype=float)
    ys_all = np.concatenate([np.asarray(v, dtype=float) for v in series.values()]) if series else np.zeros(1)
    x_lo, x_hi = (float(xs.min()), float(xs.max())) if xs.size else (0.0, 1.0)
    y_lo, y_hi = 0.0, float(np.max(ys_all)) if ys_all.size else 1.0
    parts = _frame(title, xlabel, ylabel) + _ticks(x_lo, x_hi, "x") + _ticks(y_lo, y_hi, "y")
    px = _scale(xs, x_lo, x_hi, MARGIN, WIDTH - MARGIN)
    for idx, (name, values) in enumerate(series.items()):
        py = _scale(np.asarray(values, dtype=float), y_lo, y_hi, HEIGHT - MARGIN, MARGIN)
        points = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
        color = SERIES_COLORS[idx % len(SERIES_COLORS)]
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>')
        parts.append(f'<text x="{WIDTH - MARGIN}" y="{MARGIN + 14 * idx}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11" fill="{color}">{escape(name)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def scatter_plot(
    xy: np.ndarray,
    labels: Sequence[int],
    title: str = "",
    legend: Optional[Sequence[str]] = None,
    bounds: Optional[Tuple[float, float, float, float]] = None,
) -> str:
    """Points colored by 1-based class label."""
    xy = np.asarray(xy, dtype=float).reshape(-1, 2)
    labels = np.asarray(labels, dtype=int)
    if bounds is None:
        bounds = (float(xy[:, 0].min()), float(xy[:, 0].max()), float(xy[:, 1].min()), float(xy[:, 1].max()))
    x_lo, x_hi, y_lo, y_hi = bounds
    parts = _frame(title, "x", "y") + _ticks(x_lo, x_hi, "x") + _ticks(y_lo, y_hi, "y")
    px = _scale(xy[:, 0], x_lo, x_hi, MARGIN, WIDTH - MARGIN)
    py = _scale(xy[:, 1], y_lo, y_hi, HEIGHT - MARGIN, MARGIN)
    for a, b, label in zip(px, py, labels):
        color = CLASS_COLORS[(int(label) - 1) % len(CLASS_COLORS)]
        parts.append(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="1.6" fill="{color}"/>')
    for idx, name in enumerate(legend or []):
        color = CLASS_COLORS[idx % len(CLASS_COLORS)]
        parts.append(f'<text x="{WIDTH - MARGIN}" y="{MARGIN + 14 * idx}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11" fill="{color}">{escape(name)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
