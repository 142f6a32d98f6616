"""Minimal static SVG line plots.

Hand-rolled so that rendered files are byte-deterministic; no plotting
dependency is worth it for two curve styles.
"""
from __future__ import annotations

import math

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 30, 50


def _fmt(v: float) -> str:
    return format(v, ".6g")


def line_plot_svg(xs, ys, *, title: str, xlabel: str, ylabel: str, log_y: bool = False) -> str:
    """One polyline over labeled axes; ``log_y`` plots log10 of the values."""
    pts = [(float(x), float(y)) for x, y in zip(xs, ys)]
    if log_y:
        pts = [(x, math.log10(y)) for x, y in pts if y > 0]
    if not pts:
        pts = [(0.0, 0.0)]
    x_lo = min(p[0] for p in pts)
    x_hi = max(p[0] for p in pts)
    y_lo = min(p[1] for p in pts)
    y_hi = max(p[1] for p in pts)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x):
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y):
        return MARGIN_T + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h

    poly = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
    y_label_lo = f"1e{_fmt(y_lo)}" if log_y else _fmt(y_lo)
    y_label_hi = f"1e{_fmt(y_hi)}" if log_y else _fmt(y_hi)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" '
        f'y2="{HEIGHT - MARGIN_B}" stroke="black"/>',
        f'<line x1="{MARGIN_L}" y1="{HEIGHT - MARGIN_B}" x2="{WIDTH - MARGIN_R}" '
        f'y2="{HEIGHT - MARGIN_B}" stroke="black"/>',
        f'<text x="{WIDTH // 2}" y="{HEIGHT - 12}" text-anchor="middle" '
        f'font-size="12">{xlabel}</text>',
        f'<text x="18" y="{HEIGHT // 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 18 {HEIGHT // 2})">{ylabel}</text>',
        f'<text x="{MARGIN_L - 6}" y="{HEIGHT - MARGIN_B}" text-anchor="end" '
        f'font-size="10">{y_label_lo}</text>',
        f'<text x="{MARGIN_L - 6}" y="{MARGIN_T + 10}" text-anchor="end" '
        f'font-size="10">{y_label_hi}</text>',
        f'<text x="{MARGIN_L}" y="{HEIGHT - MARGIN_B + 16}" text-anchor="middle" '
        f'font-size="10">{_fmt(x_lo)}</text>',
        f'<text x="{WIDTH - MARGIN_R}" y="{HEIGHT - MARGIN_B + 16}" text-anchor="middle" '
        f'font-size="10">{_fmt(x_hi)}</text>',
        f'<polyline points="{poly}" fill="none" stroke="#1f6fb2" stroke-width="1.5"/>',
        "</svg>",
    ]
    return "\n".join(parts) + "\n"
