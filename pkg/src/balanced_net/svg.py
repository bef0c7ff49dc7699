"""Dependency-free SVG line plots.

Emits standalone SVG 1.1, 800x500, linear axes auto-scaled with a 5% margin,
one polyline per series and a legend.  All coordinates are formatted with a
fixed precision so identical inputs give identical bytes.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence, Tuple, Union

import numpy as np

WIDTH, HEIGHT = 800, 500
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 25, 35, 50
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _span(lo: float, hi: float) -> Tuple[float, float]:
    if hi < lo:
        lo, hi = hi, lo
    pad = 0.05 * (hi - lo)
    if pad == 0.0:
        pad = 0.5 if hi == 0.0 else 0.05 * abs(hi)
    return lo - pad, hi + pad


def _num(x: float) -> str:
    return f"{x:.6g}"


def emit_svg(series: Sequence[Tuple[str, np.ndarray, np.ndarray]],
             path: Union[str, Path], title: str = "",
             xlabel: str = "t", ylabel: str = "") -> Path:
    """Write line plots for ``series`` = [(label, x, y), ...] to ``path``."""
    if not series:
        raise ValueError("series must be non-empty")
    for label, xs, ys in series:
        if len(xs) != len(ys):
            raise ValueError(f"series {label!r}: x/y length mismatch")
        if len(xs) == 0:
            raise ValueError(f"series {label!r}: empty")

    x_lo, x_hi = _span(min(float(np.min(s[1])) for s in series),
                       max(float(np.max(s[1])) for s in series))
    y_lo, y_hi = _span(min(float(np.min(s[2])) for s in series),
                       max(float(np.max(s[2])) for s in series))
    px_w = WIDTH - MARGIN_L - MARGIN_R
    px_h = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x):
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * px_w

    def sy(y):
        return HEIGHT - MARGIN_B - (y - y_lo) / (y_hi - y_lo) * px_h

    out = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
               f'width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">')
    out.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="15">{title}</text>')
    # axes box and ticks
    out.append(f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{px_w}" height="{px_h}" '
               f'fill="none" stroke="#444444" stroke-width="1"/>')
    for i in range(5):
        xv = x_lo + (x_hi - x_lo) * i / 4
        yv = y_lo + (y_hi - y_lo) * i / 4
        xp = sx(xv)
        yp = sy(yv)
        out.append(f'<line x1="{xp:.2f}" y1="{HEIGHT - MARGIN_B}" x2="{xp:.2f}" '
                   f'y2="{HEIGHT - MARGIN_B + 5}" stroke="#444444"/>')
        out.append(f'<text x="{xp:.2f}" y="{HEIGHT - MARGIN_B + 18}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{_num(xv)}</text>')
        out.append(f'<line x1="{MARGIN_L - 5}" y1="{yp:.2f}" x2="{MARGIN_L}" '
                   f'y2="{yp:.2f}" stroke="#444444"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{yp + 4:.2f}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{_num(yv)}</text>')
    if xlabel:
        out.append(f'<text x="{MARGIN_L + px_w / 2:.1f}" y="{HEIGHT - 12}" '
                   f'text-anchor="middle" font-family="sans-serif" font-size="13">{xlabel}</text>')
    if ylabel:
        out.append(f'<text x="18" y="{MARGIN_T + px_h / 2:.1f}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="13" '
                   f'transform="rotate(-90 18 {MARGIN_T + px_h / 2:.1f})">{ylabel}</text>')
    # series
    for k, (label, xs, ys) in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        pts = " ".join(f"{sx(float(x)):.2f},{sy(float(y)):.2f}"
                       for x, y in zip(np.asarray(xs), np.asarray(ys)))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                   f'stroke-width="1.5"/>')
    # legend
    lx = WIDTH - MARGIN_R - 190
    ly = MARGIN_T + 12
    for k, (label, _, _) in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        yk = ly + 18 * k
        out.append(f'<line x1="{lx}" y1="{yk}" x2="{lx + 24}" y2="{yk}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 30}" y="{yk + 4}" font-family="sans-serif" '
                   f'font-size="12">{label}</text>')
    out.append("</svg>")
    p = Path(path)
    p.write_text("\n".join(out) + "\n", newline="\n")
    return p
