"""Static SVG rendering of required animals versus typicality bound."""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

from .conjunction import Figure1Row

WIDTH, HEIGHT = 640, 480
LEFT, RIGHT, TOP, BOTTOM = 70, 30, 40, 60

REAL_COLOR = "#1f4fd1"
INT_COLOR = "#d11f1f"


def _nice_step(span: float, target_ticks: int = 6) -> float:
    raw = span / target_ticks
    mag = 10 ** math.floor(math.log10(raw))
    for mult in (1, 2, 5, 10):
        if mult * mag >= raw:
            return mult * mag
    return 10 * mag


def render_svg(rows: Sequence[Figure1Row], title: str = "") -> str:
    """Real-valued curve and whole-animal staircase as two polylines."""
    if not rows:
        raise ValueError("no rows to plot")
    x_lo, x_hi = 0.0, 1.0
    y_top = max(r.n_int for r in rows)
    y_step = _nice_step(y_top)
    y_hi = math.ceil(y_top / y_step) * y_step
    plot_w = WIDTH - LEFT - RIGHT
    plot_h = HEIGHT - TOP - BOTTOM

    def sx(x: float) -> float:
        return LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return TOP + plot_h - y / y_hi * plot_h

    def pts(points) -> str:
        return " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in points)

    real = [(r.gamma_c, r.n_real) for r in rows]
    stairs = [(rows[0].gamma_c, rows[0].n_int)]
    for prev, cur in zip(rows, rows[1:]):
        stairs.append((cur.gamma_c, prev.n_int))
        stairs.append((cur.gamma_c, cur.n_int))

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.2f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')

    out.append('<g id="axes" stroke="black" stroke-width="1">')
    out.append(f'<line x1="{LEFT}" y1="{TOP + plot_h}" x2="{LEFT + plot_w}" y2="{TOP + plot_h}"/>')
    out.append(f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + plot_h}"/>')
    out.append("</g>")

    out.append('<g id="ticks" text-anchor="middle">')
    for i in range(11):
        x = i / 10
        out.append(f'<line x1="{sx(x):.2f}" y1="{TOP + plot_h}" x2="{sx(x):.2f}" y2="{TOP + plot_h + 5}" stroke="black"/>')
        out.append(f'<text x="{sx(x):.2f}" y="{TOP + plot_h + 18}">{x:.1f}</text>')
    n_yticks = int(round(y_hi / y_step))
    for i in range(n_yticks + 1):
        y = i * y_step
        out.append(f'<line x1="{LEFT - 5}" y1="{sy(y):.2f}" x2="{LEFT}" y2="{sy(y):.2f}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{sy(y) + 4:.2f}" text-anchor="end">{y:g}</text>')
    out.append("</g>")

    out.append(
        f'<text id="x-label" x="{LEFT + plot_w / 2:.2f}" y="{HEIGHT - 15}" text-anchor="middle">'
        "lower bound on typicality (gamma_c)</text>"
    )
    out.append(
        f'<text id="y-label" x="18" y="{TOP + plot_h / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {TOP + plot_h / 2:.2f})">number of animals required (N)</text>'
    )

    out.append(f'<polyline id="n-real" fill="none" stroke="{REAL_COLOR}" stroke-width="1.5" points="{pts(real)}"/>')
    out.append(f'<polyline id="n-int" fill="none" stroke="{INT_COLOR}" stroke-width="1.5" points="{pts(stairs)}"/>')

    lx = LEFT + 15
    out.append('<g id="legend">')
    out.append(f'<line x1="{lx}" y1="{TOP + 10}" x2="{lx + 25}" y2="{TOP + 10}" stroke="{REAL_COLOR}" stroke-width="1.5"/>')
    out.append(f'<text x="{lx + 32}" y="{TOP + 14}">real-valued N</text>')
    out.append(f'<line x1="{lx}" y1="{TOP + 28}" x2="{lx + 25}" y2="{TOP + 28}" stroke="{INT_COLOR}" stroke-width="1.5"/>')
    out.append(f'<text x="{lx + 32}" y="{TOP + 32}">whole animals</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
