"""Minimal self-contained SVG emission for sweep results.

No external assets or libraries: each file is a standalone scatter of
per-run outcomes over starting-set fraction with the mean overlaid, like
the summary panels the sweeps are usually read from.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

WIDTH, HEIGHT = 480, 360
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 54, 16, 34, 44


def _x(frac: float) -> float:
    return MARGIN_L + frac * (WIDTH - MARGIN_L - MARGIN_R)


def _y(value: float) -> float:
    return HEIGHT - MARGIN_B - value * (HEIGHT - MARGIN_T - MARGIN_B)


def _axes(title: str, x_label: str, y_label: str) -> list[str]:
    parts = [
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{title}</text>',
    ]
    for tick in range(0, 11, 2):
        frac = tick / 10
        parts.append(
            f'<line x1="{_x(frac):.1f}" y1="{_y(0):.1f}" x2="{_x(frac):.1f}" '
            f'y2="{_y(0) + 4:.1f}" stroke="black"/>')
        parts.append(
            f'<text x="{_x(frac):.1f}" y="{_y(0) + 16:.1f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{frac:.1f}</text>')
        parts.append(
            f'<line x1="{_x(0):.1f}" y1="{_y(frac):.1f}" x2="{_x(0) - 4:.1f}" '
            f'y2="{_y(frac):.1f}" stroke="black"/>')
        parts.append(
            f'<text x="{_x(0) - 7:.1f}" y="{_y(frac) + 3:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{frac:.1f}</text>')
    parts.append(
        f'<rect x="{_x(0):.1f}" y="{_y(1):.1f}" '
        f'width="{_x(1) - _x(0):.1f}" height="{_y(0) - _y(1):.1f}" '
        f'fill="none" stroke="black"/>')
    parts.append(
        f'<text x="{(_x(0) + _x(1)) / 2:.1f}" y="{HEIGHT - 8}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="11">'
        f'{x_label}</text>')
    parts.append(
        f'<text x="14" y="{(_y(0) + _y(1)) / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="11" '
        f'transform="rotate(-90 14 {(_y(0) + _y(1)) / 2:.1f})">{y_label}</text>')
    return parts


def render_scatter(points: Sequence[tuple[Fraction, Fraction]],
                   mean_line: Mapping[Fraction, Fraction],
                   title: str, x_label: str, y_label: str) -> str:
    """SVG document with a grey scatter and a mean line over [0,1] x [0,1]."""
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
    ]
    parts.extend(_axes(title, x_label, y_label))
    for fx, fy in points:
        parts.append(
            f'<circle cx="{_x(float(fx)):.1f}" cy="{_y(float(fy)):.1f}" '
            f'r="1.4" fill="#7f7f7f" fill-opacity="0.35"/>')
    if mean_line:
        coords = " ".join(
            f"{_x(float(fx)):.1f},{_y(float(fy)):.1f}"
            for fx, fy in sorted(mean_line.items()))
        parts.append(f'<polyline points="{coords}" fill="none" '
                     f'stroke="#1f3d99" stroke-width="1.8"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
