"""Minimal SVG scatter for bifurcation diagrams.

Fixed 1200 x 800 viewport, one 0.5-radius dot per retained attractor
point. Pure string construction, so identical diagrams render to
byte-identical files.
"""

from __future__ import annotations

from .logistic import BifurcationDiagram

WIDTH = 1200
HEIGHT = 800
MARGIN = 40.0


def render_bifurcation_svg(diagram: BifurcationDiagram) -> str:
    r = diagram.r_grid
    r_min, r_max = float(r[0]), float(r[-1])
    span = r_max - r_min if r_max > r_min else 1.0

    def px(value: float) -> float:
        return MARGIN + (value - r_min) / span * (WIDTH - 2 * MARGIN)

    def py(state: float) -> float:
        return HEIGHT - MARGIN - state * (HEIGHT - 2 * MARGIN)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black" stroke-width="1"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black" stroke-width="1"/>',
    ]
    for i in range(r.shape[0]):
        x = px(float(r[i]))
        for state in diagram.attractor_points[i]:
            parts.append(
                f'<circle cx="{x:.2f}" cy="{py(float(state)):.2f}" r="0.5"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
