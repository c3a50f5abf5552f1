"""Static SVG rendering of configurations and fronts.

The only floating-point geometry in the project: hexagonal cells in the
axial embedding x = i + j/2, y = j*sqrt(3)/2 (y flipped for SVG).
"""

from __future__ import annotations

import math

import numpy as np

from .front import FrontResult
from .sampling import Configuration

_SQRT3 = math.sqrt(3.0)
_R = 1.0 / _SQRT3          # hexagon circumradius for unit cell spacing
_HEX_ANGLES = [math.pi / 6 + k * math.pi / 3 for k in range(6)]

OCCUPIED_FILL = "#3b4a6b"
VACANT_FILL = "#f2efe9"
FRONT_STROKE = "#c0392b"
BAND_STROKE = "#2c8a4b"


def _center(i: int, j: int) -> tuple[float, float]:
    return i + j / 2.0, j * _SQRT3 / 2.0


def _hex_points(cx: float, cy: float) -> str:
    pts = []
    for a in _HEX_ANGLES:
        pts.append(f"{cx + _R * math.cos(a):.3f},{cy - _R * math.sin(a):.3f}")
    return " ".join(pts)


def render_svg(c: Configuration, front: FrontResult | None = None,
               band_halfwidth: float | None = None, scale: float = 8.0) -> str:
    """SVG drawing of the configuration, the front polyline segments and
    optional localization-band guides at y = +-band_halfwidth."""
    reg = c.region
    xs = []
    ys = []
    for i, j in ((reg.a1, reg.b1), (reg.a2, reg.b1), (reg.a1, reg.b2),
                 (reg.a2, reg.b2)):
        x, y = _center(i, j)
        xs.append(x)
        ys.append(y)
    x0, x1 = min(xs) - 1, max(xs) + 1
    y0, y1 = min(ys) - 1, max(ys) + 1
    width = (x1 - x0) * scale
    height = (y1 - y0) * scale

    def to_px(x: float, y: float) -> tuple[float, float]:
        return (x - x0) * scale, (y1 - y) * scale

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.3f} {height:.3f}">',
        f'<rect width="{width:.3f}" height="{height:.3f}" fill="white"/>',
    ]

    for color, fill in ((True, OCCUPIED_FILL), (False, VACANT_FILL)):
        parts.append(f'<g fill="{fill}" stroke="none">')
        rows, cols = np.nonzero(c.occupied == color)
        for r, cc in zip(rows.tolist(), cols.tolist()):
            cx, cy = _center(reg.a1 + cc, reg.b1 + r)
            px, py = to_px(cx, cy)
            pts = []
            for a in _HEX_ANGLES:
                pts.append(f"{px + _R * scale * math.cos(a):.2f},"
                           f"{py + _R * scale * math.sin(a):.2f}")
            parts.append(f'<polygon points="{" ".join(pts)}"/>')
        parts.append('</g>')

    if band_halfwidth is not None:
        parts.append(f'<g stroke="{BAND_STROKE}" stroke-width="1.5" '
                     'stroke-dasharray="6,4">')
        for yb in (band_halfwidth, -band_halfwidth):
            y = yb * _SQRT3 / 2.0
            ax, ay = to_px(x0, y)
            bx, by = to_px(x1, y)
            parts.append(f'<line x1="{ax:.2f}" y1="{ay:.2f}" '
                         f'x2="{bx:.2f}" y2="{by:.2f}"/>')
        parts.append('</g>')

    if front is not None and front.length > 0:
        parts.append(f'<g stroke="{FRONT_STROKE}" stroke-width="2" '
                     'stroke-linecap="round">')
        for iu, ju, iv, jv in front.edges.tolist():
            # the shared hexagon wall is the perpendicular bisector chord
            ux, uy = _center(iu, ju)
            vx, vy = _center(iv, jv)
            mx, my = (ux + vx) / 2, (uy + vy) / 2
            dx, dy = vx - ux, vy - uy
            half = 0.5 / _SQRT3
            ex, ey = -dy * half, dx * half
            ax, ay = to_px(mx - ex, my - ey)
            bx, by = to_px(mx + ex, my + ey)
            parts.append(f'<line x1="{ax:.2f}" y1="{ay:.2f}" '
                         f'x2="{bx:.2f}" y2="{by:.2f}"/>')
        parts.append('</g>')

    parts.append('</svg>')
    return "\n".join(parts) + "\n"
