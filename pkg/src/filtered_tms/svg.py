"""Self-contained SVG heatmaps for 2-D sweep grids (no plotting deps).

Cells are filled from a linear color scale between the finite minimum and
maximum of the grid; nan cells render grey.  The output embeds all styling
inline so the file stands alone as an archival artifact.
"""

from __future__ import annotations

import math

import numpy as np

# anchor colors of a viridis-like ramp, interpolated linearly
_RAMP = (
    (68, 1, 84),
    (59, 82, 139),
    (33, 145, 140),
    (94, 201, 98),
    (253, 231, 37),
)

_NAN_FILL = "#b0b0b0"

_CELL = 14
_MARGIN_LEFT = 70
_MARGIN_BOTTOM = 46
_MARGIN_TOP = 34
_BAR_WIDTH = 18
_BAR_GAP = 24


def _color(t: float) -> str:
    t = min(max(t, 0.0), 1.0)
    pos = t * (len(_RAMP) - 1)
    i = min(int(pos), len(_RAMP) - 2)
    frac = pos - i
    rgb = [round(a + (b - a) * frac) for a, b in zip(_RAMP[i], _RAMP[i + 1])]
    return f"#{rgb[0]:02x}{rgb[1]:02x}{rgb[2]:02x}"


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def render_heatmap(
    grid,
    x_values,
    y_values,
    x_label: str,
    y_label: str,
    title: str,
) -> str:
    """SVG text for grid[y, x] with a labelled linear color bar."""
    grid = np.asarray(grid, dtype=float)
    ny, nx = grid.shape
    if ny != len(y_values) or nx != len(x_values):
        raise ValueError("grid shape does not match the axis lengths")

    finite = grid[np.isfinite(grid)]
    lo = float(finite.min()) if finite.size else 0.0
    hi = float(finite.max()) if finite.size else 1.0
    span = hi - lo if hi > lo else 1.0

    width = _MARGIN_LEFT + nx * _CELL + _BAR_GAP + _BAR_WIDTH + 60
    height = _MARGIN_TOP + ny * _CELL + _MARGIN_BOTTOM
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{_MARGIN_LEFT}" y="18" font-size="13">{title}</text>',
    ]
    for iy in range(ny):
        # row 0 at the bottom so the y axis increases upward
        ypix = _MARGIN_TOP + (ny - 1 - iy) * _CELL
        for ix in range(nx):
            v = grid[iy, ix]
            fill = _NAN_FILL if not math.isfinite(v) else _color((v - lo) / span)
            parts.append(
                f'<rect x="{_MARGIN_LEFT + ix * _CELL}" y="{ypix}" '
                f'width="{_CELL}" height="{_CELL}" fill="{fill}"/>'
            )

    x0, x1 = _fmt(float(x_values[0])), _fmt(float(x_values[-1]))
    y0, y1 = _fmt(float(y_values[0])), _fmt(float(y_values[-1]))
    base = _MARGIN_TOP + ny * _CELL
    parts += [
        f'<text x="{_MARGIN_LEFT}" y="{base + 14}">{x0}</text>',
        f'<text x="{_MARGIN_LEFT + nx * _CELL}" y="{base + 14}" text-anchor="end">{x1}</text>',
        f'<text x="{_MARGIN_LEFT + nx * _CELL / 2}" y="{base + 32}" text-anchor="middle">{x_label}</text>',
        f'<text x="{_MARGIN_LEFT - 6}" y="{base}" text-anchor="end">{y0}</text>',
        f'<text x="{_MARGIN_LEFT - 6}" y="{_MARGIN_TOP + 10}" text-anchor="end">{y1}</text>',
        f'<text x="14" y="{_MARGIN_TOP + ny * _CELL / 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {_MARGIN_TOP + ny * _CELL / 2})">{y_label}</text>',
    ]

    # linear color bar, annotated with the grid minimum and maximum
    bar_x = _MARGIN_LEFT + nx * _CELL + _BAR_GAP
    bar_h = ny * _CELL
    steps = 32
    for k in range(steps):
        t = 1.0 - k / (steps - 1)
        parts.append(
            f'<rect x="{bar_x}" y="{_MARGIN_TOP + k * bar_h / steps:.2f}" '
            f'width="{_BAR_WIDTH}" height="{bar_h / steps + 0.5:.2f}" fill="{_color(t)}"/>'
        )
    parts += [
        f'<text x="{bar_x + _BAR_WIDTH + 4}" y="{_MARGIN_TOP + 10}">{_fmt(hi)}</text>',
        f'<text x="{bar_x + _BAR_WIDTH + 4}" y="{base}">{_fmt(lo)}</text>',
        "</svg>",
    ]
    return "\n".join(parts) + "\n"
