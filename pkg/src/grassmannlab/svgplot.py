"""Self-contained SVG polar plots of radial functions.

No plotting dependencies: the renderer emits a standalone SVG with a polar
grid, one closed path per curve, the base point marked at the origin, and a
legend built from the labels.  Output is deterministic for fixed inputs.
"""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .sweep import RadialFunction

_PALETTE = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
]


def _polyline(rho: RadialFunction, cx: float, cy: float, scale: float) -> str:
    theta = rho.theta()
    x = cx + scale * rho.values * np.cos(theta)
    y = cy - scale * rho.values * np.sin(theta)
    head = f"M {x[0]:.3f},{y[0]:.3f} "
    body = " ".join(f"L {xi:.3f},{yi:.3f}" for xi, yi in zip(x[1:], y[1:]))
    return head + body + " Z"


def render_radial_svg(curves: list[tuple[str, RadialFunction]], out, size: int = 640) -> Path:
    """Write a polar plot of the labelled curves to ``out`` and return the path."""
    if not curves:
        raise ValueError("no curves to render")
    grids = {rho.grid_size for _, rho in curves}
    if len(grids) != 1:
        raise ValueError(f"curves have inconsistent grid sizes {sorted(grids)}")
    rmax = max(float(rho.values.max()) for _, rho in curves)
    if rmax <= 0.0:
        rmax = 1.0
    cx = cy = size / 2.0
    scale = (size / 2.0 - 60.0) / rmax

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    # polar grid: quarter-radius circles and eight spokes
    for frac in (0.25, 0.5, 0.75, 1.0):
        rr = scale * rmax * frac
        parts.append(
            f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="{rr:.3f}" fill="none" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{cx + rr + 3:.1f}" y="{cy - 3:.1f}" font-size="10" '
            f'fill="#999999" font-family="sans-serif">{rmax * frac:.3g}</text>'
        )
    for k in range(8):
        ang = np.pi * k / 4.0
        x2 = cx + scale * rmax * np.cos(ang)
        y2 = cy - scale * rmax * np.sin(ang)
        parts.append(
            f'<line x1="{cx:.1f}" y1="{cy:.1f}" x2="{x2:.3f}" y2="{y2:.3f}" '
            f'stroke="#eeeeee" stroke-width="1"/>'
        )
    for i, (label, rho) in enumerate(curves):
        color = _PALETTE[i % len(_PALETTE)]
        parts.append(
            f'<path d="{_polyline(rho, cx, cy, scale)}" fill="none" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
    # base point marker
    parts.append(f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="3" fill="#000000"/>')
    parts.append(
        f'<text x="{cx + 6:.1f}" y="{cy + 12:.1f}" font-size="12" '
        f'font-family="sans-serif">p0</text>'
    )
    # legend
    for i, (label, _) in enumerate(curves):
        color = _PALETTE[i % len(_PALETTE)]
        y0 = 20 + 16 * i
        parts.append(f'<rect x="12" y="{y0 - 9}" width="12" height="3" fill="{color}"/>')
        parts.append(
            f'<text x="30" y="{y0 - 4}" font-size="12" '
            f'font-family="sans-serif">{escape(label)}</text>'
        )
    parts.append("</svg>")

    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(parts) + "\n", newline="\n")
    return out
