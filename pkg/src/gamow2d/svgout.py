"""Minimal self-contained SVG emission: shape outlines, lens and minimal-curve
figures, and the fission diagram.  No plotting dependency."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .shapes import RasterSet, StarShape

_HEADER = '<?xml version="1.0" encoding="UTF-8"?>\n'


def _svg(width, height, body: list) -> str:
    return (
        _HEADER
        + f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">\n'
        + "\n".join(body)
        + "\n</svg>\n"
    )


def _polyline(points, stroke="black", width=1.5, fill="none") -> str:
    pts = " ".join(f"{x:.3f},{y:.3f}" for x, y in points)
    return (
        f'<polyline points="{pts}" fill="{fill}" stroke="{stroke}" '
        f'stroke-width="{width}"/>'
    )


class Frame:
    """Affine map from math coordinates to a square SVG canvas."""

    def __init__(self, xmin, xmax, ymin, ymax, size=480, margin=20):
        self.size = size
        self.margin = margin
        span = max(xmax - xmin, ymax - ymin, 1e-9)
        self.scale = (size - 2 * margin) / span
        self.x0, self.y0 = xmin, ymax

    def map(self, x, y):
        return (
            self.margin + (x - self.x0) * self.scale,
            self.margin + (self.y0 - y) * self.scale,
        )

    def map_points(self, pts):
        return [self.map(x, y) for x, y in pts]


def shape_svg(shapes: Sequence, labels: Sequence[str] | None = None,
              size: int = 480) -> str:
    """Outlines of star shapes / rasters on a common frame."""
    all_pts = []
    outlines = []
    for s in shapes:
        if isinstance(s, StarShape):
            pts = s.boundary(512)
            pts = np.vstack([pts, pts[:1]])
        else:
            pts = _raster_outline(s)
        outlines.append(pts)
        all_pts.append(pts)
    allp = np.vstack(all_pts)
    fr = Frame(allp[:, 0].min(), allp[:, 0].max(), allp[:, 1].min(),
               allp[:, 1].max(), size=size)
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"]
    body = []
    for i, pts in enumerate(outlines):
        body.append(_polyline(fr.map_points(pts), stroke=colors[i % len(colors)]))
    if labels:
        for i, lab in enumerate(labels):
            body.append(
                f'<text x="{10}" y="{18 + 16 * i}" font-size="13" '
                f'fill="{colors[i % len(colors)]}">{lab}</text>'
            )
    return _svg(size, size, body)


def _raster_outline(r: RasterSet) -> np.ndarray:
    pts = r.cell_centers()
    if len(pts) == 0:
        return np.zeros((1, 2))
    return pts


def _arc_points(center, radius, phi0, phi1, n=128):
    phis = np.linspace(phi0, phi1, n)
    return np.stack(
        [center[0] + radius * np.cos(phis), center[1] + radius * np.sin(phis)],
        axis=1,
    )


def lens_svg(state, size: int = 480) -> str:
    """Unit arc vs competing arc through the displaced apex."""
    tb = state.theta_bar
    fr = Frame(-1.4, 1.6, -1.3, 1.3, size=size)
    body = [_polyline(fr.map_points(_arc_points((0, 0), 1.0, 0, 2 * math.pi)),
                      stroke="#999", width=1.0)]
    body.append(
        _polyline(fr.map_points(_arc_points((0, 0), 1.0, -tb, tb)),
                  stroke="black", width=2.0)
    )
    rho, theta = abs(state.rho), abs(state.theta)
    phi_mid = 0.0 if state.rho > 0 else math.pi
    body.append(
        _polyline(
            fr.map_points(
                _arc_points((state.eta, 0), rho, phi_mid - theta, phi_mid + theta)
            ),
            stroke="#d62728",
            width=2.0,
        )
    )
    for x, y in [(math.cos(tb), math.sin(tb)), (math.cos(tb), -math.sin(tb)),
                 (1.0 + state.delta, 0.0)]:
        cx, cy = fr.map(x, y)
        body.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="3" fill="black"/>')
    body.append(
        f'<text x="10" y="18" font-size="13">theta_bar={tb:.4f} '
        f"delta={state.delta:+.4f} tau={state.tau:.6f} mu={state.mu:+.6f}</text>"
    )
    return _svg(size, size, body)


def sweep_svg(rows, threshold=None, size: int = 560) -> str:
    """Energy-vs-epsilon curves for single and split configurations."""
    ok = [r for r in rows if not r.failed]
    if not ok:
        return _svg(size, size, ["<text x='10' y='20'>no data</text>"])
    eps = [r.epsilon for r in ok]
    e1 = [r.best_single_energy for r in ok]
    e2 = [r.best_split_energy for r in ok if math.isfinite(r.best_split_energy)]
    lo = min(e1 + e2) if e2 else min(e1)
    hi = max(e1 + e2) if e2 else max(e1)
    fr = Frame(min(eps), max(eps), lo, hi, size=size, margin=40)
    body = [_polyline(fr.map_points(list(zip(eps, e1))), stroke="#1f77b4")]
    pts2 = [(r.epsilon, r.best_split_energy) for r in ok
            if math.isfinite(r.best_split_energy)]
    if pts2:
        body.append(_polyline(fr.map_points(pts2), stroke="#d62728"))
    if threshold is not None:
        x0, _ = fr.map(threshold, lo)
        body.append(
            f'<line x1="{x0:.2f}" y1="20" x2="{x0:.2f}" y2="{size - 20}" '
            'stroke="#2ca02c" stroke-dasharray="4" stroke-width="1.5"/>'
        )
        body.append(
            f'<text x="{x0 + 4:.2f}" y="32" font-size="12" fill="#2ca02c">'
            f"threshold={threshold:.4g}</text>"
        )
    body.append('<text x="10" y="16" font-size="13" fill="#1f77b4">single</text>')
    body.append('<text x="70" y="16" font-size="13" fill="#d62728">split</text>')
    return _svg(size, size, body)


def min_curve_svg(result, size: int = 480) -> str:
    """Sketch of a minimal-curve configuration: unit circle plus offset ring."""
    fr = Frame(-1.8, 1.8, -1.8, 1.8, size=size)
    body = [
        _polyline(fr.map_points(_arc_points((0, 0), 1.0, 0, 2 * math.pi)),
                  stroke="black", width=1.5),
        _polyline(
            fr.map_points(
                _arc_points((0, 0), 1.0 + result.t if result.beta >= 0 else 1.0,
                            0, 2 * math.pi)
            ),
            stroke="#999",
            width=0.8,
        ),
        f'<text x="10" y="18" font-size="13">case={result.case_tag} '
        f"t={result.t:.3f} beta={result.beta:.3f} len={result.length:.6f}</text>",
    ]
    return _svg(size, size, body)
