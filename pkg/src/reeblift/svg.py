"""Static SVG figure: boundary curves, embedded Poincaré-Reeb graph, critical points."""
from __future__ import annotations

import numpy as np
from skimage import measure

from .domain import AlgebraicDomain
from .graph import ReebGraph


def boundary_contours(dom: AlgebraicDomain, resolution: int = 400) -> list[np.ndarray]:
    """Zero-level contours of every f_j (marching squares), in domain coordinates."""
    ticks = np.linspace(-dom.bound, dom.bound, resolution)
    X1, X2 = np.meshgrid(ticks, ticks, indexing="ij")
    pts = np.column_stack([X1.ravel(), X2.ravel()])
    step = ticks[1] - ticks[0]
    out = []
    for f in dom.boundary_polys:
        Z = f.evaluate_many(pts).reshape(resolution, resolution)
        for c in measure.find_contours(Z, 0.0):
            out.append(-dom.bound + c * step)
    return out


def render_svg(dom: AlgebraicDomain, graph: ReebGraph, size: int = 600, resolution: int = 400) -> str:
    B = dom.bound
    scale = size / (2 * B)

    def tx(p):
        return (p[0] + B) * scale, (B - p[1]) * scale

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">',
             f'<rect width="{size}" height="{size}" fill="white"/>']
    for c in boundary_contours(dom, resolution):
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in map(tx, c))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="#777" stroke-width="1.5"/>')
    emb = {v.id: v.embed for v in graph.vertices}
    for e in graph.edges:
        line = e.polyline or tuple(p for p in (emb[e.ends[0]], emb[e.ends[1]]) if p is not None)
        if len(line) < 2:
            continue
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in map(tx, line))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="#1f5fbf" stroke-width="2"/>')
    for v in graph.vertices:
        if v.embed is None:
            continue
        x, y = tx(v.embed)
        colour = "#c0392b" if v.critical else "#1f5fbf"
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="4" fill="{colour}"><title>{v.value:.4f}</title></circle>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
