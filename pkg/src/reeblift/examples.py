"""Circle-bounded domains with a known Poincaré-Reeb graph.

``chain(l)``: an outer disk with l-1 round holes in a row along x1, giving a
ladder of l-1 cycles.  ``stack(l)``: l-1 holes stacked along x2 over the same
x1-range, so all cycles share two branch vertices once nearly-equal critical
values are merged.
"""
from __future__ import annotations

import numpy as np

from .domain import AlgebraicDomain
from .errors import GeometryError
from .poly import Polynomial

STACK_STAGGER = 1e-3


def _xy():
    return Polynomial.variable(0, 2), Polynomial.variable(1, 2)


def disk_poly(center=(0.0, 0.0), radius=1.0) -> Polynomial:
    """r^2 - |x - c|^2, positive inside the circle."""
    x1, x2 = _xy()
    return radius ** 2 - (x1 - center[0]) ** 2 - (x2 - center[1]) ** 2


def hole_poly(center, radius) -> Polynomial:
    """|x - c|^2 - r^2, positive outside the circle."""
    return -disk_poly(center, radius)


def unit_disk() -> AlgebraicDomain:
    return AlgebraicDomain(2, (disk_poly(),), 1.1, "disk")


def annulus(r_in: float = 1.0, r_out: float = 2.0) -> AlgebraicDomain:
    return AlgebraicDomain(2, (disk_poly(radius=r_out), hole_poly((0.0, 0.0), r_in)), 1.1 * r_out, "annulus")


def intersecting_circles() -> AlgebraicDomain:
    """Lens bounded by two unit circles at distance 1; violates disjointness."""
    return AlgebraicDomain(2, (disk_poly(), disk_poly((1.0, 0.0))), 2.5, "broken-lens")


def _check_holes(centers, radii, R_outer, margin):
    for c, r in zip(centers, radii):
        if r <= 0:
            raise GeometryError("hole radius must be positive")
        if np.hypot(*c) + r > R_outer - margin:
            raise GeometryError(f"hole at {tuple(c)} with radius {r} is not inside the outer circle")
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            d = np.hypot(centers[i][0] - centers[j][0], centers[i][1] - centers[j][1])
            if d <= radii[i] + radii[j] + margin:
                raise GeometryError(f"holes {i} and {j} touch or overlap")


def chain(l: int, R_outer: float = 1.0, r_hole: float | None = None, gap: float | None = None) -> AlgebraicDomain:
    if l < 1:
        raise GeometryError("chain needs l >= 1")
    m = l - 1
    gap = 0.1 * R_outer if gap is None else gap
    if r_hole is None:
        r_hole = min(0.15 * R_outer, (1.6 * R_outer - (m - 1) * gap) / (2 * m)) if m else 0.15 * R_outer
    width = m * 2 * r_hole + max(m - 1, 0) * gap
    xs = [-width / 2 + r_hole + i * (2 * r_hole + gap) for i in range(m)]
    centers = [(x, 0.0) for x in xs]
    margin = 0.5 * gap if m else 0.0
    _check_holes(centers, [r_hole] * m, R_outer, margin)
    # x-extents of holes must be disjoint and away from the outer extremes
    for a, b in zip(xs, xs[1:]):
        if b - a <= 2 * r_hole:
            raise GeometryError("hole x-extents overlap")
    polys = [disk_poly(radius=R_outer)] + [hole_poly(c, r_hole) for c in centers]
    return AlgebraicDomain(2, tuple(polys), 1.1 * R_outer, f"chain({l})")


def stack(l: int, R_outer: float = 1.0, r_hole: float | None = None, gap: float | None = None,
          stagger: float = STACK_STAGGER) -> AlgebraicDomain:
    """Holes centred on the x2-axis with radii r_hole + i*stagger.

    Equal radii would put several tangencies on one vertical line; the
    stagger keeps the critical values distinct (the exact figure is recovered
    by merging vertices within a window larger than (l-2)*stagger).
    """
    if l < 1:
        raise GeometryError("stack needs l >= 1")
    m = l - 1
    gap = 0.1 * R_outer if gap is None else gap
    if r_hole is None:
        r_hole = min(0.15 * R_outer, (1.6 * R_outer - (m - 1) * gap) / (2 * m) - m * stagger) if m else 0.15 * R_outer
    radii = [r_hole + i * stagger for i in range(m)]
    height = sum(2 * r for r in radii) + max(m - 1, 0) * gap
    ys, y = [], -height / 2
    for r in radii:
        ys.append(y + r)
        y += 2 * r + gap
    centers = [(0.0, yy) for yy in ys]
    margin = 0.5 * gap if m else 0.0
    _check_holes(centers, radii, R_outer, margin)
    polys = [disk_poly(radius=R_outer)] + [hole_poly(c, r) for c, r in zip(centers, radii)]
    return AlgebraicDomain(2, tuple(polys), 1.1 * R_outer, f"stack({l})")


def expected_counts(family: str, l: int) -> dict:
    """Vertex-degree and edge counts of the figure's idealised graphs."""
    if family == "chain":
        degs = {1: 2}
        if l > 1:
            degs[3] = 2 * (l - 1)
        return {"degrees": degs, "edges": 3 * l - 2}
    if family == "stack":
        if l == 1:
            return {"degrees": {1: 2}, "edges": 1}
        return {"degrees": {1: 2, l + 1: 2}, "edges": l + 2}
    raise ValueError(family)
