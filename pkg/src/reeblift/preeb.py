"""Poincaré-Reeb graph of a planar algebraic domain under (x1, x2) -> x1.

The sweep finds the vertical tangencies of the boundary curves (resultant
elimination of x2), then reads off the connected components of every
vertical fibre of D̄ between and around those x-values.  Components that
persist across a critical level are glued into one edge; components that
touch the tangency point at a level are attached to that level's vertex.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domain import AlgebraicDomain, Kind, TAU_B, classify, classify_many
from .errors import DegenerateInput, DegeneratePosition, DimensionError, SweepError, TangencyAtLevel
from .graph import Edge, ReebGraph, Vertex, merge_close_vertices, renumber, smooth_degree2
from .poly import Interval, Polynomial, _isolate, isolate_real_roots, partial, restrict

SIGMA = 1e-7


@dataclass(frozen=True)
class CriticalPoint:
    x: tuple[float, float]
    curve: int

    @property
    def xvalue(self) -> float:
        return self.x[0]


@dataclass(frozen=True)
class Slab:
    lo: float
    hi: float
    t: float
    components: tuple[Interval, ...]


@dataclass
class SlabDecomposition:
    critical_points: list[CriticalPoint]
    slabs: list[Slab]
    critical_components: list[tuple[Interval, ...] | None] = field(default_factory=list)

    @property
    def critical_values(self) -> list[float]:
        return [c.xvalue for c in self.critical_points]


def _require_planar(dom: AlgebraicDomain) -> None:
    if dom.k != 2:
        raise DimensionError("the sweep is implemented for planar domains (k = 2) only")


# --- critical points ----------------------------------------------------------

def _coeffs_in_x2(f: Polynomial) -> list[np.ndarray]:
    """c_e(x1) as ascending coefficient arrays, so f = sum_e c_e(x1) x2^e."""
    n = f.degree_in(1)
    d = f.degree_in(0)
    out = [np.zeros(d + 1) for _ in range(n + 1)]
    for (e1, e2), c in f.terms.items():
        out[e2][e1] += c
    return out


def _sylvester(fc: np.ndarray, gc: np.ndarray) -> np.ndarray:
    """Sylvester matrix from ascending coefficient vectors (formal degrees)."""
    n, m = len(fc) - 1, len(gc) - 1
    S = np.zeros((n + m, n + m))
    fd, gd = fc[::-1], gc[::-1]
    for i in range(m):
        S[i, i:i + n + 1] = fd
    for i in range(n):
        S[m + i, i:i + m + 1] = gd
    return S


def resultant_x2(f: Polynomial, g: Polynomial, window: Interval) -> np.ndarray:
    """Res_{x2}(f, g) as a polynomial in sigma = x1 / window.hi (ascending coefficients).

    The Sylvester determinant is evaluated at Chebyshev nodes and fitted by
    least squares; its degree is at most deg f * deg g.
    """
    fcs, gcs = _coeffs_in_x2(f), _coeffs_in_x2(g)
    deg = max(f.degree * g.degree, 1)
    half = max(abs(window.lo), abs(window.hi))
    n_nodes = 2 * deg + 3
    nodes = np.cos(np.pi * (np.arange(n_nodes) + 0.5) / n_nodes)
    vals = np.empty(n_nodes)
    scales = np.empty(n_nodes)
    for i, s in enumerate(nodes):
        t = s * half
        fc = np.array([np.polynomial.polynomial.polyval(t, c) for c in fcs])
        gc = np.array([np.polynomial.polynomial.polyval(t, c) for c in gcs])
        S = _sylvester(fc, gc)
        vals[i] = np.linalg.det(S)
        scales[i] = np.prod(np.maximum(np.linalg.norm(S, axis=1), 1e-300))
    if np.all(np.abs(vals) <= 1e-12 * scales):
        raise DegenerateInput("resultant vanishes identically (boundary curve has a vertical component?)")
    V = np.vander(nodes, deg + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(V, vals, rcond=None)
    coef[np.abs(coef) < 1e-12 * np.abs(coef).max()] = 0.0
    return coef


def _polish(f, f1, f2, f21, f22, p, iters=30):
    x = np.array(p, dtype=float)
    for _ in range(iters):
        r = np.array([f(x), f2(x)])
        J = np.array([[f1(x), f2(x)], [f21(x), f22(x)]])
        try:
            step = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            break
        x = x + step
        if np.linalg.norm(step) <= 1e-16 * (1 + np.linalg.norm(x)):
            break
    return x


def critical_x_values(dom: AlgebraicDomain, sigma: float = SIGMA, tau: float = TAU_B) -> list[CriticalPoint]:
    """Vertical tangencies {f_j = 0, df_j/dx2 = 0} on the boundary of D̄, sorted by x1."""
    _require_planar(dom)
    window = Interval(-dom.bound, dom.bound)
    found: list[CriticalPoint] = []
    for j, f in enumerate(dom.boundary_polys):
        f1, f2 = partial(f, 0), partial(f, 1)
        f21, f22 = partial(f2, 0), partial(f2, 1)
        if f2.is_zero():
            raise DegenerateInput(f"boundary polynomial {j} does not depend on x2")
        coef = resultant_x2(f, f2, window)
        roots = [r.value * dom.bound for r in _isolate(coef, -1.0, 1.0)] if np.any(coef[1:]) else []
        for t in roots:
            gt = restrict(f2, 0, t)
            if gt.is_zero():
                raise DegenerateInput(f"df/dx2 of curve {j} vanishes on the line x1 = {t}")
            cands = [r.value for r in isolate_real_roots(gt, window)] if gt.degree > 0 else []
            for x2 in cands:
                x = _polish(f, f1, f2, f21, f22, (t, x2))
                scale = max(1.0, max(abs(c) for c in f.terms.values()))
                if abs(f(x)) > tau * scale or abs(f2(x)) > tau * scale:
                    continue
                if np.any(np.abs(x) > dom.bound):
                    continue
                vals = np.array([g(x) for g in dom.boundary_polys])
                vals[j] = 0.0
                if np.any(vals < -tau):
                    continue  # tangency of S_j away from D̄
                if any(c.curve == j and np.hypot(*(np.subtract(c.x, x))) < 1e-9 for c in found):
                    continue
                found.append(CriticalPoint((float(x[0]), float(x[1])), j))
    found.sort(key=lambda c: c.xvalue)
    for a, b in zip(found, found[1:]):
        if b.xvalue - a.xvalue < sigma:
            raise DegeneratePosition(
                f"critical x-values {a.xvalue:.12g} and {b.xvalue:.12g} closer than {sigma:g}; perturb the domain")
    return found


# --- fibres ---------------------------------------------------------------------

def slab_components(dom: AlgebraicDomain, t: float, allow_tangency: bool = False,
                    tau: float = TAU_B) -> list[Interval]:
    """Connected components of D̄ ∩ {x1 = t}, as sorted closed x2-intervals."""
    _require_planar(dom)
    B = dom.bound
    window = Interval(-B, B)
    roots: list[tuple[float, bool]] = []
    for j, f in enumerate(dom.boundary_polys):
        g = restrict(f, 0, t)
        if g.is_zero():
            raise DegenerateInput(f"curve {j} contains the vertical line x1 = {t}")
        if g.degree == 0:
            continue
        for r in isolate_real_roots(g, window):
            if r.tangential and not allow_tangency:
                raise TangencyAtLevel(f"x1 = {t} is tangent to curve {j} at x2 = {r.value}")
            roots.append((r.value, r.tangential))
    roots.sort()
    cuts = [-B] + [r for r, _ in roots] + [B]
    mids = [0.5 * (a + b) for a, b in zip(cuts, cuts[1:]) if b > a]
    spans = [(a, b) for a, b in zip(cuts, cuts[1:]) if b > a]
    if not spans:
        return []
    kind, _, _ = classify_many(dom, np.column_stack([np.full(len(mids), t), mids]), tau)
    if np.any(kind == 0):
        raise TangencyAtLevel(f"ambiguous midpoint classification on x1 = {t}")
    inside = kind == 1
    if inside[0] or inside[-1]:
        raise SweepError(f"D̄ ∩ {{x1 = {t}}} reaches the bound {B}; enlarge it")
    comps: list[list[float]] = []
    for (a, b), ins in zip(spans, inside):
        if not ins:
            continue
        if comps and comps[-1][1] == a:
            comps[-1][1] = b
        else:
            comps.append([a, b])
    if allow_tangency:
        # an isolated tangential root touching D̄ is a one-point component
        for r, tang in roots:
            if tang and not any(lo <= r <= hi for lo, hi in comps):
                m = classify(dom, (t, r), tau)
                if m.kind is Kind.BOUNDARY:
                    comps.append([r, r])
        comps.sort()
    return [Interval(a, b) for a, b in comps]


def _neighbourhood_radius(dom: AlgebraicDomain, cp: CriticalPoint, eta: float) -> float:
    f = dom.boundary_polys[cp.curve]
    f1 = partial(f, 0)(cp.x)
    f22 = partial(partial(f, 1), 1)(cp.x)
    if abs(f22) < 1e-12 or abs(f1) < 1e-12:
        raise DegeneratePosition(f"higher-order tangency at {cp.x}")
    return 4.0 * np.sqrt(2.0 * eta * abs(f1) / abs(f22)) + 1e-9


def sweep(dom: AlgebraicDomain, sigma: float = SIGMA, eta: float | None = None,
          tau: float = TAU_B) -> tuple[SlabDecomposition, dict]:
    """Slab decomposition plus the fibres just left/right of every critical level."""
    cps = critical_x_values(dom, sigma, tau)
    if not cps:
        raise SweepError("no critical points: D̄ is empty or unbounded")
    vals = [c.xvalue for c in cps]
    base_eta = eta if eta is not None else 1e-6 * dom.bound
    etas = []
    for i, v in enumerate(vals):
        gaps = [abs(v - w) for w in vals[max(i - 1, 0):i + 2] if w != v]
        etas.append(min([base_eta] + [0.25 * g for g in gaps]))
    left = [slab_components(dom, v - e, tau=tau) for v, e in zip(vals, etas)]
    right = [slab_components(dom, v + e, tau=tau) for v, e in zip(vals, etas)]
    slabs = []
    for s in range(len(vals) - 1):
        lo, hi = vals[s], vals[s + 1]
        mid = slab_components(dom, 0.5 * (lo + hi), tau=tau)
        third = slab_components(dom, lo + (hi - lo) / 3.0, tau=tau)
        counts = {len(mid), len(third), len(right[s]), len(left[s + 1])}
        if len(counts) != 1:
            raise SweepError(f"component count not constant on slab ({lo}, {hi}): {sorted(counts)}")
        slabs.append(Slab(lo, hi, 0.5 * (lo + hi), tuple(mid)))
    crit_comps = []
    for v in vals:
        try:
            crit_comps.append(tuple(slab_components(dom, v, allow_tangency=True, tau=tau)))
        except (TangencyAtLevel, SweepError):
            crit_comps.append(None)
    dec = SlabDecomposition(cps, slabs, crit_comps)
    return dec, {"left": left, "right": right, "etas": etas}


def build_poincare_reeb(dom: AlgebraicDomain, merge_window: float = 0.0, smooth_all: bool = False,
                        sigma: float = SIGMA, eta: float | None = None, tau: float = TAU_B) -> ReebGraph:
    """Poincaré-Reeb graph of (D̄, x1), embedded in the plane.

    Vertices sit at the critical points; each edge is one maximal family of
    fibre components and carries a polyline through the component midpoints
    of the slabs it crosses, so x1 increases strictly along it.
    """
    dec, near = sweep(dom, sigma, eta, tau)
    cps = dec.critical_points
    n = len(cps)
    if near["left"][0] or near["right"][-1]:
        raise SweepError("fibres outside the extreme critical values are non-empty")

    parent: dict[tuple[int, int], tuple[int, int]] = {}

    def find(a):
        parent.setdefault(a, a)
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    starts: dict[tuple[int, int], list[int]] = {}
    ends: dict[tuple[int, int], list[int]] = {}
    for i, cp in enumerate(cps):
        rho = _neighbourhood_radius(dom, cp, near["etas"][i])
        b = cp.x[1]
        probe = Interval(b - rho, b + rho)
        L, R = near["left"][i], near["right"][i]
        inv_l = [k for k, iv in enumerate(L) if iv.overlaps(probe)]
        inv_r = [k for k, iv in enumerate(R) if iv.overlaps(probe)]
        un_l = [k for k in range(len(L)) if k not in inv_l]
        un_r = [k for k in range(len(R)) if k not in inv_r]
        if len(un_l) != len(un_r):
            raise SweepError(f"unmatched fibre components across x1 = {cp.xvalue}")
        for kl, kr in zip(un_l, un_r):
            if not L[kl].overlaps(R[kr], tol=1e-9):
                raise SweepError(f"components do not overlap across x1 = {cp.xvalue}")
            a, c = find((i - 1, kl)), find((i, kr))
            if a != c:
                parent[a] = c
        for k in inv_l:
            ends.setdefault((i - 1, k), []).append(i)
        for k in inv_r:
            starts.setdefault((i, k), []).append(i)
        for k in range(len(R)):
            find((i, k))

    groups: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for node in list(parent):
        if 0 <= node[0] < n - 1:
            groups.setdefault(find(node), []).append(node)

    verts = [Vertex(i, cp.xvalue, cp.x, True) for i, cp in enumerate(cps)]
    edges = []
    for members in groups.values():
        members.sort()
        s = [v for m in members for v in starts.get(m, [])]
        e = [v for m in members for v in ends.get(m, [])]
        if len(s) != 1 or len(e) != 1:
            raise SweepError(f"edge track with {len(s)} start(s) and {len(e)} end(s)")
        a, b = s[0], e[0]
        poly = [cps[a].x]
        for slab_idx, k in members:
            slab = dec.slabs[slab_idx]
            poly.append((slab.t, slab.components[k].mid))
        poly.append(cps[b].x)
        edges.append(Edge(len(edges), (a, b), Interval(cps[a].xvalue, cps[b].xvalue),
                          tuple((float(x), float(y)) for x, y in poly)))
    g = renumber(ReebGraph(verts, edges, {"source": "poincare-reeb", "merge_window": merge_window,
                                           "smooth_all": smooth_all}))
    if merge_window > 0:
        g = merge_close_vertices(g, merge_window)
    if smooth_all:
        g = smooth_degree2(g, keep_critical=False)
    return g
