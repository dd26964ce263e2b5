"""The lift hypersurface M_D = {P(x) - sum_j c_j y_j^(2 m_j) = 0} and its sampling.

P is the product of the boundary polynomials, so M_D projects onto D̄ with a
(k'-1)-sphere over each interior point and a single point (y = 0) over each
boundary point.  The function g(x, y) = x1 on M_D is the lifted height.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .domain import TAU_B, AlgebraicDomain, classify_many, line_polys
from .errors import ClassifyError, DimensionError
from .poly import Polynomial, _isolate, partial, product

TAU_S = 1e-9
DELTA = 1e-6


@dataclass(frozen=True)
class LiftSpec:
    dom: AlgebraicDomain
    k0: int
    exps: tuple[int, ...] | None = None
    coeffs: tuple[float, ...] | None = None
    allow_k0_eq_k_plus_1: bool = False

    def __post_init__(self):
        k = self.dom.k
        kp = self.k0 - k
        min_k0 = k + 1 if self.allow_k0_eq_k_plus_1 else k + 2
        if self.k0 < min_k0:
            raise ValueError(f"k0 must exceed k + 1 = {k + 1} (got k0 = {self.k0})")
        exps = tuple(int(m) for m in (self.exps if self.exps is not None else [1] * kp))
        coeffs = tuple(float(c) for c in (self.coeffs if self.coeffs is not None else [1.0] * kp))
        if len(exps) != kp or len(coeffs) != kp:
            raise DimensionError(f"need {kp} exponents and coefficients, got {len(exps)} and {len(coeffs)}")
        if any(m < 1 for m in exps):
            raise ValueError("fibre exponents must be positive integers")
        if any(not c > 0 for c in coeffs):
            raise ValueError("fibre coefficients must be positive")
        object.__setattr__(self, "exps", exps)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def k(self) -> int:
        return self.dom.k

    @property
    def kprime(self) -> int:
        return self.k0 - self.dom.k

    def to_json(self) -> dict:
        return {"domain": self.dom.to_json(), "k0": self.k0, "exps": list(self.exps),
                "coeffs": list(self.coeffs), "allow_k0_eq_k_plus_1": self.allow_k0_eq_k_plus_1}

    @classmethod
    def from_json(cls, obj) -> "LiftSpec":
        return cls(AlgebraicDomain.from_json(obj["domain"]), int(obj["k0"]), tuple(obj["exps"]),
                   tuple(obj["coeffs"]), bool(obj.get("allow_k0_eq_k_plus_1", False)))


def base_product(dom: AlgebraicDomain) -> Polynomial:
    return product(list(dom.boundary_polys))


def build_lift(spec: LiftSpec) -> Polynomial:
    """F(x, y) = prod_j f_j(x) - sum_j c_j y_j^(2 m_j); x variables come first."""
    k0, k = spec.k0, spec.k
    F = base_product(spec.dom).embed(k0, 0)
    fibre = {}
    for j, (m, c) in enumerate(zip(spec.exps, spec.coeffs)):
        e = [0] * k0
        e[k + j] = 2 * m
        fibre[tuple(e)] = -c
    return F + Polynomial(k0, fibre)


@dataclass
class LiftResult:
    spec: LiftSpec
    F: Polynomial
    points: np.ndarray          # (N, k0) samples on M_D
    base: np.ndarray            # (B, k) base points in D̄
    base_kind: np.ndarray       # (B,) 1 interior, 0 boundary
    base_index: np.ndarray      # (N,) base point of each sample
    directions: np.ndarray      # (n_fiber, k') unit fibre directions
    pitch: float
    meta: dict = field(default_factory=dict)

    @property
    def gvalues(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def x(self) -> np.ndarray:
        return self.points[:, : self.spec.k]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, self.spec.k:]

    def __len__(self):
        return len(self.points)


def fibre_directions(kprime: int, n_fiber: int, rng: np.random.Generator) -> np.ndarray:
    if kprime == 1:
        if n_fiber > 2:
            raise ValueError("with one fibre coordinate the fibre sphere has only two points")
        return np.array([[1.0], [-1.0]])[:n_fiber]
    U = rng.normal(size=(n_fiber, kprime))
    return U / np.linalg.norm(U, axis=1, keepdims=True)


def _grid(dom: AlgebraicDomain, n_base: int):
    side = max(int(round(n_base ** (1.0 / dom.k))), 2)
    ticks = np.linspace(-dom.bound, dom.bound, side)
    mesh = np.meshgrid(*([ticks] * dom.k), indexing="ij")
    return np.column_stack([m.ravel() for m in mesh]), ticks


def harvest_boundary(dom: AlgebraicDomain, ticks: np.ndarray, tau: float = TAU_B) -> tuple[np.ndarray, np.ndarray]:
    """Points of ∂D̄ on every axis-parallel grid line; returns (points, curve index)."""
    k = dom.k
    B = dom.bound
    pts, idx = [], []
    others = np.meshgrid(*([ticks] * (k - 1)), indexing="ij") if k > 1 else []
    other = np.column_stack([o.ravel() for o in others]) if k > 1 else np.zeros((1, 0))
    for axis in range(k):
        P = np.insert(other, axis, 0.0, axis=1)
        D = np.zeros_like(P)
        D[:, axis] = 1.0
        for j, f in enumerate(dom.boundary_polys):
            C = line_polys(f, P, D, B)
            for p, c in zip(P, C):
                scale = np.abs(c).max()
                if scale == 0.0:
                    continue
                c = np.where(np.abs(c) < 1e-14 * scale, 0.0, c)
                for r in _isolate(c, -1.0, 1.0):
                    x = p.copy()
                    x[axis] = r.value * B
                    pts.append(x)
                    idx.append(j)
    if not pts:
        return np.zeros((0, k)), np.zeros(0, dtype=int)
    X = np.array(pts)
    J = np.array(idx)
    for j, f in enumerate(dom.boundary_polys):
        sel = J == j
        if np.any(sel):
            X[sel] = _polish_on(f, X[sel])
    kind, index, _ = classify_many(dom, X, tau)
    keep = (kind == 0) & (index == J)
    return X[keep], J[keep]


def _polish_on(f: Polynomial, X: np.ndarray, iters: int = 3) -> np.ndarray:
    grads = [partial(f, i) for i in range(f.nvars)]
    X = X.copy()
    for _ in range(iters):
        v = f.evaluate_many(X)
        G = np.column_stack([g.evaluate_many(X) for g in grads])
        nn = np.einsum("ij,ij->i", G, G)
        ok = nn > 0
        X[ok] -= (v[ok] / nn[ok])[:, None] * G[ok]
    return X


def _radii(spec: LiftSpec, P: np.ndarray, U: np.ndarray) -> np.ndarray:
    return _kernels.radial_scale(np.ascontiguousarray(P, dtype=np.float64), np.ascontiguousarray(U),
                                 np.asarray(spec.coeffs, dtype=np.float64), np.asarray(spec.exps, dtype=np.int64))


def collar_points(spec: LiftSpec, bpts: np.ndarray, bidx: np.ndarray, U: np.ndarray, h: float,
                  max_steps: int = 200, tau: float = TAU_B) -> np.ndarray:
    """Interior base points marching inward from boundary points.

    Near ∂D̄ the fibre radius grows like a root of the depth, so a uniform
    base grid leaves gaps in M_D of order sqrt(h).  Each collar walks along
    the inward normal with steps chosen so that consecutive lifted samples
    (same fibre direction) stay within 1.5 h, and stops once plain steps of
    size h are acceptable again at depth >= 3 h.
    """
    dom = spec.dom
    if len(bpts) == 0:
        return np.zeros((0, dom.k))
    normals = np.empty_like(bpts)
    for j, f in enumerate(dom.boundary_polys):
        sel = bidx == j
        if np.any(sel):
            G = np.column_stack([partial(f, i).evaluate_many(bpts[sel]) for i in range(dom.k)])
            normals[sel] = G / np.linalg.norm(G, axis=1, keepdims=True)
    limit = 1.5 * h
    M = len(bpts)
    depth = np.zeros(M)
    r_prev = np.zeros((M, len(U)))
    active = np.ones(M, dtype=bool)
    out = []
    for _ in range(max_steps):
        ia = np.flatnonzero(active)
        if len(ia) == 0:
            break
        step = np.full(len(ia), h)
        for _ in range(40):
            X = bpts[ia] + (depth[ia] + step)[:, None] * normals[ia]
            P = np.prod(dom.values(X), axis=1)
            R = _radii(spec, P, U)
            jump = np.sqrt(step ** 2 + np.max((R - r_prev[ia]) ** 2, axis=1))
            big = jump > limit
            if not np.any(big):
                break
            step[big] *= 0.5
        kind, _, _ = classify_many(dom, X, tau)
        inside = kind == 1
        out.append(X[inside])
        depth[ia] += step
        r_prev[ia] = R
        done = (~inside) | ((step == h) & (depth[ia] >= 3 * h))
        active[ia[done]] = False
    return np.concatenate(out) if out else np.zeros((0, dom.k))


def sample_surface(spec: LiftSpec, n_base: int, n_fiber: int, seed: int = 0, collar: bool = True,
                   tau_b: float = TAU_B, tau_s: float = TAU_S) -> LiftResult:
    """Sample M_D over a grid of base points in D̄ plus harvested boundary points.

    Interior base points carry ``n_fiber`` samples (one per fixed fibre
    direction); boundary base points carry the single sample y = 0.
    """
    if n_base < 1 or n_fiber < 1:
        raise ValueError("n_base and n_fiber must be positive")
    dom = spec.dom
    rng = np.random.default_rng(seed)
    U = fibre_directions(spec.kprime, n_fiber, rng)
    grid, ticks = _grid(dom, n_base)
    pitch = float(ticks[1] - ticks[0])
    kind, _, vals = classify_many(dom, grid, tau_b)
    keep = kind >= 0
    base_pts = [grid[keep]]
    base_kind = [np.where(kind[keep] == 0, 0, 1)]
    bpts, bidx = harvest_boundary(dom, ticks, tau_b)
    base_pts.append(bpts)
    base_kind.append(np.zeros(len(bpts), dtype=int))
    if collar:
        cpts = collar_points(spec, bpts, bidx, U, pitch, tau=tau_b)
        base_pts.append(cpts)
        base_kind.append(np.ones(len(cpts), dtype=int))
    base = np.concatenate(base_pts)
    bkind = np.concatenate(base_kind)

    P = np.prod(dom.values(base), axis=1)
    bad = P < -tau_s
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise ClassifyError(f"P = {P[i]:.3g} < 0 at base point {base[i].tolist()} classified inside D̄")
    interior = bkind == 1
    R = _radii(spec, P[interior], U)
    k, kp = dom.k, spec.kprime
    n_int = int(interior.sum())
    xi = np.repeat(base[interior], len(U), axis=0)
    yi = (R[:, :, None] * U[None, :, :]).reshape(-1, kp)
    ii = np.repeat(np.flatnonzero(interior), len(U))
    xb = base[~interior]
    yb = np.zeros((len(xb), kp))
    ib = np.flatnonzero(~interior)
    points = np.concatenate([np.hstack([xi, yi]), np.hstack([xb, yb])])
    index = np.concatenate([ii, ib])
    order = np.argsort(index, kind="stable")
    meta = {"n_base": n_base, "n_fiber": n_fiber, "seed": seed, "collar": collar,
            "n_interior_base": n_int, "n_boundary_base": int(len(xb))}
    return LiftResult(spec, build_lift(spec), points[order], base, bkind, index[order], U, pitch, meta)


# --- regularity -------------------------------------------------------------------

@dataclass
class RegularityReport:
    passed: bool
    min_grad_norm: float
    argmin: np.ndarray
    min_grad_interior: float
    min_grad_boundary: float
    n_samples: int
    delta: float
    witness: np.ndarray | None = None

    def summary(self) -> str:
        lines = [
            f"regularity: {'pass' if self.passed else 'FAIL'} over {self.n_samples} samples (delta = {self.delta:g})",
            f"  min |grad F| = {self.min_grad_norm:.6g} at {np.round(self.argmin, 6).tolist()}",
            f"  interior fibres: {self.min_grad_interior:.6g}   boundary points: {self.min_grad_boundary:.6g}",
        ]
        if self.witness is not None:
            lines.append(f"  singular point near {np.round(self.witness, 8).tolist()}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {"passed": self.passed, "min_grad_norm": self.min_grad_norm, "argmin": self.argmin.tolist(),
                "min_grad_interior": self.min_grad_interior, "min_grad_boundary": self.min_grad_boundary,
                "n_samples": self.n_samples, "delta": self.delta,
                "witness": None if self.witness is None else self.witness.tolist()}


def gradient_norms(F: Polynomial, Z: np.ndarray) -> np.ndarray:
    G = np.column_stack([partial(F, i).evaluate_many(Z) for i in range(F.nvars)])
    return np.linalg.norm(G, axis=1)


def _singular_search(F: Polynomial, z0: np.ndarray, iters: int = 50) -> np.ndarray:
    """Gauss-Newton on the overdetermined system F = 0, grad F = 0."""
    n = F.nvars
    grads = [partial(F, i) for i in range(n)]
    hess = [[partial(g, j) for j in range(n)] for g in grads]
    z = np.array(z0, dtype=float)
    for _ in range(iters):
        r = np.array([F(z)] + [g(z) for g in grads])
        J = np.vstack([[g(z) for g in grads], [[h(z) for h in row] for row in hess]])
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        z = z + step
        if np.linalg.norm(step) < 1e-15 * (1 + np.linalg.norm(z)):
            break
    return z


def verify_regularity(spec: LiftSpec, result: LiftResult, delta: float = DELTA, refine: bool = True,
                      tau_s: float = TAU_S) -> RegularityReport:
    """Check |grad F| > delta at every sample.

    With ``refine`` the lowest-gradient samples seed a local search for a
    singular point of M_D; one found within ``tau_s``/``delta`` also fails.
    """
    F = result.F
    Z = result.points
    norms = gradient_norms(F, Z)
    i = int(np.argmin(norms))
    on_boundary = np.all(result.y == 0.0, axis=1)
    mi = float(norms[~on_boundary].min()) if np.any(~on_boundary) else float("inf")
    mb = float(norms[on_boundary].min()) if np.any(on_boundary) else float("inf")
    passed = bool(norms[i] > delta)
    witness = None if passed else Z[i]
    if passed and refine:
        for s in np.argsort(norms)[:5]:
            z = _singular_search(F, Z[s])
            if abs(F(z)) < tau_s and gradient_norms(F, z[None])[0] <= delta:
                passed = False
                witness = z
                break
    return RegularityReport(passed, float(norms[i]), Z[i], mi, mb, len(Z), delta, witness)


# --- persistence ----------------------------------------------------------------

def write_lift(path, result: LiftResult) -> None:
    k = result.spec.k
    header = {"type": "header", "spec": result.spec.to_json(), "pitch": result.pitch,
              "directions": result.directions.tolist(), "meta": result.meta}
    with open(path, "w") as fh:
        fh.write(json.dumps(header) + "\n")
        for z in result.points:
            fh.write(json.dumps({"x": z[:k].tolist(), "y": z[k:].tolist(), "g": float(z[0])}) + "\n")


def read_lift(path, tau_b: float = TAU_B) -> LiftResult:
    with open(path) as fh:
        header = json.loads(fh.readline())
        xs, ys = [], []
        for line in fh:
            if line.strip():
                rec = json.loads(line)
                xs.append(rec["x"])
                ys.append(rec["y"])
    spec = LiftSpec.from_json(header["spec"])
    X = np.array(xs, dtype=float).reshape(-1, spec.k)
    Y = np.array(ys, dtype=float).reshape(-1, spec.kprime)
    base, index = np.unique(X, axis=0, return_inverse=True)
    index = index.ravel()
    counts = np.bincount(index, minlength=len(base))
    zero_y = np.zeros(len(base), dtype=bool)
    zero_y[index[np.all(Y == 0.0, axis=1)]] = True
    bkind = np.where((counts == 1) & zero_y, 0, 1)
    return LiftResult(spec, build_lift(spec), np.hstack([X, Y]), base, bkind, index,
                      np.array(header["directions"]), float(header["pitch"]), header.get("meta", {}))
