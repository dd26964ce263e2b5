"""Algebraic domains D = {f_1 > 0} ∩ ... ∩ {f_l > 0} and their sampled validation."""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import AmbiguousBoundary, DimensionError
from .poly import Interval, Polynomial, _isolate, partial

TAU_B = 1e-9
DELTA_G = 1e-6


class Kind(enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


@dataclass(frozen=True)
class Membership:
    kind: Kind
    index: int | None = None

    def __repr__(self):
        if self.kind is Kind.BOUNDARY:
            return f"Boundary({self.index})"
        return self.kind.value.capitalize()


INTERIOR = Membership(Kind.INTERIOR)
EXTERIOR = Membership(Kind.EXTERIOR)


@dataclass(frozen=True)
class AlgebraicDomain:
    k: int
    boundary_polys: tuple[Polynomial, ...]
    bound: float
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "boundary_polys", tuple(self.boundary_polys))
        if self.k < 1:
            raise DimensionError("ambient dimension must be positive")
        if not self.boundary_polys:
            raise ValueError("a domain needs at least one boundary polynomial")
        for f in self.boundary_polys:
            if f.nvars != self.k:
                raise DimensionError(f"boundary polynomial has {f.nvars} variables, domain has k={self.k}")
        if not self.bound > 0:
            raise ValueError("bound must be positive")

    @property
    def l(self) -> int:
        return len(self.boundary_polys)

    def values(self, X: np.ndarray) -> np.ndarray:
        """Matrix of f_j values, shape (n, l)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.column_stack([f.evaluate_many(X) for f in self.boundary_polys])

    def to_json(self) -> dict:
        out = {"k": self.k, "bound": self.bound,
               "boundary_polys": [f.to_json() for f in self.boundary_polys]}
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_json(cls, obj) -> "AlgebraicDomain":
        return cls(int(obj["k"]), tuple(Polynomial.from_json(p) for p in obj["boundary_polys"]),
                   float(obj["bound"]), obj.get("name", ""))

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)

    @classmethod
    def load(cls, path) -> "AlgebraicDomain":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _membership_from_values(vals: np.ndarray, tau: float) -> Membership:
    near = np.abs(vals) <= tau
    if np.any(vals < -tau):
        return EXTERIOR
    n_near = int(near.sum())
    if n_near == 0:
        return INTERIOR
    if n_near == 1:
        return Membership(Kind.BOUNDARY, int(np.flatnonzero(near)[0]))
    raise AmbiguousBoundary(f"constraints {np.flatnonzero(near).tolist()} vanish simultaneously")


def classify(dom: AlgebraicDomain, x: Sequence[float], tau: float = TAU_B) -> Membership:
    if len(x) != dom.k:
        raise DimensionError(f"point has length {len(x)}, domain has k={dom.k}")
    vals = np.array([f(x) for f in dom.boundary_polys])
    return _membership_from_values(vals, tau)


def classify_many(dom: AlgebraicDomain, X: np.ndarray, tau: float = TAU_B):
    """Vectorised classify.

    Returns ``(kind, index, values)`` where kind is +1 interior, 0 boundary,
    -1 exterior and index is the vanishing constraint for boundary points
    (-1 otherwise).
    """
    vals = dom.values(X)
    near = np.abs(vals) <= tau
    neg = np.any(vals < -tau, axis=1)
    n_near = near.sum(axis=1)
    bad = (~neg) & (n_near >= 2)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise AmbiguousBoundary(f"point {np.atleast_2d(X)[i].tolist()} lies on several boundary hypersurfaces")
    kind = np.where(neg, -1, np.where(n_near == 1, 0, 1))
    index = np.where(kind == 0, np.argmax(near, axis=1), -1)
    return kind, index, vals


# --- validation -------------------------------------------------------------

@dataclass
class ValidationReport:
    regular: bool
    disjoint: bool
    bounded: bool
    min_grad_norm: float
    located: list[int]
    witnesses: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.regular and self.disjoint and self.bounded

    def to_json(self) -> dict:
        return {
            "ok": self.ok, "regular": self.regular, "disjoint": self.disjoint, "bounded": self.bounded,
            "min_grad_norm": self.min_grad_norm, "located": self.located,
            "witnesses": {k: list(map(float, v)) for k, v in self.witnesses.items()},
            "notes": self.notes,
        }

    def summary(self) -> str:
        mark = {True: "pass", False: "FAIL"}
        lines = [
            f"boundary regularity: {mark[self.regular]} (min |grad f| = {self.min_grad_norm:.6g})",
            f"disjointness:        {mark[self.disjoint]}",
            f"boundedness:         {mark[self.bounded]}",
        ]
        for k, v in self.witnesses.items():
            lines.append(f"  witness[{k}] = {np.round(np.asarray(v, float), 10).tolist()}")
        lines.extend("  " + n for n in self.notes)
        return "\n".join(lines)


def _cheb_nodes(n: int) -> np.ndarray:
    return np.cos(np.pi * (np.arange(n) + 0.5) / n)


def line_polys(f: Polynomial, points: np.ndarray, dirs: np.ndarray, half: float) -> np.ndarray:
    """Coefficients (ascending, in sigma in [-1, 1]) of f(p + sigma*half*d) per line.

    Interpolates at Chebyshev nodes, which is exact up to rounding because
    the restriction has degree at most deg f.
    """
    n = f.degree + 1
    nodes = _cheb_nodes(n)
    pts = points[:, None, :] + (half * nodes)[None, :, None] * dirs[:, None, :]
    vals = f.evaluate_many(pts.reshape(-1, f.nvars)).reshape(len(points), n)
    V = np.vander(nodes, n, increasing=True)
    return np.linalg.solve(V, vals.T).T


def locate_on_surface(f: Polynomial, n_points: int, bound: float, rng: np.random.Generator,
                      max_rounds: int = 50) -> np.ndarray:
    """Points on {f = 0} inside the box [-bound, bound]^k, found along random lines."""
    k = f.nvars
    half = 2.0 * bound * np.sqrt(k)
    found: list[np.ndarray] = []
    total = 0
    batch = max(n_points // 2, 16)
    for _ in range(max_rounds):
        P = rng.uniform(-bound, bound, size=(batch, k))
        D = rng.normal(size=(batch, k))
        D /= np.linalg.norm(D, axis=1, keepdims=True)
        C = line_polys(f, P, D, half)
        for p, d, c in zip(P, D, C):
            scale = np.abs(c).max()
            if scale == 0.0:
                continue
            c = np.where(np.abs(c) < 1e-14 * scale, 0.0, c)
            for r in _isolate(c, -1.0, 1.0):
                x = p + r.value * half * d
                if np.all(np.abs(x) <= bound):
                    found.append(x)
                    total += 1
        if total >= n_points:
            break
    if not found:
        return np.zeros((0, k))
    return _newton_onto(f, np.array(found[:n_points]))


def _newton_onto(f: Polynomial, X: np.ndarray, iters: int = 3) -> np.ndarray:
    """Polish points onto {f = 0} along the gradient."""
    grads = [partial(f, i) for i in range(f.nvars)]
    for _ in range(iters):
        v = f.evaluate_many(X)
        G = np.column_stack([g.evaluate_many(X) for g in grads])
        nn = np.einsum("ij,ij->i", G, G)
        ok = nn > 0
        X[ok] -= (v[ok] / nn[ok])[:, None] * G[ok]
    return X


def _pair_intersection(fa: Polynomial, fb: Polynomial, x0: np.ndarray, iters: int = 40):
    """Gauss-Newton on {fa = 0, fb = 0} from x0; returns (point, residual)."""
    ga = [partial(fa, i) for i in range(fa.nvars)]
    gb = [partial(fb, i) for i in range(fb.nvars)]
    x = np.array(x0, dtype=float)
    for _ in range(iters):
        r = np.array([fa(x), fb(x)])
        J = np.array([[g(x) for g in ga], [g(x) for g in gb]])
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        x = x + step
        if np.linalg.norm(step) < 1e-15 * (1 + np.linalg.norm(x)):
            break
    return x, float(np.abs([fa(x), fb(x)]).max())


def validate(dom: AlgebraicDomain, samples: int = 1000, seed: int = 0,
             tau_b: float = TAU_B, delta_g: float = DELTA_G, n_rays: int | None = None) -> ValidationReport:
    """Screen the standing assumptions on ``dom`` by sampling.

    (a) |grad f_j| > delta_g at located points of each S_j, (b) located
    boundary points of D̄ on S_j keep every other constraint away from zero,
    including after polishing the closest candidates towards a common zero,
    (c) rays from the origin never meet D beyond radius ``bound``.
    """
    if samples < 100:
        raise ValueError("validate needs samples >= 100")
    rng = np.random.default_rng(seed)
    witnesses: dict[str, np.ndarray] = {}
    notes: list[str] = []
    located: list[np.ndarray] = []
    min_norm = np.inf
    regular = True
    for j, f in enumerate(dom.boundary_polys):
        X = locate_on_surface(f, samples, dom.bound * 1.05, rng)
        located.append(X)
        if len(X) == 0:
            regular = False
            notes.append(f"no points located on S_{j}")
            continue
        G = np.column_stack([partial(f, i).evaluate_many(X) for i in range(dom.k)])
        norms = np.linalg.norm(G, axis=1)
        i = int(np.argmin(norms))
        if norms[i] < min_norm:
            min_norm = float(norms[i])
            if norms[i] <= delta_g:
                witnesses["regularity"] = X[i]
    if min_norm <= delta_g:
        regular = False

    disjoint = True
    for j, X in enumerate(located):
        if len(X) == 0 or dom.l == 1:
            continue
        vals = dom.values(X)
        others = np.delete(vals, j, axis=1)
        in_closure = np.all(others >= -tau_b, axis=1)
        hit = in_closure & np.any(np.abs(others) < tau_b, axis=1)
        if np.any(hit):
            disjoint = False
            witnesses.setdefault("disjointness", X[np.flatnonzero(hit)[0]])
            continue
        for jj in range(dom.l):
            if jj == j or not np.any(in_closure):
                continue
            fb = dom.boundary_polys[jj]
            Gb = np.column_stack([partial(fb, i).evaluate_many(X) for i in range(dom.k)])
            dist = np.abs(vals[:, jj]) / np.maximum(np.linalg.norm(Gb, axis=1), 1e-300)
            dist[~in_closure] = np.inf
            for i in np.argsort(dist)[:5]:
                if not np.isfinite(dist[i]):
                    break
                x, res = _pair_intersection(dom.boundary_polys[j], fb, X[i])
                if res < tau_b and np.all(np.abs(x) <= dom.bound) and np.all(dom.values(x)[0] >= -tau_b):
                    disjoint = False
                    witnesses.setdefault("disjointness", x)
                    break

    bounded = True
    witness = _unbounded_witness(dom, n_rays or max(samples, 360), rng, tau_b)
    if witness is not None:
        bounded = False
        witnesses["boundedness"] = witness
    return ValidationReport(regular, disjoint, bounded, float(min_norm),
                            [len(X) for X in located], witnesses, notes)


def _unbounded_witness(dom: AlgebraicDomain, n_rays: int, rng, tau_b: float):
    if dom.k == 2:
        th = 2 * np.pi * (np.arange(n_rays) + 0.5) / n_rays
        dirs = np.column_stack([np.cos(th), np.sin(th)])
    else:
        dirs = rng.normal(size=(n_rays, dom.k))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    R = dom.bound
    origin = np.zeros(dom.k)
    for d in dirs:
        cuts = [R]
        far = R
        for f in dom.boundary_polys:
            c = f.along_line(origin, d).coeff_array()
            nz = np.flatnonzero(np.abs(c) > 1e-14 * np.abs(c).max())
            if len(nz) == 0:
                continue
            c = c[: nz[-1] + 1]
            cauchy = 1.0 + np.max(np.abs(c[:-1] / c[-1])) if len(c) > 1 else 1.0
            far = max(far, cauchy)
            if len(c) > 1:
                cuts.extend(r.value for r in _isolate(c, R, max(cauchy, R)))
        cuts = sorted(cuts)
        probes = [0.5 * (a + b) for a, b in zip(cuts, cuts[1:]) if b > a] + [R, far + 1.0]
        P = np.array([s * d for s in probes])
        vals = dom.values(P)
        inside = np.all(vals > tau_b, axis=1)
        if np.any(inside):
            return P[np.flatnonzero(inside)[0]]
    return None
