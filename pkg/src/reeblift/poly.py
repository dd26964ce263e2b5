"""Sparse real multivariate polynomials and univariate real-root isolation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import _kernels
from .errors import DegenerateInput, DegreeOverflow, DimensionError

MAX_DEGREE = 64
ROOT_TOL = 1e-10


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, t: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= t <= self.hi + tol

    def overlaps(self, other: "Interval", tol: float = 0.0) -> bool:
        return self.lo <= other.hi + tol and other.lo <= self.hi + tol

    def as_list(self) -> list[float]:
        return [self.lo, self.hi]


class Polynomial:
    """Immutable sparse polynomial in ``nvars`` variables with float coefficients.

    ``terms`` maps exponent tuples to nonzero coefficients.  Variables are
    0-indexed; the string form names them ``x1 .. xn``.
    """

    __slots__ = ("nvars", "_terms", "_exps", "_coeffs")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], float] | None = None):
        if int(nvars) != nvars or nvars < 1:
            raise DimensionError(f"nvars must be a positive integer, got {nvars!r}")
        nvars = int(nvars)
        clean: dict[tuple[int, ...], float] = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars:
                raise DimensionError(f"exponent {exp} has length {len(exp)}, expected {nvars}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            c = float(c)
            if c != 0.0:
                clean[exp] = clean.get(exp, 0.0) + c
        clean = {e: c for e, c in clean.items() if c != 0.0}
        if clean and max(sum(e) for e in clean) > MAX_DEGREE:
            raise DegreeOverflow(f"total degree exceeds cap {MAX_DEGREE}")
        self.nvars = nvars
        self._terms = clean
        self._exps = None
        self._coeffs = None

    # construction helpers

    @classmethod
    def constant(cls, c: float, nvars: int) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, i: int, nvars: int) -> "Polynomial":
        _check_index(i, nvars)
        exp = [0] * nvars
        exp[i] = 1
        return cls(nvars, {tuple(exp): 1.0})

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[float]) -> "Polynomial":
        """Univariate polynomial from ascending coefficients."""
        return cls(1, {(i,): c for i, c in enumerate(coeffs)})

    # basic properties

    @property
    def terms(self) -> Mapping[tuple[int, ...], float]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def degree_in(self, i: int) -> int:
        _check_index(i, self.nvars)
        return max((e[i] for e in self._terms), default=0)

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Exponent matrix (T, nvars) and coefficient vector (T,) for batch kernels."""
        if self._exps is None:
            items = sorted(self._terms.items())
            self._exps = np.array([e for e, _ in items], dtype=np.int64).reshape(-1, self.nvars)
            self._coeffs = np.array([c for _, c in items], dtype=np.float64)
        return self._exps, self._coeffs

    def coeff_array(self) -> np.ndarray:
        """Ascending coefficient array of a univariate polynomial."""
        if self.nvars != 1:
            raise DimensionError("coeff_array needs a univariate polynomial")
        out = np.zeros(self.degree + 1)
        for (e,), c in self._terms.items():
            out[e] = c
        return out

    # evaluation

    def __call__(self, x: Sequence[float]) -> float:
        return evaluate(self, x)

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.nvars:
            raise DimensionError(f"expected points of shape (n, {self.nvars}), got {X.shape}")
        exps, coeffs = self.arrays()
        if len(coeffs) == 0:
            return np.zeros(X.shape[0])
        return _kernels.eval_monomials(exps, coeffs, X)

    # arithmetic

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise DimensionError(f"nvars mismatch: {self.nvars} vs {other.nvars}")
            return other
        return Polynomial.constant(float(other), self.nvars)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0.0) + c
        return Polynomial(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            other = float(other)
            return Polynomial(self.nvars, {e: c * other for e, c in self._terms.items()})
        other = self._coerce(other)
        out: dict[tuple[int, ...], float] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0.0) + c1 * c2
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if int(n) != n or n < 0:
            raise ValueError("only non-negative integer powers")
        out = Polynomial.constant(1.0, self.nvars)
        for _ in range(int(n)):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self._terms.items())))

    def allclose(self, other: "Polynomial", atol: float = 1e-12) -> bool:
        diff = self - other
        return all(abs(c) <= atol for c in diff._terms.values())

    def embed(self, nvars: int, offset: int = 0) -> "Polynomial":
        """Same polynomial viewed in ``nvars`` variables, its own starting at ``offset``."""
        if offset < 0 or offset + self.nvars > nvars:
            raise DimensionError(f"cannot embed {self.nvars} variables at offset {offset} into {nvars}")
        pad_l, pad_r = (0,) * offset, (0,) * (nvars - offset - self.nvars)
        return Polynomial(nvars, {pad_l + e + pad_r: c for e, c in self._terms.items()})

    # calculus and substitution

    def partial(self, i: int) -> "Polynomial":
        return partial(self, i)

    def restrict(self, i: int, t: float) -> "Polynomial":
        return restrict(self, i, t)

    def along_line(self, point: Sequence[float], direction: Sequence[float]) -> "Polynomial":
        """Univariate polynomial s -> p(point + s * direction)."""
        point = np.asarray(point, dtype=float)
        direction = np.asarray(direction, dtype=float)
        if point.shape != (self.nvars,) or direction.shape != (self.nvars,):
            raise DimensionError("point/direction length must equal nvars")
        acc = np.zeros(self.degree + 1)
        for exp, c in self._terms.items():
            term = np.array([c])
            for v, e in enumerate(exp):
                if e:
                    term = npoly.polymul(term, npoly.polypow([point[v], direction[v]], e))
            acc[: len(term)] += term
        return Polynomial.from_coeffs(acc)

    # serialisation

    def to_json(self) -> dict:
        return {
            "nvars": self.nvars,
            "terms": [{"coeff": c, "exp": list(e)} for e, c in sorted(self._terms.items())],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "Polynomial":
        nvars = obj["nvars"]
        terms: dict[tuple[int, ...], float] = {}
        for t in obj["terms"]:
            exp = tuple(t["exp"])
            if any(not isinstance(e, int) or isinstance(e, bool) for e in exp):
                raise ValueError(f"exponents must be integers, got {t['exp']!r}")
            if exp in terms:
                raise ValueError(f"duplicate exponent vector {list(exp)}")
            terms[exp] = t["coeff"]
        return cls(nvars, terms)

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for exp, c in sorted(self._terms.items(), key=lambda it: (sum(it[0]), it[0])):
            mono = "*".join(
                f"x{v + 1}" + (f"^{e}" if e > 1 else "") for v, e in enumerate(exp) if e
            )
            if not mono:
                parts.append(f"{c:g}")
            elif c == 1.0:
                parts.append(mono)
            elif c == -1.0:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c:g}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _check_index(i: int, nvars: int) -> None:
    if not 0 <= i < nvars:
        raise DimensionError(f"variable index {i} out of range for {nvars} variables")


def evaluate(p: Polynomial, x: Sequence[float]) -> float:
    """Value of ``p`` at ``x``; exact for small integer inputs and coefficients."""
    if len(x) != p.nvars:
        raise DimensionError(f"point has length {len(x)}, polynomial has {p.nvars} variables")
    total = 0.0
    for exp, c in p._terms.items():
        total += c * math.prod(xi ** e for xi, e in zip(x, exp) if e)
    return total


def partial(p: Polynomial, i: int) -> Polynomial:
    _check_index(i, p.nvars)
    out = {}
    for exp, c in p._terms.items():
        if exp[i]:
            e = list(exp)
            e[i] -= 1
            out[tuple(e)] = c * exp[i]
    return Polynomial(p.nvars, out)


def product(ps: Sequence[Polynomial], nvars: int | None = None) -> Polynomial:
    """Product of ``ps``; the empty product is the constant 1 in ``nvars`` variables."""
    if not ps:
        return Polynomial.constant(1.0, nvars or 1)
    out = ps[0]
    for q in ps[1:]:
        if q.nvars != out.nvars:
            raise DimensionError("all factors must share nvars")
        out = out * q
    return out


def restrict(p: Polynomial, i: int, t: float) -> Polynomial:
    """Substitute ``x_i = t``; the result has one variable fewer.

    Restricting a univariate polynomial yields a constant in one variable.
    """
    _check_index(i, p.nvars)
    nv = max(p.nvars - 1, 1)
    out: dict[tuple[int, ...], float] = {}
    for exp, c in p._terms.items():
        rest = exp[:i] + exp[i + 1:] if p.nvars > 1 else (0,)
        out[rest] = out.get(rest, 0.0) + c * t ** exp[i]
    return Polynomial(nv, out)


# --- univariate real roots --------------------------------------------------

class Root(NamedTuple):
    value: float
    tangential: bool


def _horner(c: np.ndarray, t: float) -> float:
    acc = 0.0
    for a in c[::-1]:
        acc = acc * t + a
    return acc


def _bisect(c: np.ndarray, a: float, b: float, fa: float) -> float:
    for _ in range(200):
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = _horner(c, m)
        if fm == 0.0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def _zero_tol(c: np.ndarray, t: float) -> float:
    # Horner rounding bound at t, with headroom for coefficients that are themselves rounded
    return 1e-13 * _horner(np.abs(c), abs(t))


def _isolate(c: np.ndarray, lo: float, hi: float) -> list[Root]:
    """Roots of the polynomial with ascending coefficients ``c`` inside [lo, hi].

    Recursive on the derivative: between consecutive critical points the
    polynomial is monotone, so a sign change brackets exactly one root;
    critical points where the value vanishes are multiple roots.
    """
    nz = np.flatnonzero(c)
    if len(nz) == 0:
        raise DegenerateInput("polynomial is identically zero")
    c = c[: nz[-1] + 1]
    deg = len(c) - 1
    if deg == 0:
        return []
    if deg == 1:
        with np.errstate(over="ignore", divide="ignore"):
            r = -c[0] / c[1]
        return [Root(float(r), False)] if lo <= r <= hi else []
    dc = npoly.polyder(c)
    crit = [r.value for r in _isolate(dc, lo, hi) if lo < r.value < hi]
    pts = [lo] + crit + [hi]
    vals = [_horner(c, t) for t in pts]
    tols = [_zero_tol(c, t) for t in pts]
    roots: list[Root] = []
    for k, (t, v) in enumerate(zip(pts, vals)):
        if abs(v) <= tols[k]:
            tangential = False
            if 0 < k < len(pts) - 1:
                left = _horner(dc, 0.5 * (pts[k - 1] + t))
                right = _horner(dc, 0.5 * (t + pts[k + 1]))
                tangential = (left > 0) != (right > 0)
            roots.append(Root(float(t), bool(tangential)))
        if k + 1 < len(pts):
            v2 = vals[k + 1]
            if abs(v) > tols[k] and abs(v2) > tols[k + 1] and (v > 0) != (v2 > 0):
                roots.append(Root(float(_bisect(c, t, pts[k + 1], v)), False))
    roots.sort()
    return roots


def isolate_real_roots(p: Polynomial, window: Interval, tol: float = ROOT_TOL) -> list[Root]:
    """Real roots of univariate ``p`` in ``window`` with even-multiplicity flags.

    Roots closer than ``tol`` are reported once.
    """
    if p.nvars != 1:
        raise DimensionError("real_roots needs a univariate polynomial")
    if p.is_zero():
        raise DegenerateInput("polynomial is identically zero")
    roots = _isolate(p.coeff_array(), window.lo, window.hi)
    merged: list[Root] = []
    for r in roots:
        if merged and r.value - merged[-1].value <= tol:
            prev = merged[-1]
            merged[-1] = Root(prev.value, prev.tangential or r.tangential)
        else:
            merged.append(r)
    return merged


def real_roots(p: Polynomial, window: Interval, tol: float = ROOT_TOL) -> list[float]:
    return [r.value for r in isolate_real_roots(p, window, tol)]
