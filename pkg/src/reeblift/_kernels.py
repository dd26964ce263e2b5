"""Hot numeric loops.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy
version with identical results.  The numba path is used when numba imports
and ``REEBLIFT_DISABLE_NUMBA`` is unset (or "0"); both paths stay importable
as ``<name>_numba`` / ``<name>_numpy`` for tests and benchmarks.
"""
import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return wrap


def _flag_disabled():
    return os.environ.get("REEBLIFT_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")


USE_NUMBA = HAVE_NUMBA and not _flag_disabled()
BACKEND = "numba" if USE_NUMBA else "numpy"

_CHUNK = 1 << 16


# --- batch polynomial evaluation -------------------------------------------

@njit(cache=True)
def eval_monomials_numba(exps, coeffs, X):
    n, nv = X.shape
    nt = exps.shape[0]
    out = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for t in range(nt):
            m = coeffs[t]
            for v in range(nv):
                e = exps[t, v]
                if e:
                    m *= X[i, v] ** e
            acc += m
        out[i] = acc
    return out


def eval_monomials_numpy(exps, coeffs, X):
    X = np.asarray(X, dtype=np.float64)
    out = np.empty(X.shape[0])
    if exps.shape[0] == 0:
        out[:] = 0.0
        return out
    for s in range(0, X.shape[0], _CHUNK):
        blk = X[s:s + _CHUNK]
        mono = np.prod(blk[:, None, :] ** exps[None, :, :], axis=2)
        out[s:s + _CHUNK] = mono @ coeffs
    return out


# --- radial fibre scale -----------------------------------------------------
# Solve sum_j c_j (r u_j)^(2 m_j) = P for r >= 0, per (base value, direction).

@njit(cache=True)
def _radial_one(P, u, coeffs, exps):
    if P <= 0.0:
        return 0.0
    hi = np.inf
    for j in range(u.shape[0]):
        a = coeffs[j] * abs(u[j]) ** (2 * exps[j])
        if a > 0.0:
            b = (P / a) ** (1.0 / (2 * exps[j]))
            if b < hi:
                hi = b
    lo = 0.0
    r = hi
    # g is convex and increasing on r >= 0, so Newton from hi descends monotonically
    for _ in range(100):
        s = 0.0
        ds = 0.0
        for j in range(u.shape[0]):
            e2 = 2 * exps[j]
            ru = r * u[j]
            s += coeffs[j] * ru ** e2
            if r > 0.0:
                ds += coeffs[j] * e2 * ru ** e2 / r
        g = s - P
        if g > 0.0:
            hi = r
        else:
            lo = r
        if g == 0.0 or ds <= 0.0:
            break
        step = r - g / ds
        if not (lo <= step <= hi):
            step = 0.5 * (lo + hi)
        if abs(step - r) <= 1e-15 * r:
            r = step
            break
        r = step
    return r


@njit(cache=True)
def radial_scale_numba(P, U, coeffs, exps):
    n = P.shape[0]
    m = U.shape[0]
    out = np.zeros((n, m))
    for i in range(n):
        for k in range(m):
            out[i, k] = _radial_one(P[i], U[k], coeffs, exps)
    return out


def radial_scale_numpy(P, U, coeffs, exps):
    P = np.asarray(P, dtype=np.float64)[:, None]
    e2 = 2 * np.asarray(exps)
    a = coeffs[None, :] * np.abs(U) ** e2[None, :]          # (m, d)
    with np.errstate(divide="ignore"):
        bounds = np.where(a[None] > 0, (np.maximum(P, 0.0)[:, :, None] / a[None]) ** (1.0 / e2), np.inf)
    hi = bounds.min(axis=2)                                  # (n, m)
    lo = np.zeros_like(hi)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        s = np.sum(a[None] * mid[:, :, None] ** e2, axis=2)
        over = s > P
        hi = np.where(over, mid, hi)
        lo = np.where(over, lo, mid)
    r = 0.5 * (lo + hi)
    # one Newton polish
    s = np.sum(a[None] * r[:, :, None] ** e2, axis=2)
    ds = np.sum(a[None] * e2 * r[:, :, None] ** (e2 - 1), axis=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(ds > 0, r - (s - P) / ds, r)
    return np.where(P > 0, r, 0.0)


# --- connected components from an edge list --------------------------------

@njit(cache=True)
def connected_labels_numba(n, pairs):
    parent = np.arange(n)
    for e in range(pairs.shape[0]):
        a = pairs[e, 0]
        b = pairs[e, 1]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a < b:
            parent[b] = a
        elif b < a:
            parent[a] = b
    labels = np.full(n, -1)
    root_label = np.full(n, -1)
    nxt = 0
    for i in range(n):
        r = i
        while parent[r] != r:
            r = parent[r]
        if root_label[r] < 0:
            root_label[r] = nxt
            nxt += 1
        labels[i] = root_label[r]
    return labels


def connected_labels_numpy(n, pairs):
    labels = np.arange(n)
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    a, b = pairs[:, 0], pairs[:, 1]
    while True:
        old = labels.copy()
        np.minimum.at(labels, a, labels[b])
        np.minimum.at(labels, b, labels[a])
        while True:
            jumped = labels[labels]
            if np.array_equal(jumped, labels):
                break
            labels = jumped
        if np.array_equal(old, labels):
            break
    _, inv = np.unique(labels, return_inverse=True)
    return inv.astype(np.int64)


if USE_NUMBA:
    eval_monomials = eval_monomials_numba
    radial_scale = radial_scale_numba
    connected_labels = connected_labels_numba
else:
    eval_monomials = eval_monomials_numpy
    radial_scale = radial_scale_numpy
    connected_labels = connected_labels_numpy
