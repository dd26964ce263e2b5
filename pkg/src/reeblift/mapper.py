"""Mapper estimate of the Reeb graph of g(x, y) = x1 on a sampled lift.

Overlapping intervals cover the g-range; inside each preimage the samples
are grouped by single linkage at radius epsilon in the ambient space; the
nerve (clusters sharing a sample) is the estimated Reeb graph.  Nothing here
looks at the domain polynomials, so it is independent of the sweep.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from . import _kernels
from .errors import ClusterInstability
from .graph import Edge, ReebGraph, Vertex, renumber, smooth_degree2
from .poly import Interval


@dataclass(frozen=True)
class MapperConfig:
    n_intervals: int = 20
    overlap: float = 0.35
    epsilon: float | None = None
    max_isolated_fraction: float = 0.01

    def __post_init__(self):
        if self.n_intervals < 2:
            raise ValueError("need at least 2 cover intervals")
        if not 0.0 < self.overlap < 0.9:
            raise ValueError("overlap must lie in (0, 0.9)")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


def cover(lo: float, hi: float, n: int, overlap: float) -> list[Interval]:
    """n equal intervals over [lo, hi], neighbours overlapping by ``overlap`` of a length."""
    length = (hi - lo) / (n - (n - 1) * overlap)
    step = length * (1.0 - overlap)
    out = [Interval(lo + i * step, lo + i * step + length) for i in range(n)]
    out[-1] = Interval(out[-1].lo, max(out[-1].hi, hi))
    return out


def cluster(points: np.ndarray, epsilon: float) -> np.ndarray:
    """Single-linkage labels at radius epsilon (labels in order of first appearance)."""
    if len(points) == 0:
        return np.zeros(0, dtype=np.int64)
    pairs = cKDTree(points).query_pairs(epsilon, output_type="ndarray")
    return _kernels.connected_labels(len(points), pairs.astype(np.int64))


def mapper_nerve(points: np.ndarray, values: np.ndarray, cfg: MapperConfig, epsilon: float) -> ReebGraph:
    """Unsmoothed Mapper graph: one vertex per cluster, one edge per overlapping cluster pair."""
    if len(points) == 0:
        raise ValueError("no samples")
    intervals = cover(float(values.min()), float(values.max()), cfg.n_intervals, cfg.overlap)
    n = len(points)
    verts: list[Vertex] = []
    edges: list[Edge] = []
    prev_labels = None
    prev_offset = 0
    for iv in intervals:
        idx = np.flatnonzero((values >= iv.lo) & (values <= iv.hi))
        labels = cluster(points[idx], epsilon)
        n_clusters = int(labels.max()) + 1 if len(labels) else 0
        sizes = np.bincount(labels, minlength=n_clusters)
        isolated = int(np.sum(sizes == 1))
        if len(idx) and isolated > cfg.max_isolated_fraction * len(idx):
            raise ClusterInstability(
                f"{isolated} isolated samples in interval [{iv.lo:.4f}, {iv.hi:.4f}]; epsilon {epsilon:g} too small")
        offset = len(verts)
        for c in range(n_clusters):
            members = points[idx[labels == c]]
            verts.append(Vertex(offset + c, iv.mid, tuple(members[:, :2].mean(axis=0).tolist()), False))
        full = np.full(n, -1, dtype=np.int64)
        full[idx] = labels
        if prev_labels is not None:
            shared = (prev_labels >= 0) & (full >= 0)
            pairs = np.unique(np.column_stack([prev_labels[shared], full[shared]]), axis=0)
            for a, b in pairs:
                va, vb = verts[prev_offset + a], verts[offset + b]
                edges.append(Edge(len(edges), (va.id, vb.id), Interval(va.value, vb.value)))
        prev_labels, prev_offset = full, offset
    return ReebGraph(verts, edges, {"source": "mapper", "n_intervals": cfg.n_intervals,
                                    "overlap": cfg.overlap, "epsilon": epsilon})


def mapper_reeb(samples, cfg: MapperConfig = MapperConfig(), values: np.ndarray | None = None,
                pitch: float | None = None) -> ReebGraph:
    """Smoothed Mapper graph of a LiftResult (or a raw point array plus values).

    Without an explicit epsilon the radius is three times the base-grid pitch.
    """
    if hasattr(samples, "points"):
        points = samples.points
        values = samples.gvalues if values is None else values
        pitch = samples.pitch if pitch is None else pitch
    else:
        points = np.asarray(samples, dtype=float)
        values = points[:, 0] if values is None else np.asarray(values, dtype=float)
    eps = cfg.epsilon
    if eps is None:
        if pitch is None:
            raise ValueError("epsilon not set and no grid pitch available")
        eps = 3.0 * pitch
    raw = mapper_nerve(points, values, cfg, eps)
    return smooth_degree2(renumber(raw), keep_critical=False)
