"""Reeb graph container and small-graph utilities (smoothing, Betti number, isomorphism)."""
from __future__ import annotations

import json
import warnings
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import SizeLimit
from .poly import Interval

MAX_ISO_VERTICES = 64


@dataclass(frozen=True)
class Vertex:
    id: int
    value: float
    embed: tuple[float, float] | None = None
    critical: bool = False


@dataclass(frozen=True)
class Edge:
    id: int
    ends: tuple[int, int]
    interval: Interval
    polyline: tuple[tuple[float, float], ...] | None = None


@dataclass(frozen=True)
class ReebGraph:
    vertices: tuple[Vertex, ...] = ()
    edges: tuple[Edge, ...] = ()
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def vertex(self, vid: int) -> Vertex:
        for v in self.vertices:
            if v.id == vid:
                return v
        raise KeyError(vid)

    def degrees(self) -> dict[int, int]:
        deg = {v.id: 0 for v in self.vertices}
        for e in self.edges:
            for end in e.ends:
                deg[end] += 1
        return deg

    def degree_sequence(self) -> list[int]:
        return sorted(self.degrees().values())

    def degree_counts(self) -> Counter:
        return Counter(self.degrees().values())

    def n_components(self) -> int:
        parent = {v.id: v.id for v in self.vertices}

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for e in self.edges:
            ra, rb = find(e.ends[0]), find(e.ends[1])
            if ra != rb:
                parent[ra] = rb
        return len({find(v) for v in parent})

    def has_loops(self) -> bool:
        return any(e.ends[0] == e.ends[1] for e in self.edges)

    # serialisation

    def to_json(self) -> dict:
        verts = [{"id": v.id, "value": v.value, "embed": list(v.embed) if v.embed is not None else None,
                  "critical": v.critical} for v in self.vertices]
        edges = []
        for e in self.edges:
            rec = {"id": e.id, "ends": list(e.ends), "interval": e.interval.as_list()}
            if e.polyline is not None:
                rec["polyline"] = [list(p) for p in e.polyline]
            edges.append(rec)
        out = {"vertices": verts, "edges": edges}
        if self.meta:
            out["meta"] = self.meta
        return out

    @classmethod
    def from_json(cls, obj) -> "ReebGraph":
        verts = [Vertex(int(v["id"]), float(v["value"]),
                        tuple(v["embed"]) if v.get("embed") is not None else None,
                        bool(v.get("critical", False))) for v in obj["vertices"]]
        edges = [Edge(int(e["id"]), (int(e["ends"][0]), int(e["ends"][1])), Interval(*e["interval"]),
                      tuple(tuple(p) for p in e["polyline"]) if e.get("polyline") else None)
                 for e in obj["edges"]]
        return cls(verts, edges, dict(obj.get("meta", {})))

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)

    @classmethod
    def load(cls, path) -> "ReebGraph":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def to_dot(self, name: str = "reeb") -> str:
        deg = self.degrees()
        lines = [f"graph {name} {{"]
        for v in sorted(self.vertices, key=lambda v: (v.value, v.id)):
            shape = "box" if v.critical else "ellipse"
            lines.append(f'  v{v.id} [label="{v.value:.4f} (deg {deg[v.id]})", shape={shape}];')
        val = {v.id: v.value for v in self.vertices}
        for e in sorted(self.edges, key=lambda e: (min(val[e.ends[0]], val[e.ends[1]]), e.id)):
            a, b = sorted(e.ends, key=lambda i: (val[i], i))
            lines.append(f"  v{a} -- v{b};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def renumber(g: ReebGraph) -> ReebGraph:
    """Dense ids ordered by (value, old id); edges ordered by their ends."""
    order = sorted(g.vertices, key=lambda v: (v.value, v.id))
    new_id = {v.id: i for i, v in enumerate(order)}
    verts = [replace(v, id=new_id[v.id]) for v in order]
    edges = sorted((((new_id[e.ends[0]], new_id[e.ends[1]]), e.id), e) for e in g.edges)
    out = []
    for i, ((ends, _), e) in enumerate(edges):
        poly = e.polyline
        if ends[0] > ends[1]:
            ends = (ends[1], ends[0])
            poly = tuple(reversed(poly)) if poly else poly
        out.append(replace(e, id=i, ends=ends, polyline=poly))
    return ReebGraph(verts, out, g.meta)


def smooth_degree2(g: ReebGraph, keep_critical: bool = True) -> ReebGraph:
    """Splice out degree-2 vertices until none can be removed.

    A vertex is kept when its two edges lead to the same neighbour (splicing
    would create a loop), or when it and both neighbours form a triangle of
    degree-2 vertices, so a bare cycle bottoms out at three vertices.
    """
    verts = {v.id: v for v in g.vertices}
    edges = {e.id: e for e in g.edges}
    incident: dict[int, set[int]] = defaultdict(set)
    for e in edges.values():
        incident[e.ends[0]].add(e.id)
        incident[e.ends[1]].add(e.id)
    next_eid = max(edges, default=-1) + 1

    def other(e: Edge, v: int) -> int:
        return e.ends[1] if e.ends[0] == v else e.ends[0]

    def removable(v: Vertex) -> bool:
        if len(incident[v.id]) != 2 or (keep_critical and v.critical):
            return False
        e1, e2 = (edges[i] for i in sorted(incident[v.id]))
        u, w = other(e1, v.id), other(e2, v.id)
        if u == w or u == v.id:
            return False
        if len(incident[u]) == 2 and len(incident[w]) == 2:
            if any(other(edges[i], u) == w for i in incident[u]):
                return False
        return True

    changed = True
    while changed:
        changed = False
        for v in sorted(verts.values(), key=lambda v: (v.value, v.id)):
            if not removable(v):
                continue
            e1, e2 = (edges[i] for i in sorted(incident[v.id]))
            u, w = other(e1, v.id), other(e2, v.id)
            poly = None
            if e1.polyline is not None and e2.polyline is not None:
                p1 = e1.polyline if e1.ends[1] == v.id else tuple(reversed(e1.polyline))
                p2 = e2.polyline if e2.ends[0] == v.id else tuple(reversed(e2.polyline))
                poly = p1 + p2[1:]
            merged = Edge(next_eid, (u, w),
                          Interval(min(e1.interval.lo, e2.interval.lo), max(e1.interval.hi, e2.interval.hi)),
                          poly)
            next_eid += 1
            for e in (e1, e2):
                del edges[e.id]
                incident[e.ends[0]].discard(e.id)
                incident[e.ends[1]].discard(e.id)
            del verts[v.id]
            del incident[v.id]
            edges[merged.id] = merged
            incident[u].add(merged.id)
            incident[w].add(merged.id)
            changed = True
            break
    return renumber(ReebGraph(verts.values(), edges.values(), g.meta))


def merge_close_vertices(g: ReebGraph, window: float) -> ReebGraph:
    """Contract edges between critical vertices whose values differ by at most ``window``."""
    if window <= 0:
        return g
    val = {v.id: v.value for v in g.vertices}
    crit = {v.id for v in g.vertices if v.critical}
    parent = {v.id: v.id for v in g.vertices}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in g.edges:
        a, b = e.ends
        if a != b and a in crit and b in crit and abs(val[a] - val[b]) <= window:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[Vertex]] = defaultdict(list)
    for v in g.vertices:
        groups[find(v.id)].append(v)
    verts = []
    for root, members in groups.items():
        if len(members) == 1:
            verts.append(members[0])
            continue
        embeds = [m.embed for m in members if m.embed is not None]
        embed = tuple(np.mean(embeds, axis=0).tolist()) if embeds else None
        verts.append(Vertex(root, float(np.mean([m.value for m in members])), embed,
                            any(m.critical for m in members)))
    edges = []
    for e in g.edges:
        a, b = find(e.ends[0]), find(e.ends[1])
        if a == b:
            continue
        edges.append(replace(e, ends=(a, b)))
    return renumber(ReebGraph(verts, edges, g.meta))


def betti1(g: ReebGraph) -> int:
    """E - V + (number of components); warns when the graph is disconnected."""
    c = g.n_components()
    if c != 1:
        warnings.warn(f"betti1 on a graph with {c} components", stacklevel=2)
    return g.n_edges - g.n_vertices + c


@dataclass(frozen=True)
class IsoResult:
    isomorphic: bool
    mapping: dict[int, int] | None = None

    def __bool__(self):
        return self.isomorphic


def _adjacency(g: ReebGraph) -> tuple[list[int], np.ndarray]:
    ids = [v.id for v in g.vertices]
    pos = {vid: i for i, vid in enumerate(ids)}
    A = np.zeros((len(ids), len(ids)), dtype=np.int64)
    for e in g.edges:
        i, j = pos[e.ends[0]], pos[e.ends[1]]
        A[i, j] += 1
        if i != j:
            A[j, i] += 1
    return ids, A


def isomorphic(a: ReebGraph, b: ReebGraph) -> IsoResult:
    """Multigraph isomorphism by backtracking with degree pruning.

    Function values are ignored except to order candidates.
    """
    if max(a.n_vertices, b.n_vertices) > MAX_ISO_VERTICES:
        raise SizeLimit(f"isomorphism limited to {MAX_ISO_VERTICES} vertices")
    if a.n_vertices != b.n_vertices or a.n_edges != b.n_edges:
        return IsoResult(False)
    if a.degree_sequence() != b.degree_sequence():
        return IsoResult(False)
    ids_a, A = _adjacency(a)
    ids_b, B = _adjacency(b)
    da, db = A.sum(axis=1) + np.diag(A), B.sum(axis=1) + np.diag(B)
    va = [a.vertex(i).value for i in ids_a]
    vb = [b.vertex(i).value for i in ids_b]
    n = len(ids_a)

    # order a's vertices so each new one is adjacent to an earlier one when possible
    order: list[int] = []
    remaining = set(range(n))
    while remaining:
        start = min(remaining, key=lambda i: (-da[i], va[i], i))
        queue = [start]
        remaining.discard(start)
        while queue:
            i = queue.pop(0)
            order.append(i)
            for j in sorted(np.flatnonzero(A[i]), key=lambda j: (-da[j], va[j], j)):
                if j in remaining:
                    remaining.discard(j)
                    queue.append(j)
    cand = {i: sorted((j for j in range(n) if db[j] == da[i]), key=lambda j: (db[j], vb[j], j))
            for i in range(n)}
    phi: dict[int, int] = {}
    used = set()

    def extend(k: int) -> bool:
        if k == n:
            return True
        i = order[k]
        for j in cand[i]:
            if j in used or A[i, i] != B[j, j]:
                continue
            if all(A[i, p] == B[j, q] for p, q in phi.items()):
                phi[i] = j
                used.add(j)
                if extend(k + 1):
                    return True
                del phi[i]
                used.discard(j)
        return False

    if extend(0):
        return IsoResult(True, {ids_a[i]: ids_b[j] for i, j in phi.items()})
    return IsoResult(False)


def path_graph(n: int) -> ReebGraph:
    verts = [Vertex(i, float(i)) for i in range(n)]
    edges = [Edge(i, (i, i + 1), Interval(float(i), float(i + 1))) for i in range(n - 1)]
    return ReebGraph(verts, edges)


def cycle_graph(n: int) -> ReebGraph:
    verts = [Vertex(i, float(i)) for i in range(n)]
    edges = [Edge(i, (i, (i + 1) % n), Interval(float(min(i, (i + 1) % n)), float(max(i, (i + 1) % n))))
             for i in range(n)]
    return ReebGraph(verts, edges)


def from_edge_list(pairs: Sequence[tuple[int, int]], values: Sequence[float] | None = None) -> ReebGraph:
    ids = sorted({i for p in pairs for i in p})
    vals = {i: float(values[i]) if values is not None else float(i) for i in ids}
    verts = [Vertex(i, vals[i]) for i in ids]
    edges = [Edge(k, (a, b), Interval(min(vals[a], vals[b]), max(vals[a], vals[b]))) for k, (a, b) in enumerate(pairs)]
    return ReebGraph(verts, edges)
