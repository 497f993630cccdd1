"""Weighted graphs over dense integer vertices, with degrees and SCCs.

Graphs are immutable after construction and safe to share across threads.
Undirected edges are canonicalized with u < v and stored once; directed
graphs keep edges as given and may carry self-loops only when explicitly
enabled.  Per-vertex degrees are exact (math.fsum over incident weights),
which keeps entropy values reproducible regardless of edge order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DuplicateEdge,
    IndexOutOfRange,
    NonFiniteWeight,
    NotDirected,
    SelfLoopNotAllowed,
)

__all__ = [
    "WeightedGraph",
    "DegreeProfile",
    "build_graph",
    "degree_profile",
    "strongly_connected_components",
]


def _csr_from_pairs(n, src, dst, wts):
    """Build CSR arrays (indptr, indices, weights) sorted by (src, dst)."""
    order = np.lexsort((dst, src))
    src = src[order]
    dst = dst[order]
    wts = wts[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, dst, wts


class WeightedGraph:
    """Immutable weighted graph with vertices 0..n-1.

    Entropy routines require strictly positive weights; similarity graphs
    may hold signed weights until filtration takes absolute values.
    """

    __slots__ = (
        "n",
        "directed",
        "m",
        "edge_u",
        "edge_v",
        "edge_w",
        "degrees",
        "out_degrees",
        "in_degrees",
        "_adj",
        "_in_adj",
    )

    def __init__(self, n, directed, edge_u, edge_v, edge_w):
        self.n = int(n)
        self.directed = bool(directed)
        self.edge_u = edge_u
        self.edge_v = edge_v
        self.edge_w = edge_w
        self.m = len(edge_u)
        if self.directed:
            self.out_degrees = self._exact_degrees([(edge_u, edge_w)])
            self.in_degrees = self._exact_degrees([(edge_v, edge_w)])
            self.degrees = None
            self._adj = _csr_from_pairs(self.n, edge_u, edge_v, edge_w)
            self._in_adj = _csr_from_pairs(self.n, edge_v, edge_u, edge_w)
        else:
            self.degrees = self._exact_degrees(
                [(edge_u, edge_w), (edge_v, edge_w)]
            )
            self.out_degrees = None
            self.in_degrees = None
            both_src = np.concatenate([edge_u, edge_v])
            both_dst = np.concatenate([edge_v, edge_u])
            both_w = np.concatenate([edge_w, edge_w])
            self._adj = _csr_from_pairs(self.n, both_src, both_dst, both_w)
            self._in_adj = None

    def _exact_degrees(self, sides):
        buckets = [[] for _ in range(self.n)]
        for idx, wts in sides:
            for v, w in zip(idx.tolist(), wts.tolist()):
                buckets[v].append(w)
        return np.array([math.fsum(b) for b in buckets])

    def neighbors(self, v):
        """(indices, weights) of v's out-neighbors (all neighbors if undirected)."""
        indptr, idx, wts = self._adj
        return idx[indptr[v]:indptr[v + 1]], wts[indptr[v]:indptr[v + 1]]

    def in_neighbors(self, v):
        if not self.directed:
            return self.neighbors(v)
        indptr, idx, wts = self._in_adj
        return idx[indptr[v]:indptr[v + 1]], wts[indptr[v]:indptr[v + 1]]

    def edges(self):
        """Edge triples (u, v, w) in canonical sorted order."""
        return list(
            zip(self.edge_u.tolist(), self.edge_v.tolist(), self.edge_w.tolist())
        )

    @property
    def volume(self):
        """Sum of vertex degrees: 2x total weight undirected, 1x directed."""
        if self.directed:
            return math.fsum(self.out_degrees.tolist())
        return math.fsum(self.degrees.tolist())

    @property
    def total_weight(self):
        return math.fsum(self.edge_w.tolist())

    @property
    def min_weight(self):
        if self.m == 0:
            return None
        return float(self.edge_w.min())

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return f"WeightedGraph({kind}, n={self.n}, m={self.m})"


def build_graph(n, directed, edges, allow_self_loops=False):
    """Validate an edge list and return an immutable WeightedGraph.

    Undirected edges are canonicalized with u < v; a repeated (u, v) pair in
    either orientation is rejected.  Self-loops are rejected for undirected
    graphs, and for directed graphs unless allow_self_loops is set.
    """
    n = int(n)
    if n < 1:
        raise IndexOutOfRange(f"vertex count must be >= 1, got {n}")
    us, vs, ws = [], [], []
    for u, v, w in edges:
        u = int(u)
        v = int(v)
        w = float(w)
        if not (0 <= u < n) or not (0 <= v < n):
            raise IndexOutOfRange(f"edge ({u}, {v}) out of range for n={n}")
        if not math.isfinite(w):
            raise NonFiniteWeight(f"edge ({u}, {v}) has non-finite weight {w}")
        if u == v:
            if not directed or not allow_self_loops:
                raise SelfLoopNotAllowed(f"self-loop at vertex {u}")
        if not directed and u > v:
            u, v = v, u
        us.append(u)
        vs.append(v)
        ws.append(w)
    edge_u = np.asarray(us, dtype=np.int64)
    edge_v = np.asarray(vs, dtype=np.int64)
    edge_w = np.asarray(ws, dtype=np.float64)
    order = np.lexsort((edge_v, edge_u))
    edge_u, edge_v, edge_w = edge_u[order], edge_v[order], edge_w[order]
    if len(edge_u) > 1:
        same = (edge_u[1:] == edge_u[:-1]) & (edge_v[1:] == edge_v[:-1])
        if same.any():
            i = int(np.flatnonzero(same)[0])
            raise DuplicateEdge(
                f"duplicate edge ({int(edge_u[i])}, {int(edge_v[i])})"
            )
    return WeightedGraph(n, directed, edge_u, edge_v, edge_w)


@dataclass(frozen=True)
class DegreeProfile:
    """Per-vertex degree sums and graph volume."""

    degrees: np.ndarray | None
    out_degrees: np.ndarray | None
    in_degrees: np.ndarray | None
    volume: float
    total_weight: float


def degree_profile(g: WeightedGraph) -> DegreeProfile:
    return DegreeProfile(
        degrees=g.degrees,
        out_degrees=g.out_degrees,
        in_degrees=g.in_degrees,
        volume=g.volume,
        total_weight=g.total_weight,
    )


def strongly_connected_components(g: WeightedGraph):
    """SCCs of a directed graph, listed in condensation topological order.

    Iterative Tarjan; components complete in reverse topological order, so
    the collected list is reversed before returning.  Vertices inside each
    component are sorted ascending.
    """
    if not g.directed:
        raise NotDirected("strongly_connected_components requires a directed graph")
    n = g.n
    indptr, idx, _ = g._adj
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    comps = []
    counter = 0
    for start in range(n):
        if index[start] != -1:
            continue
        work = [(start, 0)]
        while work:
            v, ei = work[-1]
            if ei == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            row = idx[indptr[v]:indptr[v + 1]]
            advanced = False
            while ei < len(row):
                w = int(row[ei])
                ei += 1
                if index[w] == -1:
                    work[-1] = (v, ei)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])
    comps.reverse()
    return comps
