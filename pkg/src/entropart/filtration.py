"""Similarity graphs from feature rows, reweighting, and kNN filtration.

A complete similarity graph carries the Pearson correlation of every row
pair.  Filtration adds a global modification factor M (half the mean edge
weight divided by the vertex count), then scans k = 1..n-1 keeping each
center's k largest-|w| edges (union over centers) and returns the k whose
graph minimizes one-dimensional structural entropy.  Selection ranks by
absolute weight and the sparse graph carries absolute weights, since
entropy needs positive degrees while correlations may be negative.

The k-scan is incremental: per round the newly selected edges are added in
canonical (u, v) order, u-side degree updates before v-side, and entropy is
evaluated with numpy sums over the running degree vector.  Tests reproduce
the scan independently; determinism of the arithmetic order is part of the
contract.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import AlreadyReweighted, KOutOfRange, NonFiniteWeight, ZeroVariance
from .graph import WeightedGraph, build_graph

__all__ = [
    "EmbeddingMatrix",
    "SimilarityGraph",
    "similarity_graph",
    "reweight",
    "knn_graph",
    "filter_edges",
]


class EmbeddingMatrix:
    """Dense per-vertex feature rows with cached row means and deviations."""

    def __init__(self, data):
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim != 2:
            raise NonFiniteWeight("embedding matrix must be 2-D")
        if not np.isfinite(arr).all():
            raise NonFiniteWeight("embedding matrix has non-finite entries")
        self.data = arr
        self.row_mean = arr.mean(axis=1)
        centered = arr - self.row_mean[:, None]
        self.row_ss = np.sqrt((centered * centered).sum(axis=1))
        self._centered = centered

    @property
    def n(self):
        return self.data.shape[0]

    @property
    def dim(self):
        return self.data.shape[1]


class SimilarityGraph:
    """Complete undirected similarity graph stored as a dense matrix.

    weights[i, j] is the edge weight between i and j; the diagonal is 0 and
    unused.  provenance records whether the modification factor has been
    applied ("raw" or "reweighted").
    """

    def __init__(self, weights, provenance="raw"):
        self.weights = weights
        self.provenance = provenance

    @property
    def n(self):
        return self.weights.shape[0]

    def edge_weights(self):
        """Upper-triangle weights in row-major (i, j) order."""
        iu = np.triu_indices(self.n, k=1)
        return self.weights[iu]

    def to_graph(self) -> WeightedGraph:
        iu, jv = np.triu_indices(self.n, k=1)
        w = self.weights[iu, jv]
        edges = list(zip(iu.tolist(), jv.tolist(), w.tolist()))
        return build_graph(self.n, False, edges)


def similarity_graph(emb: EmbeddingMatrix) -> SimilarityGraph:
    """Complete graph weighted by Pearson correlation of embedding rows."""
    if not isinstance(emb, EmbeddingMatrix):
        emb = EmbeddingMatrix(emb)
    zero = np.flatnonzero(emb.row_ss == 0.0)
    if zero.size:
        raise ZeroVariance(int(zero[0]))
    c = emb._centered @ emb._centered.T
    c /= np.outer(emb.row_ss, emb.row_ss)
    # force exact symmetry (BLAS may differ across the diagonal)
    c = np.triu(c, k=1)
    c = c + c.T
    return SimilarityGraph(c, provenance="raw")


def modification_factor(g: SimilarityGraph) -> float:
    """Half the mean edge weight divided by the vertex count."""
    w = g.edge_weights()
    return float(w.sum()) / w.size / (2.0 * g.n)


def reweight(g: SimilarityGraph) -> SimilarityGraph:
    """Add the modification factor to every edge weight (once)."""
    if g.provenance == "reweighted":
        raise AlreadyReweighted("similarity graph was already reweighted")
    m = modification_factor(g)
    w = g.weights + m
    np.fill_diagonal(w, 0.0)
    return SimilarityGraph(w, provenance="reweighted")


def _rankings(weights):
    """Per-center partner indices ordered by |w| descending, index ascending."""
    a = np.abs(weights).copy()
    np.fill_diagonal(a, -np.inf)
    return np.argsort(-a, axis=1, kind="stable")


def knn_graph(g: SimilarityGraph, k: int) -> WeightedGraph:
    """Union-of-top-k graph: an edge survives if either endpoint ranks it.

    Weights become absolute values; exact-zero weights are dropped (they
    cannot contribute degree and entropy requires positive weights).
    """
    n = g.n
    if not 1 <= k <= n - 1:
        raise KOutOfRange(f"k must be in 1..{n - 1}, got {k}")
    order = _rankings(g.weights)
    absw = np.abs(g.weights)
    keep = set()
    for center in range(n):
        for j in order[center, :k].tolist():
            if absw[center, j] > 0.0:
                keep.add((min(center, j), max(center, j)))
    edges = [(u, v, float(absw[u, v])) for u, v in sorted(keep)]
    return build_graph(n, False, edges)


def _scan_entropy(deg):
    vol = float(np.sum(deg))
    if vol <= 0.0:
        return 0.0
    r = deg[deg > 0.0] / vol
    return float(-np.sum(r * np.log2(r)))


def filter_edges(g_complete: SimilarityGraph):
    """Reweight, then keep the kNN graph minimizing 1-D structural entropy.

    Returns (graph at k*, k*).  Entropy ties break toward smaller k.  The
    candidate graphs are built incrementally: round k adds each center's
    rank-k edge unless the other endpoint already added it.
    """
    if g_complete.provenance == "reweighted":
        raise AlreadyReweighted("filter_edges expects the raw similarity graph")
    rw = reweight(g_complete)
    n = rw.n
    absw = np.abs(rw.weights)
    order = _rankings(rw.weights)
    added = np.zeros(n * n, dtype=bool)
    deg = np.zeros(n)
    centers = np.arange(n)
    kept_u, kept_v = [], []
    best_h = math.inf
    best_k = 0
    best_edge_count = 0
    for k in range(1, n):
        partner = order[:, k - 1]
        lo = np.minimum(centers, partner)
        hi = np.maximum(centers, partner)
        keys = lo * n + hi
        keys = np.unique(keys[~added[keys]])  # sorted by (u, v)
        if keys.size:
            added[keys] = True
            u = keys // n
            v = keys % n
            w = absw[u, v]
            live = w > 0.0
            u, v, w = u[live], v[live], w[live]
            np.add.at(deg, u, w)
            np.add.at(deg, v, w)
            kept_u.append(u)
            kept_v.append(v)
        h = _scan_entropy(deg)
        if h < best_h:
            best_h = h
            best_k = k
            best_edge_count = sum(x.size for x in kept_u)
    # rebuild the winning graph: first best_edge_count edges in insertion order
    all_u = np.concatenate(kept_u) if kept_u else np.zeros(0, dtype=np.int64)
    all_v = np.concatenate(kept_v) if kept_v else np.zeros(0, dtype=np.int64)
    sel_u = all_u[:best_edge_count]
    sel_v = all_v[:best_edge_count]
    edges = [
        (int(u), int(v), float(absw[u, v])) for u, v in zip(sel_u, sel_v)
    ]
    return build_graph(n, False, edges), best_k
