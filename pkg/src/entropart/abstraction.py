"""Entropy-weighted aggregation over encoding trees and the KL metric.

Every leaf takes its input embedding row.  An internal node's embedding is
the softmax-weighted mean of its children's embeddings, where the weights
are the children's assigned entropies pushed through a plain natural
exponential.  Communities at a chosen depth become abstract elements; the
cut through the tree at that depth (internal nodes at the depth plus any
shallower leaves) partitions the vertex set.

Soft assignments use the degree-1 heavy-tailed kernel against the cluster
centers, and the sharpened matrix squares the soft one and renormalizes by
cluster mass.  The KL divergence between them is exposed as a metric only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidDepth, SupportMismatch
from .filtration import EmbeddingMatrix

__all__ = [
    "AbstractionResult",
    "AssignmentMatrices",
    "aggregate",
    "abstraction_map",
    "depth_cut",
    "cut_assignments",
    "soft_assignments",
    "kl_clustering_loss",
]


@dataclass
class AbstractionResult:
    """Aggregated embeddings plus the vertex -> abstract element map."""

    tree: object
    node_embeddings: dict
    depth: int
    assignments: np.ndarray  # vertex -> abstract element index
    centers: np.ndarray      # one row per abstract element
    cut_nodes: list          # tree node id per abstract element


def depth_cut(tree, depth):
    """Node ids partitioning the vertex set at the given depth.

    Internal nodes exactly at `depth` plus leaves that sit shallower; DFS
    (left-to-right) order fixes the abstract element indexing.
    """
    if depth < 0 or depth > tree.height():
        raise InvalidDepth(f"depth must be in 0..{tree.height()}, got {depth}")
    cut = []
    stack = [(tree.root, 0)]
    while stack:
        node, d = stack.pop()
        if d == depth or tree.is_leaf(node):
            cut.append(node)
            continue
        for c in reversed(tree.children[node]):
            stack.append((c, d + 1))
    return cut


def cut_assignments(tree, depth):
    """Vertex -> abstract element index for the cut at the given depth."""
    cut = depth_cut(tree, depth)
    assignments = np.empty(len(tree.leaf_of_vertex), dtype=np.int64)
    for j, node in enumerate(cut):
        for v in tree.subtree_vertices(node):
            assignments[v] = j
    return assignments, cut


def aggregate(tree, leaf_embeddings, depth: int = 1) -> AbstractionResult:
    """Bottom-up softmax(assigned entropy) aggregation of leaf rows."""
    if isinstance(leaf_embeddings, EmbeddingMatrix):
        data = leaf_embeddings.data
    else:
        data = np.asarray(leaf_embeddings, dtype=np.float64)
    n_leaves = len(tree.leaf_of_vertex)
    if data.ndim != 2 or data.shape[0] != n_leaves:
        raise DimensionMismatch(
            f"need one embedding row per leaf ({n_leaves}), got {data.shape}"
        )
    emb = {}
    for v, leaf in enumerate(tree.leaf_of_vertex):
        emb[leaf] = data[v]
    depth_of = tree.depths()
    order = sorted(
        (nid for nid in depth_of if not tree.is_leaf(nid)),
        key=lambda nid: -depth_of[nid],
    )
    for nid in order:
        kids = tree.children[nid]
        ents = np.array([tree.assigned_entropy(c) for c in kids])
        w = np.exp(ents)
        w = w / w.sum()
        emb[nid] = w @ np.stack([emb[c] for c in kids])
    assignments, cut = cut_assignments(tree, depth)
    centers = np.stack([emb[node] for node in cut])
    return AbstractionResult(
        tree=tree,
        node_embeddings=emb,
        depth=depth,
        assignments=assignments,
        centers=centers,
        cut_nodes=cut,
    )


def abstraction_map(result: AbstractionResult, depth: int) -> np.ndarray:
    """Vertex -> index of its depth-`depth` ancestor community."""
    assignments, _ = cut_assignments(result.tree, depth)
    return assignments


@dataclass(frozen=True)
class AssignmentMatrices:
    """Row-stochastic soft (Q) and sharpened (P) assignment matrices."""

    Q: np.ndarray
    P: np.ndarray


def soft_assignments(emb, centers) -> AssignmentMatrices:
    """Heavy-tailed kernel soft matrix and its squared-sharpened target."""
    if isinstance(emb, EmbeddingMatrix):
        h = emb.data
    else:
        h = np.asarray(emb, dtype=np.float64)
    c = np.asarray(centers, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] == 0:
        raise DimensionMismatch("centers must be a nonempty 2-D array")
    if h.ndim != 2 or h.shape[1] != c.shape[1]:
        raise DimensionMismatch(
            f"embedding dim {h.shape} does not match centers {c.shape}"
        )
    d2 = ((h[:, None, :] - c[None, :, :]) ** 2).sum(axis=2)
    q = 1.0 / (1.0 + d2)
    q = q / q.sum(axis=1, keepdims=True)
    f = q.sum(axis=0)
    p = (q * q) / f[None, :]
    p = p / p.sum(axis=1, keepdims=True)
    return AssignmentMatrices(Q=q, P=p)


def kl_clustering_loss(p, q) -> float:
    """KL(P || Q) = sum P log(P / Q), natural log; 0 iff P equals Q."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise DimensionMismatch(f"shape mismatch {p.shape} vs {q.shape}")
    pos = p > 0.0
    if np.any(pos & (q <= 0.0)):
        raise SupportMismatch("P places mass where Q is zero")
    return float(np.sum(p[pos] * np.log(p[pos] / q[pos])))
