"""Thin scripting bindings over the entropart pipeline.

Exposes two coarse calls so RL frameworks can consume abstractions
in-process: run the similarity -> filtration -> tree-optimization ->
aggregation pipeline on a dense feature array, and rebuild a transition
probability matrix from trajectories.  Per-operator tree mutation stays
private to the core package, which keeps its single-writer concurrency
contract enforceable across this boundary.

Handles hold the underlying graph and tree objects so repeat queries skip
recomputation; close() drops the references.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from entropart import (
    EmbeddingMatrix,
    TrajectoryLog,
    aggregate,
    build_transition_graph,
    correlation_reconstruction,
    filter_edges,
    flat_tree,
    optimize,
    similarity_graph,
    tree_entropy,
)
from entropart import io as _eio
from entropart.errors import DimensionMismatch

__all__ = [
    "BindingHandle",
    "PipelineResult",
    "py_filter_optimize_aggregate",
    "py_transition_probability",
]

__version__ = "0.1.0"


class PipelineResult(NamedTuple):
    labels: np.ndarray
    centers: np.ndarray
    k_star: int
    entropy_before: float
    entropy_after: float


class BindingHandle:
    """Opaque reference to pipeline internals (graph, tree, abstraction)."""

    def __init__(self, graph, tree, abstraction):
        self.graph = graph
        self.tree = tree
        self.abstraction = abstraction
        self._open = True

    def close(self):
        self.graph = None
        self.tree = None
        self.abstraction = None
        self._open = False

    @property
    def closed(self):
        return not self._open


def py_filter_optimize_aggregate(embeddings, max_height: int = 3,
                                 depth: int = 1, return_handle: bool = False):
    """Feature rows -> (labels, centers, k*, entropy before/after).

    Mirrors the native pipeline exactly: complete Pearson graph,
    reweighted kNN scan, stretch/compress optimization to the height
    budget, and softmax(assigned entropy) aggregation at the given depth.
    Raises the core package's errors unchanged (dimension and variance
    problems included).
    """
    arr = np.asarray(embeddings, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 2:
        raise DimensionMismatch(
            f"need a 2-D array with at least two rows, got shape {arr.shape}"
        )
    emb = EmbeddingMatrix(arr)
    sparse, k_star = filter_edges(similarity_graph(emb))
    base = flat_tree(sparse)
    before = tree_entropy(base)
    tree = optimize(base, max_height)
    after = tree_entropy(tree)
    result = aggregate(tree, emb, depth=depth)
    out = PipelineResult(
        labels=result.assignments.copy(),
        centers=result.centers.copy(),
        k_star=int(k_star),
        entropy_before=before,
        entropy_after=after,
    )
    if return_handle:
        return out, BindingHandle(sparse, tree, result)
    return out


def py_transition_probability(trajectories, state_labels, action_tree_file,
                              max_height: int = 3) -> np.ndarray:
    """Transition-probability matrix over abstract states.

    trajectories may be a TrajectoryLog or an iterable of
    (episode, state, action, reward, next_state) rows; state_labels sends
    original state ids to dense abstract ids; action_tree_file is a tree
    JSON produced by the native CLI or io module.
    """
    if isinstance(trajectories, TrajectoryLog):
        log = trajectories
    else:
        log = TrajectoryLog.from_steps(trajectories)
    shell = _eio.tree_shell(_eio.read_tree(action_tree_file))
    labels = np.asarray(state_labels, dtype=np.int64)
    tg = build_transition_graph(log, labels, shell, max_height)
    return correlation_reconstruction(tg)
