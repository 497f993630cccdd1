"""Encoding trees and exact structural entropy for undirected graphs.

An encoding tree is a rooted hierarchy whose leaves biject with graph
vertices and whose internal nodes form nested vertex communities.  Each
non-root node alpha carries a boundary weight g (total weight crossing its
community) and a volume V (degree sum inside); its assigned entropy is

    -(g / vol) * log2(V / V_parent)

with the 0*log(0) = 0 convention for g = 0.  The tree's entropy is the sum
of assigned entropies over all non-root nodes.  All sums use math.fsum so
values do not depend on accumulation order.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import (
    EmptyGraph,
    NonPositiveWeight,
    NotUndirected,
    RootHasNoAssignedEntropy,
    TooLarge,
)
from .graph import WeightedGraph

__all__ = [
    "EncodingTree",
    "one_dim_entropy",
    "flat_tree",
    "node_entropy",
    "tree_entropy",
    "brute_force_optimal",
]

_ZERO_TOL = 1e-12


def _require_entropy_ready(g: WeightedGraph):
    if g.directed:
        raise NotUndirected("structural entropy here is defined for undirected graphs")
    if g.m > 0 and g.min_weight <= 0.0:
        raise NonPositiveWeight("entropy requires strictly positive edge weights")


def one_dim_entropy(g: WeightedGraph) -> float:
    """Shannon entropy (bits) of the degree distribution d_v / vol.

    Vertices with zero degree contribute nothing (0*log 0 = 0).
    """
    _require_entropy_ready(g)
    degs = g.degrees.tolist()
    vol = math.fsum(degs)
    if vol <= 0.0:
        raise EmptyGraph("graph volume is zero")
    terms = [-(d / vol) * math.log2(d / vol) for d in degs if d > 0.0]
    return math.fsum(terms)


class EncodingTree:
    """Arena-backed encoding tree bound to an immutable undirected graph.

    Nodes are integer ids into parallel arrays; freed slots are never
    reused, so ids stay stable across edits.  Construction yields the
    one-layer tree: a root with one singleton leaf per vertex, where the
    leaf for vertex v has id v + 1 and the root id 0.
    """

    def __init__(self, graph: WeightedGraph):
        _require_entropy_ready(graph)
        self.graph = graph
        degs = graph.degrees.tolist()
        self.vol = math.fsum(degs)
        if self.vol <= 0.0:
            raise EmptyGraph("graph volume is zero")
        n = graph.n
        self.root = 0
        self.parent = [-1] + [0] * n
        self.children = [list(range(1, n + 1))] + [[] for _ in range(n)]
        self.volume = [self.vol] + degs
        self.cut = [0.0] + degs
        self.nvert = [n] + [1] * n
        self.vertex = [-1] + list(range(n))
        self.alive = [True] * (n + 1)
        self.slot = [0] + list(range(n))  # position within the parent's list
        self.leaf_of_vertex = list(range(1, n + 1))

    # -- node management ---------------------------------------------------

    def new_node(self, parent, volume, cut, nvert):
        nid = len(self.parent)
        self.parent.append(parent)
        self.children.append([])
        self.volume.append(volume)
        self.cut.append(cut)
        self.nvert.append(nvert)
        self.vertex.append(-1)
        self.alive.append(True)
        self.slot.append(0)
        return nid

    def kill(self, nid):
        self.alive[nid] = False
        self.parent[nid] = -1
        self.children[nid] = []

    def is_leaf(self, nid):
        return self.vertex[nid] >= 0

    def attach(self, parent, nid):
        self.parent[nid] = parent
        self.slot[nid] = len(self.children[parent])
        self.children[parent].append(nid)

    def set_children(self, nid, kids):
        self.children[nid] = kids
        for i, c in enumerate(kids):
            self.parent[c] = nid
            self.slot[c] = i

    def remove_internal(self, nid):
        """Lift nid's children to its parent.

        The first child takes nid's slot, the rest append; O(children).
        """
        p = self.parent[nid]
        kids = self.children[nid]
        sibs = self.children[p]
        pos = self.slot[nid]
        first = kids[0]
        sibs[pos] = first
        self.parent[first] = p
        self.slot[first] = pos
        for c in kids[1:]:
            self.parent[c] = p
            self.slot[c] = len(sibs)
            sibs.append(c)
        self.kill(nid)

    # -- structure queries ---------------------------------------------------

    def node_ids(self):
        return [i for i, a in enumerate(self.alive) if a]

    def n_nodes(self):
        return sum(self.alive)

    def depths(self):
        """Dict node id -> depth in edges from the root (alive nodes only)."""
        out = {self.root: 0}
        stack = [self.root]
        while stack:
            v = stack.pop()
            d = out[v] + 1
            for c in self.children[v]:
                out[c] = d
                stack.append(c)
        return out

    def height(self):
        depth = self.depths()
        return max(depth[i] for i in depth if self.is_leaf(i))

    def layers(self):
        """List of node-id lists per depth, index 0 holding just the root."""
        depth = self.depths()
        h = max(depth.values())
        out = [[] for _ in range(h + 1)]
        for nid in sorted(depth):
            out[depth[nid]].append(nid)
        return out

    def subtree_vertices(self, nid):
        """Sorted vertex indices under nid."""
        verts = []
        stack = [nid]
        while stack:
            v = stack.pop()
            if self.vertex[v] >= 0:
                verts.append(self.vertex[v])
            else:
                stack.extend(self.children[v])
        return sorted(verts)

    def subtree_height(self, nid):
        best = 0
        stack = [(nid, 0)]
        while stack:
            v, d = stack.pop()
            if self.vertex[v] >= 0:
                best = max(best, d)
            else:
                for c in self.children[v]:
                    stack.append((c, d + 1))
        return best

    # -- entropy -------------------------------------------------------------

    def assigned_entropy(self, nid) -> float:
        """Assigned entropy of a non-root node; 0 when its boundary is 0."""
        g = self.cut[nid]
        if g == 0.0:
            return 0.0
        vp = self.volume[self.parent[nid]]
        return (g / self.vol) * math.log2(vp / self.volume[nid])

    def total_entropy(self) -> float:
        terms = [
            self.assigned_entropy(i)
            for i in range(len(self.parent))
            if self.alive[i] and i != self.root
        ]
        return math.fsum(terms)

    # -- consistency ----------------------------------------------------------

    def clone(self):
        t = object.__new__(EncodingTree)
        t.graph = self.graph
        t.vol = self.vol
        t.root = self.root
        t.parent = self.parent.copy()
        t.children = [c.copy() for c in self.children]
        t.volume = self.volume.copy()
        t.cut = self.cut.copy()
        t.nvert = self.nvert.copy()
        t.vertex = self.vertex.copy()
        t.alive = self.alive.copy()
        t.slot = self.slot.copy()
        t.leaf_of_vertex = self.leaf_of_vertex.copy()
        return t

    def recompute_caches(self):
        """Volumes and cuts recomputed from the graph by full scan.

        Returns the max absolute deviation from the cached values, then
        installs the recomputed numbers.  Used by validate() and tests.
        """
        worst = 0.0
        depth = self.depths()
        order = sorted(depth, key=lambda i: -depth[i])
        member = {}
        for nid in order:
            if self.vertex[nid] >= 0:
                member[nid] = {self.vertex[nid]}
            else:
                s = set()
                for c in self.children[nid]:
                    s |= member[c]
                member[nid] = s
        degs = self.graph.degrees
        eu, ev, ew = self.graph.edge_u, self.graph.edge_v, self.graph.edge_w
        for nid in order:
            verts = member[nid]
            vol = math.fsum(degs[v] for v in sorted(verts))
            inside = math.fsum(
                w
                for u, v, w in zip(eu.tolist(), ev.tolist(), ew.tolist())
                if u in verts and v in verts
            )
            cut = vol - 2.0 * inside
            worst = max(
                worst, abs(vol - self.volume[nid]), abs(cut - self.cut[nid])
            )
            self.volume[nid] = vol
            self.cut[nid] = max(cut, 0.0)
            self.nvert[nid] = len(verts)
        return worst

    def validate(self):
        """Full-scan structural check; raises AssertionError on violation."""
        seen_vertices = []
        for nid in self.node_ids():
            if nid == self.root:
                assert self.parent[nid] == -1
            else:
                p = self.parent[nid]
                assert self.alive[p], f"dead parent for {nid}"
                assert self.children[p][self.slot[nid]] == nid, f"bad slot for {nid}"
            if self.is_leaf(nid):
                assert not self.children[nid]
                seen_vertices.append(self.vertex[nid])
            else:
                assert self.children[nid], f"childless internal node {nid}"
                assert self.nvert[nid] == sum(
                    self.nvert[c] for c in self.children[nid]
                )
        assert sorted(seen_vertices) == list(range(self.graph.n))
        assert self.nvert[self.root] == self.graph.n
        tree = self.clone()
        worst = tree.recompute_caches()
        assert worst < 1e-9, f"cached g/V off by {worst}"


def flat_tree(g: WeightedGraph) -> EncodingTree:
    """One-layer encoding tree: root plus one singleton leaf per vertex."""
    return EncodingTree(g)


def node_entropy(tree: EncodingTree, node_id: int) -> float:
    if node_id == tree.root:
        raise RootHasNoAssignedEntropy("the root carries no assigned entropy")
    if not tree.alive[node_id]:
        raise IndexError(f"node {node_id} is not in the tree")
    return tree.assigned_entropy(node_id)


def tree_entropy(tree: EncodingTree) -> float:
    return tree.total_entropy()


# -- exhaustive minimizer (testing oracle) ------------------------------------


def _partitions(items):
    """All set partitions of items (tuples of tuples)."""
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for sub in _partitions(rest):
        yield ((first,),) + sub
        for i, block in enumerate(sub):
            yield sub[:i] + ((first,) + block,) + sub[i + 1:]


def brute_force_optimal(g: WeightedGraph, max_height: int):
    """Exact minimum-entropy encoding tree of height <= max_height.

    Factorial search: guarded to n <= 8 vertices and max_height <= 3.
    Returns (tree, entropy).  Only for tests and tiny fixtures.
    """
    if g.n > 8:
        raise TooLarge(f"exhaustive search guarded to n <= 8, got {g.n}")
    if max_height > 3:
        raise TooLarge(f"exhaustive search guarded to height <= 3, got {max_height}")
    if max_height < 1:
        raise TooLarge("height must be at least 1")
    base = flat_tree(g)  # raises EmptyGraph on degenerate input
    vol = base.vol
    degs = g.degrees
    wmat = np.zeros((g.n, g.n))
    for u, v, w in zip(g.edge_u, g.edge_v, g.edge_w):
        wmat[u, v] += w
        wmat[v, u] += w

    def set_volume(verts):
        return math.fsum(degs[v] for v in verts)

    def set_cut(verts):
        outside = [v for v in range(g.n) if v not in verts]
        return math.fsum(wmat[u, v] for u in verts for v in outside)

    def leaf_terms(verts, parent_volume):
        total = 0.0
        for v in verts:
            d = degs[v]
            if d > 0:
                total += (d / vol) * math.log2(parent_volume / d)
        return total

    memo = {}

    def best_below(verts, budget):
        """(entropy below a node over verts, chosen nested partition)."""
        key = (verts, budget)
        if key in memo:
            return memo[key]
        own_vol = set_volume(verts)
        best = (leaf_terms(verts, own_vol) if own_vol > 0 else 0.0, None)
        if budget >= 2 and len(verts) >= 2:
            for part in _partitions(verts):
                if len(part) == 1:
                    continue
                total = 0.0
                subplans = []
                for block in part:
                    block = tuple(sorted(block))
                    b_vol = set_volume(block)
                    b_cut = set_cut(block)
                    term = 0.0
                    if b_cut > 0:
                        term = (b_cut / vol) * math.log2(own_vol / b_vol)
                    below, plan = best_below(block, budget - 1)
                    total += term + below
                    subplans.append((block, plan))
                if total < best[0] - _ZERO_TOL:
                    best = (total, subplans)
        memo[key] = best
        return best

    all_verts = tuple(range(g.n))
    value, plan = best_below(all_verts, max_height)

    tree = flat_tree(g)

    def build(node_id, verts, plan):
        if plan is None:
            for v in verts:
                tree.attach(node_id, tree.leaf_of_vertex[v])
            return
        for block, subplan in plan:
            child = tree.new_node(
                node_id, set_volume(block), set_cut(block), len(block)
            )
            tree.attach(node_id, child)
            build(child, block, subplan)

    tree.children[tree.root] = []
    build(tree.root, all_verts, plan)
    return tree, value
