"""Greedy structural-entropy minimization via stretch/compress cycles.

stretch(alpha) agglomerates alpha's children pairwise: the two child
subtrees whose union under a fresh intermediate node most decreases tree
entropy are merged, repeatedly, until alpha has exactly two children.  The
entropy change of one merge has the closed form

    2 * w_cross / vol * log2(V_merged / V_alpha)  <=  0

so merging never hurts, and pairs without connecting edges are merged last
(zero change, smallest ids first) purely to finish the binarization.

compress(alpha) deletes internal descendants greedily.  A deletion changes
entropy by (g_x - sum_children g) / vol * log2(V_x / V_parent) which is
never negative in exact arithmetic, so the improving phase only prunes
redundant nodes (chains, zero-boundary shells, float dust).  When a height
bound is requested the deletion loop continues past that point, always
removing the cheapest node that still shadows a too-deep leaf, until the
subtree respects the bound.  The optimizer relies on this to keep trees
within the height budget: one accepted cycle deepens the tree by at most
one level.

optimize() follows the sparsest-layer schedule: each round it simulates a
full stretch-compress cycle per layer on a copy, scores the average entropy
drop, applies the best layer's cycle if positive, and stops otherwise or at
the height budget.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidLayer, LeafNotStretchable
from .tree import EncodingTree

__all__ = ["SparScore", "stretch", "compress", "spar_score", "optimize", "optimize_trace"]

_TOL = 1e-12


@dataclass(frozen=True)
class SparScore:
    """Average entropy reduction of a tentative cycle over one layer."""

    layer: int
    score: float


# -- cross weights -------------------------------------------------------------


def _cross_pairs(tree: EncodingTree, alphas):
    """Inter-child edge weights, grouped per alpha: {alpha: [(a, b, w)]}.

    One pass over the graph's edges; a vertex pair contributes when both
    endpoints live under distinct children of the same listed alpha.
    """
    g = tree.graph
    comm = np.full(g.n, -1, dtype=np.int64)
    for alpha in alphas:
        if tree.is_leaf(alpha):
            continue
        for c in tree.children[alpha]:
            stack = [c]
            while stack:
                x = stack.pop()
                vx = tree.vertex[x]
                if vx >= 0:
                    comm[vx] = c
                else:
                    stack.extend(tree.children[x])
    parent_arr = np.asarray(tree.parent, dtype=np.int64)
    ca = comm[g.edge_u]
    cb = comm[g.edge_v]
    valid = (ca >= 0) & (cb >= 0) & (ca != cb)
    ca, cb, w = ca[valid], cb[valid], g.edge_w[valid]
    same = parent_arr[ca] == parent_arr[cb]
    ca, cb, w = ca[same], cb[same], w[same]
    cap = len(tree.parent)
    lo = np.minimum(ca, cb)
    hi = np.maximum(ca, cb)
    uniq, inv = np.unique(lo * cap + hi, return_inverse=True)
    sums = np.zeros(len(uniq))
    np.add.at(sums, inv, w)
    out = {}
    for key, s in zip(uniq.tolist(), sums.tolist()):
        a, b = divmod(key, cap)
        out.setdefault(tree.parent[a], []).append((a, b, s))
    return out


# -- stretch -------------------------------------------------------------------


def _agglomerate(tree: EncodingTree, alpha, pairs):
    """Greedy pairwise merging via a lazy heap over persistent cluster handles.

    Each growing cluster keeps the handle of one original child; a merge
    retires the handle whose neighbor map is smaller, so rekeying the
    retired side's neighbors costs O(small map) and the total map work stays
    near-linear.  Merging elsewhere only grows a pair's combined volume,
    which moves its delta toward zero; stored heap entries therefore
    lower-bound the true delta, and an entry is executed only when
    recomputation reproduces it exactly (otherwise it is re-pushed at its
    current value).  Weight growth from map collisions gets an eager fresh
    push, keeping the lower-bound invariant intact.
    """
    kids = tree.children[alpha]
    if len(kids) <= 2:
        return 0.0
    vol = tree.vol
    v_alpha = tree.volume[alpha]
    log2 = math.log2
    push = heapq.heappush
    pop = heapq.heappop
    uf = {c: c for c in kids}

    def find(x):
        root = x
        while uf[root] != root:
            root = uf[root]
        while uf[x] != root:
            uf[x], x = root, uf[x]
        return root

    vols = {c: tree.volume[c] for c in kids}
    cuts = {c: tree.cut[c] for c in kids}
    nvs = {c: tree.nvert[c] for c in kids}
    node_of = {c: c for c in kids}
    cross = {c: {} for c in kids}
    heap = []
    for a, b, w in pairs:
        cross[a][b] = w
        cross[b][a] = w
        vnew = vols[a] + vols[b]
        d = 2.0 * w / vol * log2(vnew / v_alpha) if vnew < v_alpha else 0.0
        push(heap, (d, a, b))
    alive = set(kids)
    total = 0.0
    while len(alive) > 2:
        rx = -1
        d = 0.0
        w = 0.0
        while heap:
            d0, x, y = pop(heap)
            hx, hy = find(x), find(y)
            if hx == hy:
                continue
            wv = cross[hx].get(hy)
            if wv is None:
                continue
            vnew = vols[hx] + vols[hy]
            dn = 2.0 * wv / vol * log2(vnew / v_alpha) if vnew < v_alpha else 0.0
            if dn == d0:
                rx, ry, d, w = hx, hy, dn, wv
                break
            push(heap, (dn, hx, hy))
        if rx < 0:
            # no connected pair left; binarize disconnected leftovers
            srt = sorted(alive)
            rx, ry, d, w = srt[0], srt[1], 0.0, 0.0
        total += d
        beta = tree.new_node(
            alpha,
            vols[rx] + vols[ry],
            max(cuts[rx] + cuts[ry] - 2.0 * w, 0.0),
            nvs[rx] + nvs[ry],
        )
        lo, hi = (rx, ry) if node_of[rx] < node_of[ry] else (ry, rx)
        tree.set_children(beta, [node_of[lo], node_of[hi]])
        # the handle with the larger neighbor map survives
        if len(cross[rx]) < len(cross[ry]):
            rx, ry = ry, rx
        uf[ry] = rx
        alive.discard(ry)
        vols[rx] = tree.volume[beta]
        cuts[rx] = tree.cut[beta]
        nvs[rx] = tree.nvert[beta]
        node_of[rx] = beta
        ma = cross[rx]
        mb = cross.pop(ry)
        ma.pop(ry, None)
        v_beta = vols[rx]
        for k, wv in mb.items():
            if k == rx or k == ry:
                continue
            mk = cross[k]
            mk.pop(ry, None)
            if k in ma:
                merged = ma[k] + wv
                ma[k] = merged
                mk[rx] = merged
                vnew = v_beta + vols[k]
                dn = (
                    2.0 * merged / vol * log2(vnew / v_alpha)
                    if vnew < v_alpha
                    else 0.0
                )
                push(heap, (dn, rx, k))
            else:
                ma[k] = wv
                mk[rx] = wv
    tree.set_children(alpha, sorted(node_of[h] for h in alive))
    return total


def stretch(tree: EncodingTree, node: int) -> float:
    """Binarize node's children by greedy pairwise agglomeration."""
    if tree.is_leaf(node):
        raise LeafNotStretchable(f"node {node} is a leaf")
    if len(tree.children[node]) <= 2:
        return 0.0
    pairs = _cross_pairs(tree, [node]).get(node, [])
    return _agglomerate(tree, node, pairs)


# -- compress ------------------------------------------------------------------


def _removal_delta(tree: EncodingTree, x):
    f = tree.cut[x] - math.fsum(tree.cut[c] for c in tree.children[x])
    if f == 0.0:
        return 0.0
    return (f / tree.vol) * math.log2(
        tree.volume[x] / tree.volume[tree.parent[x]]
    )


def _internal_descendants(tree: EncodingTree, alpha):
    out = []
    stack = list(tree.children[alpha])
    while stack:
        x = stack.pop()
        if not tree.is_leaf(x):
            out.append(x)
            stack.extend(tree.children[x])
    return sorted(out)


def _improving_removals(tree: EncodingTree, alpha, tol=_TOL):
    """Delete internal descendants while the best deletion delta <= tol."""
    stamp = {}
    heap = []
    for x in _internal_descendants(tree, alpha):
        stamp[x] = 0
        heapq.heappush(heap, (_removal_delta(tree, x), x, 0))
    total = 0.0
    while heap:
        d, x, s = heapq.heappop(heap)
        if not tree.alive[x] or s != stamp.get(x, -1):
            continue
        if d > tol:
            break
        p = tree.parent[x]
        kids = list(tree.children[x])
        tree.remove_internal(x)
        total += d
        for y in kids + [p]:
            if y == alpha or tree.is_leaf(y) or not tree.alive[y]:
                continue
            stamp[y] = stamp.get(y, 0) + 1
            heapq.heappush(heap, (_removal_delta(tree, y), y, stamp[y]))
    return total


def _flatten_to_cut(tree: EncodingTree, alpha, bound):
    """Exact minimal-entropy restructuring to subtree height <= 2 (or 1).

    With a one-level budget the survivors form an antichain directly under
    alpha, each keeping only its leaves below, so the choice decomposes per
    branch: keep a node (flattening its interior) or dissolve it and decide
    its children independently.  Leaf terms aggregate bottom-up, making the
    whole pass linear in the subtree.  Exact ties prefer dissolving.
    """
    vol = tree.vol
    v_alpha = tree.volume[alpha]
    log2 = math.log2
    order = []
    stack = [alpha]
    while stack:
        x = stack.pop()
        order.append(x)
        stack.extend(tree.children[x])
    if len(order) == 1:
        return 0.0
    old_total = math.fsum(
        tree.assigned_entropy(x) for x in order if x != alpha
    )
    best = {}
    keep = {}
    t2 = {}
    for x in reversed(order):
        if tree.is_leaf(x):
            d = tree.volume[x]
            if d > 0.0:
                t2[x] = (d / vol) * log2(d)
                best[x] = (d / vol) * log2(v_alpha / d)
            else:
                t2[x] = 0.0
                best[x] = 0.0
            continue
        kids = tree.children[x]
        t2[x] = math.fsum(t2[c] for c in kids)
        if x == alpha:
            continue
        drop = math.fsum(best[c] for c in kids)
        if bound < 2:
            best[x] = drop
            keep[x] = False
            continue
        vx = tree.volume[x]
        gx = tree.cut[x]
        if vx > 0.0:
            head = (gx / vol) * log2(v_alpha / vx) if gx > 0.0 else 0.0
            keep_cost = head + (vx / vol) * log2(vx) - t2[x]
        else:
            keep_cost = 0.0
        if keep_cost < drop - _TOL:
            best[x] = keep_cost
            keep[x] = True
        else:
            best[x] = drop
            keep[x] = False
    new_total = math.fsum(best[c] for c in tree.children[alpha])
    # materialize the decisions, preserving DFS order
    top = []
    stack = list(reversed(tree.children[alpha]))
    while stack:
        x = stack.pop()
        if tree.is_leaf(x):
            top.append(x)
            continue
        if keep[x]:
            top.append(x)
            leaves = []
            inner = list(reversed(tree.children[x]))
            while inner:
                y = inner.pop()
                if tree.is_leaf(y):
                    leaves.append(y)
                else:
                    inner.extend(reversed(tree.children[y]))
                    tree.kill(y)
            tree.set_children(x, leaves)
        else:
            stack.extend(reversed(tree.children[x]))
            tree.kill(x)
    tree.set_children(alpha, top)
    return new_total - old_total


def _enforce_height_greedy(tree: EncodingTree, alpha, bound):
    """Delete cheapest height-violating descendants until the subtree of
    alpha has height <= bound (relative edge count)."""
    rdepth = {alpha: 0}
    order = []
    stack = [alpha]
    while stack:
        x = stack.pop()
        order.append(x)
        d = rdepth[x] + 1
        for c in tree.children[x]:
            rdepth[c] = d
            stack.append(c)
    maxleaf = {}
    for x in reversed(order):
        if tree.is_leaf(x):
            maxleaf[x] = rdepth[x]
        else:
            maxleaf[x] = max(maxleaf[c] for c in tree.children[x])
    if maxleaf[alpha] <= bound:
        return 0.0
    stamp = {}
    heap = []
    for x in order:
        if x != alpha and not tree.is_leaf(x) and maxleaf[x] > bound:
            stamp[x] = 0
            heapq.heappush(heap, (_removal_delta(tree, x), x, 0))
    total = 0.0
    while maxleaf[alpha] > bound:
        d, x, s = heapq.heappop(heap)
        if not tree.alive[x] or s != stamp.get(x, -1) or maxleaf[x] <= bound:
            continue
        p = tree.parent[x]
        kids = list(tree.children[x])
        tree.remove_internal(x)
        total += d
        sub = list(kids)
        i = 0
        while i < len(sub):
            y = sub[i]
            i += 1
            rdepth[y] -= 1
            if tree.is_leaf(y):
                maxleaf[y] = rdepth[y]
            else:
                maxleaf[y] -= 1
                sub.extend(tree.children[y])
        q = p
        while True:
            new = max(maxleaf[c] for c in tree.children[q])
            if new == maxleaf[q] or q == alpha:
                maxleaf[q] = new
                break
            maxleaf[q] = new
            q = tree.parent[q]
        for y in kids + [p]:
            if (
                y != alpha
                and tree.alive[y]
                and not tree.is_leaf(y)
                and maxleaf[y] > bound
            ):
                stamp[y] = stamp.get(y, 0) + 1
                heapq.heappush(heap, (_removal_delta(tree, y), y, stamp[y]))
    return total


def _enforce_height(tree: EncodingTree, alpha, bound):
    if bound <= 2:
        return _flatten_to_cut(tree, alpha, bound)
    return _enforce_height_greedy(tree, alpha, bound)


def _stratify(tree: EncodingTree, alpha, watermark):
    """Keep at most one level of freshly agglomerated nodes above the
    pre-stretch children of alpha.

    Nodes with id >= watermark are this cycle's dendrogram; everything
    older is an opaque unit whose interior stays untouched.  A kept
    dendrogram node becomes a direct child of alpha holding its units; the
    rest dissolve.  Unit terms aggregate bottom-up, so the exact minimal
    choice per branch is a single linear pass.  Exact ties dissolve.
    """
    vol = tree.vol
    v_alpha = tree.volume[alpha]
    log2 = math.log2

    def unit_term(u, parent_volume):
        g = tree.cut[u]
        if g == 0.0:
            return 0.0
        return (g / vol) * log2(parent_volume / tree.volume[u])

    dendro = []
    units = []
    stack = [c for c in tree.children[alpha]]
    while stack:
        x = stack.pop()
        if x >= watermark:
            dendro.append(x)
            stack.extend(tree.children[x])
        else:
            units.append(x)
    if not dendro:
        return 0.0
    old_total = math.fsum(
        tree.assigned_entropy(x) for x in dendro
    ) + math.fsum(tree.assigned_entropy(u) for u in units)
    # children-before-parents over the dendrogram region
    best = {}
    keep = {}
    gs = {}
    t2 = {}
    for x in reversed(dendro):
        b_drop = 0.0
        g_sum = 0.0
        t_sum = 0.0
        for c in tree.children[x]:
            if c >= watermark:
                b_drop += best[c]
                g_sum += gs[c]
                t_sum += t2[c]
            else:
                b_drop += unit_term(c, v_alpha)
                g = tree.cut[c]
                vc = tree.volume[c]
                if g > 0.0 and vc > 0.0:
                    g_sum += g / vol
                    t_sum += (g / vol) * log2(vc)
        gs[x] = g_sum
        t2[x] = t_sum
        vx = tree.volume[x]
        gx = tree.cut[x]
        if vx > 0.0:
            head = (gx / vol) * log2(v_alpha / vx) if gx > 0.0 else 0.0
            keep_cost = head + g_sum * log2(vx) - t_sum
        else:
            keep_cost = 0.0
        if keep_cost < b_drop - _TOL:
            best[x] = keep_cost
            keep[x] = True
        else:
            best[x] = b_drop
            keep[x] = False
    new_total = 0.0
    for c in tree.children[alpha]:
        if c >= watermark:
            new_total += best[c]
        else:
            new_total += unit_term(c, v_alpha)
    # materialize, preserving DFS order
    top = []
    stack = list(reversed(tree.children[alpha]))
    while stack:
        x = stack.pop()
        if x < watermark:
            top.append(x)
            continue
        if keep[x]:
            top.append(x)
            mine = []
            inner = list(reversed(tree.children[x]))
            while inner:
                y = inner.pop()
                if y < watermark:
                    mine.append(y)
                else:
                    inner.extend(reversed(tree.children[y]))
                    tree.kill(y)
            tree.set_children(x, mine)
        else:
            stack.extend(reversed(tree.children[x]))
            tree.kill(x)
    tree.set_children(alpha, top)
    return new_total - old_total


def compress(tree: EncodingTree, node: int, max_subtree_height=None) -> float:
    """Greedy beneficial deletions under node; optional height restoration.

    Without a bound this only removes deletions that do not raise entropy
    (chain nodes, empty shells).  With max_subtree_height set, deletion
    continues at minimal cost until no leaf sits deeper than the bound.
    """
    if tree.is_leaf(node):
        return 0.0
    total = _improving_removals(tree, node)
    if max_subtree_height is not None:
        if max_subtree_height < 1:
            raise ValueError("max_subtree_height must be >= 1")
        total += _enforce_height(tree, node, max_subtree_height)
    return total


# -- cycle scheduling ------------------------------------------------------------


def _run_cycle(tree: EncodingTree, layer: int, bounded=True):
    """Stretch + compress every node of the layer, in id order, in place.

    With bounded=True (the optimizer schedule) the cycle adds at most one
    level below the layer: the agglomeration dendrogram is cut back so the
    stretched nodes gain a single stratum of fresh communities.
    """
    layers = tree.layers()
    layer_nodes = [x for x in layers[layer] if not tree.is_leaf(x)]
    pairs = _cross_pairs(tree, layer_nodes)
    for alpha in layer_nodes:
        watermark = len(tree.parent)
        if len(tree.children[alpha]) > 2:
            _agglomerate(tree, alpha, pairs.get(alpha, []))
        _improving_removals(tree, alpha)
        if bounded:
            _stratify(tree, alpha, watermark)


def _evaluate_cycle(tree: EncodingTree, layer: int, max_height):
    work = tree.clone()
    before = work.total_entropy()
    _run_cycle(work, layer, bounded=max_height is not None)
    after = work.total_entropy()
    width = len(tree.layers()[layer])
    return (before - after) / width, work


def spar_score(tree: EncodingTree, layer: int, max_height=None) -> SparScore:
    """Average entropy drop of a tentative cycle on the layer (copy only)."""
    height = tree.height()
    if not 0 <= layer < height:
        raise InvalidLayer(f"layer must be in 0..{height - 1}, got {layer}")
    score, _ = _evaluate_cycle(tree, layer, max_height)
    return SparScore(layer=layer, score=score)


def optimize_trace(tree: EncodingTree, max_height: int = 3):
    """optimize() variant returning (tree, entropy after each accepted cycle)."""
    work = tree.clone()
    history = [work.total_entropy()]
    while work.height() < max_height:
        best_score = -math.inf
        best = None
        for layer in range(work.height()):
            score, cand = _evaluate_cycle(work, layer, max_height)
            if score > best_score:  # ties keep the lowest layer
                best_score, best = score, cand
        if best is None or best_score <= _TOL:
            break
        work = best
        history.append(work.total_entropy())
    return work, history


def optimize(tree: EncodingTree, max_height: int = 3) -> EncodingTree:
    """Sparsest-layer stretch-compress schedule; the input is not mutated."""
    work, _ = optimize_trace(tree, max_height)
    return work
