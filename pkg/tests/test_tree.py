import math

import numpy as np
import pytest

from entropart import (
    brute_force_optimal,
    build_graph,
    flat_tree,
    node_entropy,
    one_dim_entropy,
    tree_entropy,
)
from entropart.errors import (
    EmptyGraph,
    NonPositiveWeight,
    RootHasNoAssignedEntropy,
    TooLarge,
)
from entropart.tree import _partitions

from conftest import random_undirected


def two_layer_tree(g, blocks):
    """Manual 2-layer tree over the given vertex blocks."""
    tree = flat_tree(g)
    degs = g.degrees
    wmat = np.zeros((g.n, g.n))
    for u, v, w in g.edges():
        wmat[u, v] += w
        wmat[v, u] += w
    tree.children[tree.root] = []
    for block in blocks:
        vol = math.fsum(degs[v] for v in block)
        cut = math.fsum(
            wmat[u, v] for u in block for v in range(g.n) if v not in block
        )
        nid = tree.new_node(tree.root, vol, cut, len(block))
        tree.attach(tree.root, nid)
        for v in block:
            leaf = tree.leaf_of_vertex[v]
            tree.parent[leaf] = nid
            tree.slot[leaf] = len(tree.children[nid])
            tree.children[nid].append(leaf)
    return tree


def test_one_dim_4cycle(unit_4cycle):
    assert one_dim_entropy(unit_4cycle) == 2.0


def test_one_dim_single_edge_any_weight():
    g = build_graph(2, False, [(0, 1, 3.7)])
    assert one_dim_entropy(g) == 1.0


def test_one_dim_bridged(bridged_triangles):
    # hand evaluation: 4 * (2/14) log2(14/2) + 2 * (3/14) log2(14/3)
    expect = 4 * (2 / 14) * math.log2(14 / 2) + 2 * (3 / 14) * math.log2(14 / 3)
    assert abs(one_dim_entropy(bridged_triangles) - expect) < 1e-12
    assert abs(one_dim_entropy(bridged_triangles) - 2.556657) < 1e-6


def test_one_dim_rejects_nonpositive():
    g = build_graph(2, False, [(0, 1, -0.5)])
    with pytest.raises(NonPositiveWeight):
        one_dim_entropy(g)


def test_flat_tree_matches_one_dim(unit_4cycle, bridged_triangles):
    for g in (unit_4cycle, bridged_triangles):
        assert abs(tree_entropy(flat_tree(g)) - one_dim_entropy(g)) < 1e-12


def test_flat_tree_empty_graph():
    g = build_graph(1, False, [])
    with pytest.raises(EmptyGraph):
        flat_tree(g)


def test_flat_tree_random_equality():
    # flat-tree entropy equals the 1-D entropy on random graphs, and the
    # value sits in [0, log2 n]
    for seed in range(100):
        n = 5 + seed % 46
        g = random_undirected(n, seed=seed)
        h = one_dim_entropy(g)
        assert abs(tree_entropy(flat_tree(g)) - h) < 1e-12
        assert 0.0 <= h <= math.log2(n) + 1e-12


def test_node_entropy_bridged(bridged_triangles):
    tree = two_layer_tree(bridged_triangles, [(0, 1, 2), (3, 4, 5)])
    left = tree.children[tree.root][0]
    assert abs(node_entropy(tree, left) - (1 / 14) * math.log2(14 / 7)) < 1e-12
    assert abs(node_entropy(tree, left) - 0.0714286) < 1e-7
    leaf0 = tree.leaf_of_vertex[0]  # degree 2 under volume-7 community
    assert abs(node_entropy(tree, leaf0) - (2 / 14) * math.log2(7 / 2)) < 1e-12
    assert abs(node_entropy(tree, leaf0) - 0.258194) < 1e-6


def test_node_entropy_zero_boundary(bridged_triangles):
    tree = two_layer_tree(bridged_triangles, [(0, 1, 2, 3, 4, 5)])
    whole = tree.children[tree.root][0]
    assert node_entropy(tree, whole) == 0.0


def test_root_has_no_assigned_entropy(unit_4cycle):
    tree = flat_tree(unit_4cycle)
    with pytest.raises(RootHasNoAssignedEntropy):
        node_entropy(tree, tree.root)


def test_tree_entropy_two_layer(bridged_triangles):
    tree = two_layer_tree(bridged_triangles, [(0, 1, 2), (3, 4, 5)])
    # hand sum: two community terms and six leaf terms
    expect = math.fsum(
        [
            2 * (1 / 14) * math.log2(14 / 7),
            4 * (2 / 14) * math.log2(7 / 2),
            2 * (3 / 14) * math.log2(7 / 3),
        ]
    )
    assert abs(tree_entropy(tree) - expect) < 1e-12
    assert abs(tree_entropy(tree) - 1.699514) < 1e-6
    assert abs(tree.clone().recompute_caches()) < 1e-9


def test_intermediate_whole_set_node_matches_flat(bridged_triangles):
    tree = two_layer_tree(bridged_triangles, [(0, 1, 2, 3, 4, 5)])
    assert abs(tree_entropy(tree) - one_dim_entropy(bridged_triangles)) < 1e-12


def test_entropy_scale_invariance(bridged_triangles):
    scaled = build_graph(
        6, False, [(u, v, 7.3 * w) for u, v, w in bridged_triangles.edges()]
    )
    assert abs(one_dim_entropy(scaled) - one_dim_entropy(bridged_triangles)) < 1e-12
    t1 = two_layer_tree(bridged_triangles, [(0, 1, 2), (3, 4, 5)])
    t2 = two_layer_tree(scaled, [(0, 1, 2), (3, 4, 5)])
    assert abs(tree_entropy(t1) - tree_entropy(t2)) < 1e-12


def test_partition_count_n6():
    assert sum(1 for _ in _partitions(tuple(range(6)))) == 203


def test_brute_force_two_clique(bridged_triangles):
    tree, value = brute_force_optimal(bridged_triangles, 2)
    assert abs(value - 1.6995138503199656) < 1e-9
    blocks = sorted(
        tuple(tree.subtree_vertices(c)) for c in tree.children[tree.root]
    )
    assert blocks == [(0, 1, 2), (3, 4, 5)]
    tree.validate()


def test_brute_force_k3_triangle():
    # oracle outcome: a 2+1 split strictly beats the flat tree on K_3
    g = build_graph(3, False, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)])
    tree, value = brute_force_optimal(g, 2)
    flat = one_dim_entropy(g)
    assert value < flat
    assert abs(value - 1.3899750004807707) < 1e-12
    sizes = sorted(
        len(tree.subtree_vertices(c)) for c in tree.children[tree.root]
    )
    assert sizes == [1, 2]


def test_brute_force_height3_at_least_as_good(bridged_triangles):
    _, v2 = brute_force_optimal(bridged_triangles, 2)
    _, v3 = brute_force_optimal(bridged_triangles, 3)
    assert v3 <= v2 + 1e-12


def test_brute_force_guards():
    g = random_undirected(9, seed=1)
    with pytest.raises(TooLarge):
        brute_force_optimal(g, 2)
    small = random_undirected(4, seed=1)
    with pytest.raises(TooLarge):
        brute_force_optimal(small, 4)


def test_brute_force_degenerate_empty():
    g = build_graph(1, False, [])
    with pytest.raises(EmptyGraph):
        brute_force_optimal(g, 2)
