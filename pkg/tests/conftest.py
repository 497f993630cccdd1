import numpy as np
import pytest

from entropart import build_graph


@pytest.fixture
def unit_4cycle():
    return build_graph(4, False, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)])


@pytest.fixture
def bridged_triangles():
    """Two unit triangles 0-2 and 3-5 joined by the bridge (2, 3)."""
    edges = [
        (0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0),
        (3, 4, 1.0), (3, 5, 1.0), (4, 5, 1.0),
        (2, 3, 1.0),
    ]
    return build_graph(6, False, edges)


@pytest.fixture
def directed_3cycle():
    return build_graph(3, True, [(0, 1, 0.5), (1, 2, 0.5), (2, 0, 0.5)])


def random_undirected(n, seed, density=2.0, lo=0.2, hi=2.0):
    """Seeded random undirected graph with at least one edge."""
    rng = np.random.default_rng(seed)
    edges = {}
    target = max(1, int(density * n))
    for _ in range(8 * target):
        u = int(rng.integers(n))
        v = int(rng.integers(n))
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if key not in edges:
            edges[key] = float(rng.uniform(lo, hi))
        if len(edges) >= target:
            break
    if not edges:
        edges[(0, 1)] = 1.0
    return build_graph(n, False, [(u, v, w) for (u, v), w in sorted(edges.items())])


def random_digraph(n, seed, density=2.0, ensure_cycle=False):
    """Seeded random digraph; optionally closed into a ring for strong connectivity."""
    rng = np.random.default_rng(seed)
    edges = {}
    if ensure_cycle:
        for i in range(n):
            edges[(i, (i + 1) % n)] = float(rng.uniform(0.2, 2.0))
    target = max(1, int(density * n))
    for _ in range(8 * target):
        u = int(rng.integers(n))
        v = int(rng.integers(n))
        if u == v:
            continue
        if (u, v) not in edges:
            edges[(u, v)] = float(rng.uniform(0.2, 2.0))
        if len(edges) >= target + (n if ensure_cycle else 0):
            break
    if not edges:
        edges[(0, 1)] = 1.0
    return build_graph(n, True, [(u, v, w) for (u, v), w in sorted(edges.items())])
