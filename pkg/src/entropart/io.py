"""Line-oriented file formats: graphs, embeddings, trajectories, trees, skills.

All floats print at 9 decimals so repeated runs are byte-identical.  Every
reader raises ParseError carrying the offending line number; the CLI turns
that into exit code 2.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import EntropartError
from .filtration import EmbeddingMatrix
from .graph import WeightedGraph, build_graph
from .skills import Skill, TrajectoryLog
from .tree import EncodingTree

__all__ = [
    "ParseError",
    "write_graph",
    "read_graph",
    "write_embeddings",
    "read_embeddings",
    "write_trajectories",
    "read_trajectories",
    "write_tree",
    "read_tree",
    "tree_shell",
    "rebuild_tree",
    "write_skills",
    "read_skills",
]


class ParseError(EntropartError):
    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.line_no = line_no


def _fmt(x: float) -> str:
    return f"{x:.9f}"


# -- graphs ---------------------------------------------------------------------


def write_graph(path, g: WeightedGraph):
    with open(path, "w") as fh:
        fh.write(f"#graph directed={1 if g.directed else 0} n={g.n}\n")
        for u, v, w in g.edges():
            fh.write(f"{u}\t{v}\t{_fmt(w)}\n")


def read_graph(path) -> WeightedGraph:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("#graph"):
        raise ParseError(path, 1, "expected '#graph directed=<0|1> n=<n>' header")
    fields = dict(
        part.split("=", 1) for part in lines[0].split()[1:] if "=" in part
    )
    try:
        directed = bool(int(fields["directed"]))
        n = int(fields["n"])
    except (KeyError, ValueError) as exc:
        raise ParseError(path, 1, f"bad graph header: {exc}") from exc
    edges = []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(path, i, f"expected 'u\\tv\\tw', got {line!r}")
        try:
            edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
        except ValueError as exc:
            raise ParseError(path, i, str(exc)) from exc
    try:
        return build_graph(n, directed, edges, allow_self_loops=directed)
    except EntropartError:
        raise


# -- embeddings -------------------------------------------------------------------


def write_embeddings(path, emb):
    if isinstance(emb, EmbeddingMatrix):
        data = emb.data
    else:
        data = np.asarray(emb, dtype=np.float64)
    n, d = data.shape
    with open(path, "w") as fh:
        fh.write(f"#embeddings n={n} d={d}\n")
        for i in range(n):
            row = "\t".join(_fmt(x) for x in data[i])
            fh.write(f"{i}\t{row}\n")


def read_embeddings(path) -> EmbeddingMatrix:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("#embeddings"):
        raise ParseError(path, 1, "expected '#embeddings n=<n> d=<d>' header")
    fields = dict(
        part.split("=", 1) for part in lines[0].split()[1:] if "=" in part
    )
    try:
        n = int(fields["n"])
        d = int(fields["d"])
    except (KeyError, ValueError) as exc:
        raise ParseError(path, 1, f"bad embeddings header: {exc}") from exc
    rows = [None] * n
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != d + 1:
            raise ParseError(path, i, f"expected id plus {d} features")
        try:
            idx = int(parts[0])
            rows[idx] = [float(x) for x in parts[1:]]
        except (ValueError, IndexError) as exc:
            raise ParseError(path, i, str(exc)) from exc
    if any(r is None for r in rows):
        missing = next(i for i, r in enumerate(rows) if r is None)
        raise ParseError(path, len(lines), f"missing embedding row {missing}")
    return EmbeddingMatrix(np.asarray(rows))


# -- trajectories ------------------------------------------------------------------


def write_trajectories(path, log: TrajectoryLog):
    with open(path, "w") as fh:
        fh.write("#trajectories\n")
        for e, episode in enumerate(log.episodes):
            for s in episode:
                fh.write(
                    f"{e}\t{s.state}\t{s.action}\t{_fmt(s.reward)}\t{s.next_state}\n"
                )


def read_trajectories(path) -> TrajectoryLog:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("#trajectories"):
        raise ParseError(path, 1, "expected '#trajectories' header")
    rows = []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 5:
            raise ParseError(
                path, i, "expected 'episode\\ts\\ta\\tr\\ts_next'"
            )
        try:
            rows.append(
                (int(parts[0]), int(parts[1]), int(parts[2]),
                 float(parts[3]), int(parts[4]))
            )
        except ValueError as exc:
            raise ParseError(path, i, str(exc)) from exc
    if not rows:
        raise ParseError(path, len(lines), "empty log")
    return TrajectoryLog.from_steps(rows)


# -- encoding trees -----------------------------------------------------------------


def write_tree(path, tree):
    """Serialize an encoding tree (undirected or directed) as JSON.

    Node ids are remapped to 0..k-1 in ascending arena order; leaves carry
    their vertex list, every node its assigned entropy (root: 0.0).
    """
    ids = tree.node_ids()
    remap = {nid: i for i, nid in enumerate(ids)}
    nodes = []
    for nid in ids:
        leaf = tree.is_leaf(nid)
        entry = {
            "id": remap[nid],
            "parent": None if nid == tree.root else remap[tree.parent[nid]],
            "children": [remap[c] for c in tree.children[nid]],
            "entropy": round(
                0.0 if nid == tree.root else tree.assigned_entropy(nid), 9
            ),
        }
        if leaf:
            entry["vertices"] = tree.subtree_vertices(nid)
        nodes.append(entry)
    with open(path, "w") as fh:
        json.dump({"nodes": nodes}, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_tree(path):
    """Parse a tree JSON into a list of node dicts (validated)."""
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(path, exc.lineno, exc.msg) from exc
    nodes = payload.get("nodes")
    if not isinstance(nodes, list) or not nodes:
        raise ParseError(path, 1, "tree JSON needs a nonempty 'nodes' list")
    by_id = {}
    for entry in nodes:
        try:
            by_id[int(entry["id"])] = entry
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(path, 1, f"bad tree node entry: {entry!r}") from exc
    roots = [e for e in nodes if e.get("parent") is None]
    if len(roots) != 1:
        raise ParseError(path, 1, f"tree JSON must have exactly 1 root, got {len(roots)}")
    return by_id


def tree_shell(by_id) -> EncodingTree:
    """Structural EncodingTree without a graph: for cuts, LCA, and maps.

    Volumes and boundary weights are zeroed; entropy values from the file
    are installed so path-sum formulas can reuse them if needed.
    """
    shell = object.__new__(EncodingTree)
    n_nodes = max(by_id) + 1
    shell.graph = None
    shell.vol = 0.0
    shell.parent = [-1] * n_nodes
    shell.children = [[] for _ in range(n_nodes)]
    shell.volume = [0.0] * n_nodes
    shell.cut = [0.0] * n_nodes
    shell.nvert = [0] * n_nodes
    shell.vertex = [-1] * n_nodes
    shell.alive = [False] * n_nodes
    leaves = {}
    for nid, entry in by_id.items():
        shell.alive[nid] = True
        parent = entry.get("parent")
        shell.parent[nid] = -1 if parent is None else int(parent)
        shell.children[nid] = [int(c) for c in entry.get("children", [])]
        if parent is None:
            shell.root = nid
        verts = entry.get("vertices")
        if verts:
            if len(verts) == 1 and not shell.children[nid]:
                shell.vertex[nid] = int(verts[0])
                leaves[int(verts[0])] = nid
            shell.nvert[nid] = len(verts)
    shell.leaf_of_vertex = [leaves[v] for v in sorted(leaves)]
    return shell


def rebuild_tree(graph: WeightedGraph, by_id) -> EncodingTree:
    """Bind a parsed tree structure to a graph and recompute g/V caches."""
    shell = tree_shell(by_id)
    shell.graph = graph
    degs = graph.degrees.tolist()
    shell.vol = math.fsum(degs)
    shell.recompute_caches()
    return shell


# -- skills ---------------------------------------------------------------------------


def write_skills(path, skills):
    payload = [
        {
            "sequence": list(s.states),
            "abstract_actions": list(s.abstract_actions),
            "score": round(s.score, 9),
            "provenance": s.provenance,
        }
        for s in skills
    ]
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_skills(path):
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(path, exc.lineno, exc.msg) from exc
    out = []
    for entry in payload:
        out.append(
            Skill(
                states=tuple(entry["sequence"]),
                abstract_actions=tuple(entry["abstract_actions"]),
                score=float(entry["score"]),
                provenance=str(entry["provenance"]),
            )
        )
    return out
