"""Abstract transition graphs, common-path transition probabilities, skills.

Trajectories are replayed through the state abstraction to count abstract
transitions; each abstract edge carries the lowest common ancestor (in the
action tree) of every original action observed on it.  The counted digraph
is augmented to strong connectivity, normalized, and its encoding tree
optimized.  A transition's probability is the ratio of two ancestor-path
entropy sums in that tree:

    p(z_i, z_j) = sum_{delta <= alpha < root} H(alpha)
                / sum_{nu_j <= alpha < root} H(alpha)

with delta the lowest common ancestor of the two leaves.  The numerator's
terms are a subset of the denominator's, so p stays in [0, 1], p(z, z) = 1,
and an LCA at the root gives 0 (empty sum).

A skill is an observed two-hop abstract sequence whose intermediate state
has been re-chosen to maximize the product of the two hop probabilities,
restricted to hops present in the counted (non-injected) edge set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .directed import augment_strongly_connected, optimize_directed
from .errors import UnknownAbstractState, UnmappedId
from .graph import build_graph

__all__ = [
    "Step",
    "TrajectoryLog",
    "TransitionGraph",
    "Skill",
    "build_transition_graph",
    "transition_probability",
    "extract_skills",
    "correlation_reconstruction",
]


@dataclass(frozen=True)
class Step:
    state: int
    action: int
    reward: float
    next_state: int


@dataclass
class TrajectoryLog:
    """Episodes of (state, action, reward, next state) steps."""

    episodes: list

    @classmethod
    def from_steps(cls, rows):
        """Build from (episode, state, action, reward, next_state) rows."""
        eps = {}
        for episode, s, a, r, s2 in rows:
            eps.setdefault(int(episode), []).append(
                Step(int(s), int(a), float(r), int(s2))
            )
        return cls(episodes=[eps[k] for k in sorted(eps)])

    def n_steps(self):
        return sum(len(e) for e in self.episodes)


@dataclass(frozen=True)
class Skill:
    """Two-hop abstract sequence with its composed transition probability."""

    states: tuple          # (z_i, z_mid, z_k)
    abstract_actions: tuple  # action-tree node ids for the two hops
    score: float
    provenance: str        # "raw" when the observed middle state survived


class TransitionGraph:
    """Directed abstract-state graph plus its optimized encoding tree."""

    def __init__(self, n_states, aug, tree, counts, edge_action, state_map):
        self.n_states = n_states
        self.aug = aug
        self.tree = tree
        self.counts = counts          # (zi, zj) -> observed frequency
        self.edge_action = edge_action  # (zi, zj) -> action-tree node id
        self.state_map = state_map
        self._entropy = {
            nid: tree.assigned_entropy(nid)
            for nid in tree.node_ids()
            if nid != tree.root
        }
        self._depth = tree.depths()

    def observed_edges(self):
        return sorted(self.counts)


def _lca(tree, nodes, depth=None):
    """Lowest common ancestor of tree node ids."""
    nodes = list(nodes)
    cur = nodes[0]
    if depth is None:
        depth = tree.depths()
    for other in nodes[1:]:
        a, b = cur, other
        while depth[a] > depth[b]:
            a = tree.parent[a]
        while depth[b] > depth[a]:
            b = tree.parent[b]
        while a != b:
            a = tree.parent[a]
            b = tree.parent[b]
        cur = a
    return cur


def build_transition_graph(log: TrajectoryLog, state_map, action_tree,
                           max_height: int = 3, eps_aug=None,
                           flow_normalization: str = "in") -> TransitionGraph:
    """Count abstract transitions, augment, and optimize the directed tree.

    state_map sends original state vertex ids to dense abstract ids; the
    abstract action of an edge is the LCA in action_tree of all original
    actions seen on it.
    """
    state_map = np.asarray(state_map, dtype=np.int64)
    n_actions = len(action_tree.leaf_of_vertex)
    counts = {}
    actions_on = {}
    for episode in log.episodes:
        for step in episode:
            if step.state >= len(state_map) or step.next_state >= len(state_map):
                raise UnmappedId(
                    f"state id {max(step.state, step.next_state)} has no abstraction"
                )
            if step.action >= n_actions or step.action < 0:
                raise UnmappedId(f"action id {step.action} not in the action tree")
            zi = int(state_map[step.state])
            zj = int(state_map[step.next_state])
            counts[(zi, zj)] = counts.get((zi, zj), 0) + 1
            actions_on.setdefault((zi, zj), set()).add(step.action)
    n_states = int(state_map.max()) + 1
    edge_action = {}
    for pair, acts in actions_on.items():
        leaves = [action_tree.leaf_of_vertex[a] for a in sorted(acts)]
        edge_action[pair] = _lca(action_tree, leaves)
    edges = [(zi, zj, float(c)) for (zi, zj), c in sorted(counts.items())]
    base = build_graph(n_states, True, edges, allow_self_loops=True)
    aug = augment_strongly_connected(base, eps_aug)
    tree = optimize_directed(aug, max_height, flow_normalization)
    return TransitionGraph(n_states, aug, tree, counts, edge_action, state_map)


def transition_probability(tg: TransitionGraph, zi: int, zj: int) -> float:
    """Common-path entropy ratio for the abstract transition zi -> zj."""
    if not (0 <= zi < tg.n_states) or not (0 <= zj < tg.n_states):
        raise UnknownAbstractState(f"abstract state pair ({zi}, {zj}) unknown")
    if zi == zj:
        return 1.0
    tree = tg.tree
    leaf_i = tree.leaf_of_vertex[zi]
    leaf_j = tree.leaf_of_vertex[zj]
    delta = _lca(tree, [leaf_i, leaf_j], tg._depth)
    num_terms = []
    node = delta
    while node != tree.root:
        num_terms.append(tg._entropy[node])
        node = tree.parent[node]
    den_terms = []
    node = leaf_j
    while node != tree.root:
        den_terms.append(tg._entropy[node])
        node = tree.parent[node]
    num = math.fsum(num_terms)
    den = math.fsum(den_terms)
    if den == 0.0:
        return 0.0
    return num / den


def extract_skills(tg: TransitionGraph, log: TrajectoryLog):
    """Optimized two-hop skills from every observed length-2 transition.

    Self-loop hops are skipped (a skill must change abstract state), the
    intermediate candidates are restricted to counted edges (injected
    connectivity edges are ineligible), and among equal products the
    smallest candidate id wins.  Identical sequences are deduplicated.
    """
    state_map = tg.state_map
    out_by_src = {}
    for (a, b) in tg.counts:
        out_by_src.setdefault(a, set()).add(b)
    seen = {}
    for episode in log.episodes:
        for t in range(len(episode) - 1):
            s0, s1 = episode[t], episode[t + 1]
            zi = int(state_map[s0.state])
            zj = int(state_map[s0.next_state])
            zk = int(state_map[s1.next_state])
            if zi == zj or zj == zk:
                continue
            best_mid = None
            best_score = -1.0
            for mid in sorted(out_by_src.get(zi, ())):
                if mid == zi or mid == zk:
                    continue
                if zk not in out_by_src.get(mid, ()):
                    continue
                score = transition_probability(tg, zi, mid) * transition_probability(
                    tg, mid, zk
                )
                if score > best_score:
                    best_score = score
                    best_mid = mid
            if best_mid is None:
                continue
            key = (zi, best_mid, zk)
            if key in seen:
                continue
            seen[key] = Skill(
                states=key,
                abstract_actions=(
                    tg.edge_action[(zi, best_mid)],
                    tg.edge_action[(best_mid, zk)],
                ),
                score=best_score,
                provenance="raw" if best_mid == zj else "optimized",
            )
    skills = sorted(seen.values(), key=lambda s: (-s.score, s.states))
    return skills


def correlation_reconstruction(tg: TransitionGraph) -> np.ndarray:
    """Matrix of transition probabilities for every ordered state pair."""
    n = tg.n_states
    out = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            out[i, j] = transition_probability(tg, i, j)
    return out
