"""Directed entropy, transition graphs, and skill extraction.

Trajectories over abstract states induce a weighted digraph.  After
augmenting it to strong connectivity and normalizing, the stationary
distribution drives in-flow-normalized node volumes, the merge/combine
optimizer builds an encoding tree, and each transition's probability is a
ratio of ancestor-path entropy sums (the common-path reading).  Skills are
observed two-hop sequences whose middle state is re-chosen to maximize the
product of hop probabilities.
"""

import numpy as np

from entropart import (
    TrajectoryLog,
    augment_strongly_connected,
    build_graph,
    build_transition_graph,
    correlation_reconstruction,
    directed_one_dim_entropy,
    extract_skills,
    flat_tree,
    optimize,
    stationary_distribution,
    transition_probability,
)

# Two directed 3-cycles with weak cross links.
edges = [
    (0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0),
    (3, 4, 1.0), (4, 5, 1.0), (5, 3, 1.0),
    (2, 3, 0.05), (5, 0, 0.05),
]
g = build_graph(6, True, edges)
aug = augment_strongly_connected(g)
sd = stationary_distribution(aug)
print("stationary distribution:", np.round(sd.probabilities, 4))
print("H1 (directed) =", round(directed_one_dim_entropy(aug), 6), "bits")

# A random walk over five abstract states, recorded as a trajectory log.
rng = np.random.default_rng(3)
rows = []
state = 0
for t in range(120):
    nxt = (state + int(rng.integers(1, 3))) % 5
    rows.append((0, state, int(rng.integers(4)), -1.0, nxt))
    state = nxt
log = TrajectoryLog.from_steps(rows)

# The action tree groups the four primitive actions into two families.
ag = build_graph(4, False, [(0, 1, 1.0), (2, 3, 1.0), (1, 2, 0.05)])
action_tree = optimize(flat_tree(ag), 2)

tg = build_transition_graph(log, list(range(5)), action_tree)
print("\nobserved abstract edges:", tg.observed_edges())
print("p matrix:")
print(np.round(correlation_reconstruction(tg), 4))

skills = extract_skills(tg, log)
print("\ntop skills:")
for s in skills[:5]:
    mark = "" if s.provenance == "raw" else "  (rerouted)"
    print(f"  {s.states}  actions {s.abstract_actions}  p = {s.score:.4f}{mark}")
