"""End to end: noisy gridworld observations to a tabular policy.

A random policy explores a 6x6 grid whose observations are one-hot
coordinates plus Gaussian noise channels.  The offline batch feeds the
similarity -> filtration -> tree-optimization -> aggregation pipeline;
fresh observations map to the best-correlated cluster center; and two
identical Q-learners train side by side, one on the abstraction and one on
ground-truth cells.

Scaled down here to stay snappy; the CLI's `gridworld` command runs the
full experiment (4000 offline steps, 15000 episodes).
"""

import numpy as np

from entropart.gridworld import (
    GridworldEnv,
    collect_offline,
    evaluate,
    run_offline_abstraction,
)

env = GridworldEnv(width=6, height=6, goal=(5, 5), noise_dim=20,
                   noise_scale=0.1, seed=1)
dataset = collect_offline(env, 1500, seed=1)
print("offline batch:", dataset.embeddings.n, "observations,",
      len(dataset.log.episodes), "episodes")
print("cells visited:", len(np.unique(dataset.labels)), "/ 36")

abstraction = run_offline_abstraction(dataset, max_height=3, depth=1)
print("\nk* =", abstraction.k_star)
print("entropy:", round(abstraction.entropy_flat, 3), "->",
      round(abstraction.entropy_optimized, 3))
print("abstract states:", len(abstraction.result.cut_nodes))
print("purity vs ground-truth cells:", round(abstraction.purity, 4))

report = evaluate(env, abstraction.result, episodes=4000, seed=1)
print("\nlearning curves (every 8th epoch):")
for i in range(0, len(report.epochs), 8):
    print(f"  epoch {report.epochs[i]:3d}:  abstract {report.abstract_mean[i]:7.2f}"
          f"   ground truth {report.baseline_mean[i]:7.2f}")
print("\nfinal mean reward: abstract", round(report.final_abstract, 3),
      "vs ground truth", round(report.final_baseline, 3),
      f"({report.relative_gap:.1%} apart)")
