"""Noisy-observation gridworld and the offline abstraction experiment.

The environment is a small grid whose observations are one-hot x and y
coordinates with Gaussian noise channels appended, so observations of the
same cell correlate strongly and the similarity pipeline can recover the
cell structure without ever seeing coordinates.  A uniform random policy
collects an offline batch; the batch's observations feed the similarity ->
filtration -> tree-optimization -> aggregation pipeline; and two tabular
Q-learners are trained side by side, one on the abstract states and one on
the ground-truth cells, to compare learning curves.

Everything is deterministic under the seed: the environment, the random
policy, and both training runs draw from generators seeded from the one
value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .abstraction import AbstractionResult, aggregate
from .errors import EmptyGraph
from .filtration import EmbeddingMatrix, filter_edges, similarity_graph
from .optimizer import optimize
from .skills import Step, TrajectoryLog
from .tree import flat_tree, tree_entropy

__all__ = [
    "GridworldEnv",
    "TabularAgent",
    "OfflineDataset",
    "OfflineAbstraction",
    "EvaluationReport",
    "collect_offline",
    "run_offline_abstraction",
    "evaluate",
]

# action index -> (dx, dy)
_MOVES = ((0, -1), (0, 1), (-1, 0), (1, 0))  # up, down, left, right


class GridworldEnv:
    """Grid navigation with noisy one-hot observations.

    Rewards are -1 per step and 0 on reaching the goal; episodes cap at
    step_cap steps.  Observations are one-hot(x) + one-hot(y) + Gaussian
    noise of dimension noise_dim and scale noise_scale, freshly sampled
    per visit.
    """

    def __init__(self, width=6, height=6, goal=(5, 5), noise_dim=20,
                 noise_scale=0.1, step_cap=50, seed=0):
        self.width = width
        self.height = height
        self.goal = goal
        self.noise_dim = noise_dim
        self.noise_scale = noise_scale
        self.step_cap = step_cap
        self.reseed(seed)
        self._pos = (0, 0)
        self._steps = 0

    def reseed(self, seed):
        self.rng = np.random.default_rng(seed)

    @property
    def n_cells(self):
        return self.width * self.height

    @property
    def obs_dim(self):
        return self.width + self.height + self.noise_dim

    def cell_index(self, pos=None):
        x, y = pos if pos is not None else self._pos
        return y * self.width + x

    def observe(self, pos=None):
        x, y = pos if pos is not None else self._pos
        obs = np.zeros(self.obs_dim)
        obs[x] = 1.0
        obs[self.width + y] = 1.0
        if self.noise_dim:
            obs[self.width + self.height:] = self.rng.normal(
                0.0, self.noise_scale, self.noise_dim
            )
        return obs

    def reset(self):
        while True:
            x = int(self.rng.integers(self.width))
            y = int(self.rng.integers(self.height))
            if (x, y) != self.goal:
                break
        self._pos = (x, y)
        self._steps = 0
        return self.observe()

    def step(self, action):
        dx, dy = _MOVES[action]
        x = min(max(self._pos[0] + dx, 0), self.width - 1)
        y = min(max(self._pos[1] + dy, 0), self.height - 1)
        self._pos = (x, y)
        self._steps += 1
        at_goal = self._pos == self.goal
        reward = 0.0 if at_goal else -1.0
        done = at_goal or self._steps >= self.step_cap
        return self.observe(), reward, done


@dataclass
class OfflineDataset:
    """Random-policy batch: log rows index embedding rows, labels are cells."""

    log: TrajectoryLog
    embeddings: EmbeddingMatrix
    labels: np.ndarray


def collect_offline(env: GridworldEnv, steps: int, seed: int) -> OfflineDataset:
    """Uniform-random rollout of the given length, one embedding row per visit."""
    if steps < 1:
        raise EmptyGraph("empty log: need at least one offline step")
    env.reseed(seed)
    rows = []
    labels = []
    episodes = []
    current = []
    obs = env.reset()
    rows.append(obs)
    labels.append(env.cell_index())
    cur_id = 0
    for _ in range(steps):
        action = int(env.rng.integers(4))
        obs, reward, done = env.step(action)
        rows.append(obs)
        labels.append(env.cell_index())
        nxt_id = len(rows) - 1
        current.append(Step(cur_id, action, reward, nxt_id))
        if done:
            episodes.append(current)
            current = []
            obs = env.reset()
            rows.append(obs)
            labels.append(env.cell_index())
            cur_id = len(rows) - 1
        else:
            cur_id = nxt_id
    if current:
        episodes.append(current)
    # drop a trailing unused reset row
    used = max(max(s.state, s.next_state) for ep in episodes for s in ep)
    rows = rows[: used + 1]
    labels = labels[: used + 1]
    return OfflineDataset(
        log=TrajectoryLog(episodes=episodes),
        embeddings=EmbeddingMatrix(np.stack(rows)),
        labels=np.asarray(labels, dtype=np.int64),
    )


@dataclass
class OfflineAbstraction:
    result: AbstractionResult
    k_star: int
    entropy_flat: float
    entropy_optimized: float
    purity: float


def purity_score(assignments, labels) -> float:
    """Fraction of vertices whose community's majority label is their own."""
    assignments = np.asarray(assignments)
    labels = np.asarray(labels)
    match = 0
    for comm in np.unique(assignments):
        members = labels[assignments == comm]
        values, counts = np.unique(members, return_counts=True)
        match += int(counts.max())
    return match / len(labels)


def run_offline_abstraction(dataset: OfflineDataset, max_height: int = 3,
                            depth: int = 1) -> OfflineAbstraction:
    """similarity -> filtration -> optimize -> aggregate, with purity."""
    sim = similarity_graph(dataset.embeddings)
    sparse, k_star = filter_edges(sim)
    base = flat_tree(sparse)
    tree = optimize(base, max_height)
    result = aggregate(tree, dataset.embeddings, depth=depth)
    return OfflineAbstraction(
        result=result,
        k_star=k_star,
        entropy_flat=tree_entropy(base),
        entropy_optimized=tree_entropy(tree),
        purity=purity_score(result.assignments, dataset.labels),
    )


class TabularAgent:
    """Plain epsilon-greedy Q-learning over integer states."""

    def __init__(self, n_states, n_actions=4, learning_rate=0.2,
                 discount=0.95, eps_start=1.0, eps_end=0.05):
        self.q = np.zeros((n_states, n_actions))
        self.learning_rate = learning_rate
        self.discount = discount
        self.eps_start = eps_start
        self.eps_end = eps_end

    def epsilon(self, episode, total_episodes):
        frac = min(episode / max(0.6 * total_episodes, 1), 1.0)
        return self.eps_start + (self.eps_end - self.eps_start) * frac

    def act(self, state, eps, rng):
        if rng.random() < eps:
            return int(rng.integers(self.q.shape[1]))
        return int(np.argmax(self.q[state]))

    def update(self, s, a, r, s2, done):
        target = r if done else r + self.discount * float(np.max(self.q[s2]))
        self.q[s, a] += self.learning_rate * (target - self.q[s, a])


class CenterMapper:
    """Map fresh observations to the best-correlated cluster center."""

    def __init__(self, centers):
        c = np.asarray(centers, dtype=np.float64)
        mu = c.mean(axis=1, keepdims=True)
        cc = c - mu
        norm = np.sqrt((cc * cc).sum(axis=1, keepdims=True))
        norm[norm == 0.0] = 1.0
        self.centered = cc / norm
        self.n_states = c.shape[0]

    def __call__(self, obs):
        o = obs - obs.mean()
        n = math.sqrt(float(o @ o))
        if n == 0.0:
            return 0
        scores = self.centered @ (o / n)
        return int(np.argmax(scores))


@dataclass
class EvaluationReport:
    """Per-epoch learning curves and final rewards for both agents."""

    epochs: list
    abstract_mean: list
    abstract_std: list
    baseline_mean: list
    baseline_std: list
    final_abstract: float
    final_baseline: float
    episodes_per_epoch: int

    @property
    def relative_gap(self):
        return abs(self.final_abstract - self.final_baseline) / abs(
            self.final_baseline
        )


def _train(env, mapper, n_states, episodes, seed, episodes_per_epoch):
    agent = TabularAgent(n_states)
    rng = np.random.default_rng(seed)
    env.reseed(seed + 1)
    rewards = []
    for ep in range(episodes):
        eps = agent.epsilon(ep, episodes)
        obs = env.reset()
        s = mapper(obs)
        total = 0.0
        done = False
        while not done:
            a = agent.act(s, eps, rng)
            obs, r, done = env.step(a)
            s2 = mapper(obs)
            agent.update(s, a, r, s2, done)
            s = s2
            total += r
        rewards.append(total)
    means, stds = [], []
    for start in range(0, episodes, episodes_per_epoch):
        chunk = np.asarray(rewards[start:start + episodes_per_epoch])
        means.append(float(chunk.mean()))
        stds.append(float(chunk.std()))
    return means, stds, agent


def evaluate(env: GridworldEnv, abstraction, episodes: int, seed: int,
             episodes_per_epoch: int = 100) -> EvaluationReport:
    """Train matched tabular agents on abstract and ground-truth states.

    abstraction may be an AbstractionResult (its centers drive a nearest
    correlated-center mapper) or any callable observation -> state id.
    Both runs share the seed so a purity-1 abstraction reproduces the
    baseline exactly up to state relabeling.
    """
    if isinstance(abstraction, AbstractionResult):
        mapper = CenterMapper(abstraction.centers)
        n_states = mapper.n_states
    elif isinstance(abstraction, CenterMapper):
        mapper = abstraction
        n_states = mapper.n_states
    else:
        mapper = abstraction
        n_states = env.n_cells

    def true_mapper(obs):
        return env.cell_index()

    abs_mean, abs_std, _ = _train(
        env, mapper, n_states, episodes, seed, episodes_per_epoch
    )
    base_mean, base_std, _ = _train(
        env, true_mapper, env.n_cells, episodes, seed, episodes_per_epoch
    )
    # final performance averaged over the last five epochs to damp the
    # per-epoch sampling noise of random start cells
    tail = min(5, len(abs_mean))
    return EvaluationReport(
        epochs=list(range(1, len(abs_mean) + 1)),
        abstract_mean=abs_mean,
        abstract_std=abs_std,
        baseline_mean=base_mean,
        baseline_std=base_std,
        final_abstract=float(np.mean(abs_mean[-tail:])),
        final_baseline=float(np.mean(base_mean[-tail:])),
        episodes_per_epoch=episodes_per_epoch,
    )
