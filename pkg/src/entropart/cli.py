"""Command-line surface tying the pipeline together.

Subcommands: entropy, filter, optimize, skills, gridworld.  All floats
print at 9 decimals; every run with identical flags and seed is
byte-identical.  Exit codes: 0 success, 2 rejected input, 3 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import io as eio
from .abstraction import cut_assignments
from .directed import (
    augment_strongly_connected,
    directed_one_dim_entropy,
    directed_tree_entropy,
    flat_directed_tree,
    optimize_directed,
)
from .errors import EntropartError
from .filtration import filter_edges, similarity_graph
from .gridworld import GridworldEnv, collect_offline, evaluate, run_offline_abstraction
from .optimizer import optimize
from .skills import build_transition_graph, extract_skills
from .tree import flat_tree, one_dim_entropy, tree_entropy

__all__ = ["RunConfig", "main"]


@dataclass
class RunConfig:
    """Validated knobs shared by the pipeline commands."""

    max_height: int = 3
    depth: int = 1
    eps_aug: float | None = None
    seed: int = 0
    noise: float = 0.1
    noise_dim: int = 20
    steps: int = 4000
    episodes: int = 15000

    def validate(self):
        if self.max_height < 2:
            raise EntropartError(f"K must be >= 2, got {self.max_height}")
        if self.depth < 0:
            raise EntropartError(f"depth must be >= 0, got {self.depth}")
        if self.steps < 1:
            raise EntropartError("empty log: --steps must be >= 1")
        if self.episodes < 1:
            raise EntropartError("--episodes must be >= 1")
        if self.noise < 0:
            raise EntropartError("--noise must be >= 0")
        return self


def _fmt(x: float) -> str:
    return f"{x:.9f}"


def _cmd_entropy(args):
    g = eio.read_graph(args.graph)
    if g.directed:
        aug = augment_strongly_connected(g)
        print(f"H1 = {_fmt(directed_one_dim_entropy(aug))}")
        if args.tree:
            by_id = eio.read_tree(args.tree)
            shell = eio.tree_shell(by_id)
            ents = [
                float(by_id[nid]["entropy"])
                for nid in sorted(by_id)
                if by_id[nid].get("parent") is not None
            ]
            print(f"HT = {_fmt(sum(ents))}")
        return 0
    print(f"H1 = {_fmt(one_dim_entropy(g))}")
    if args.tree:
        tree = eio.rebuild_tree(g, eio.read_tree(args.tree))
        print(f"HT = {_fmt(tree_entropy(tree))}")
    return 0


def _cmd_filter(args):
    emb = eio.read_embeddings(args.embeddings)
    sparse, k_star = filter_edges(similarity_graph(emb))
    eio.write_graph(args.output, sparse)
    print(f"k_star = {k_star}")
    print(f"H1 = {_fmt(one_dim_entropy(sparse))}")
    return 0


def _cmd_optimize(args):
    cfg = RunConfig(max_height=args.K).validate()
    g = eio.read_graph(args.graph)
    if args.directed or g.directed:
        aug = augment_strongly_connected(g)
        initial = directed_tree_entropy(flat_directed_tree(aug))
        tree = optimize_directed(aug, cfg.max_height)
        final = directed_tree_entropy(tree)
    else:
        base = flat_tree(g)
        initial = tree_entropy(base)
        tree = optimize(base, cfg.max_height)
        final = tree_entropy(tree)
    eio.write_tree(args.output, tree)
    print(f"H_initial = {_fmt(initial)}")
    print(f"H_final = {_fmt(final)}")
    return 0


def _cmd_skills(args):
    cfg = RunConfig(max_height=args.K).validate()
    log = eio.read_trajectories(args.trajectories)
    state_shell = eio.tree_shell(eio.read_tree(args.state_tree))
    action_shell = eio.tree_shell(eio.read_tree(args.action_tree))
    state_map, _ = cut_assignments(state_shell, 1)
    tg = build_transition_graph(log, state_map, action_shell, cfg.max_height)
    skills = extract_skills(tg, log)
    eio.write_skills(args.output, skills)
    print(f"skills = {len(skills)}")
    return 0


def _curve_svg(report):
    """Minimal fixed-layout SVG with both learning curves."""
    w, h, pad = 640, 360, 48
    xs = report.epochs
    series = [
        ("abstract", report.abstract_mean, "#1f77b4"),
        ("baseline", report.baseline_mean, "#d62728"),
    ]
    lo = min(min(s[1]) for s in series)
    hi = max(max(s[1]) for s in series)
    span = (hi - lo) or 1.0
    xspan = (xs[-1] - xs[0]) or 1

    def pt(x, y):
        px = pad + (x - xs[0]) / xspan * (w - 2 * pad)
        py = h - pad - (y - lo) / span * (h - 2 * pad)
        return f"{px:.2f},{py:.2f}"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
        f'<line x1="{pad}" y1="{h - pad}" x2="{w - pad}" y2="{h - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{h - pad}" stroke="black"/>',
        f'<text x="{w // 2}" y="{h - 12}" font-size="12" text-anchor="middle">epoch</text>',
        f'<text x="14" y="{h // 2}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {h // 2})">mean episode reward</text>',
    ]
    for i, (name, ys, color) in enumerate(series):
        points = " ".join(pt(x, y) for x, y in zip(xs, ys))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>'
        )
        parts.append(
            f'<text x="{w - pad - 120}" y="{pad + 16 * (i + 1)}" font-size="12" fill="{color}">{name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _cmd_gridworld(args):
    cfg = RunConfig(
        max_height=args.K,
        depth=args.depth,
        seed=args.seed,
        noise=args.noise,
        noise_dim=args.noise_dim,
        steps=args.steps,
        episodes=args.episodes,
    ).validate()
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    env = GridworldEnv(
        noise_dim=cfg.noise_dim, noise_scale=cfg.noise, seed=cfg.seed
    )
    dataset = collect_offline(env, cfg.steps, cfg.seed)
    abstraction = run_offline_abstraction(dataset, cfg.max_height, cfg.depth)
    report = evaluate(env, abstraction.result, cfg.episodes, cfg.seed)
    summary = {
        "seed": cfg.seed,
        "noise": round(cfg.noise, 9),
        "noise_dim": cfg.noise_dim,
        "steps": cfg.steps,
        "episodes": cfg.episodes,
        "episodes_per_epoch": report.episodes_per_epoch,
        "max_height": cfg.max_height,
        "depth": cfg.depth,
        "k_star": abstraction.k_star,
        "n_abstract_states": len(abstraction.result.cut_nodes),
        "entropy_flat": round(abstraction.entropy_flat, 9),
        "entropy_optimized": round(abstraction.entropy_optimized, 9),
        "purity": round(abstraction.purity, 9),
        "final_abstract": round(report.final_abstract, 9),
        "final_baseline": round(report.final_baseline, 9),
        "relative_gap": round(report.relative_gap, 9),
    }
    with open(outdir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(outdir / "curves.csv", "w") as fh:
        fh.write("epoch,agent,mean_reward,std\n")
        for i, epoch in enumerate(report.epochs):
            fh.write(
                f"{epoch},abstract,{_fmt(report.abstract_mean[i])},{_fmt(report.abstract_std[i])}\n"
            )
        for i, epoch in enumerate(report.epochs):
            fh.write(
                f"{epoch},baseline,{_fmt(report.baseline_mean[i])},{_fmt(report.baseline_std[i])}\n"
            )
    if args.plot:
        with open(outdir / "curves.svg", "w") as fh:
            fh.write(_curve_svg(report))
    print(f"purity = {_fmt(abstraction.purity)}")
    print(f"k_star = {abstraction.k_star}")
    print(f"final_abstract = {_fmt(report.final_abstract)}")
    print(f"final_baseline = {_fmt(report.final_baseline)}")
    print(f"relative_gap = {_fmt(report.relative_gap)}")
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="entropart",
        description="Structural-entropy graph partitioning and abstraction",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="print 1-D (and tree) entropy of a graph file")
    p.add_argument("graph")
    p.add_argument("--tree", help="tree JSON to evaluate against the graph")
    p.set_defaults(fn=_cmd_entropy)

    p = sub.add_parser("filter", help="sparsify an embedding similarity graph")
    p.add_argument("embeddings")
    p.add_argument("-o", "--output", required=True, help="output graph TSV")
    p.set_defaults(fn=_cmd_filter)

    p = sub.add_parser("optimize", help="minimize tree entropy for a graph file")
    p.add_argument("graph")
    p.add_argument("-o", "--output", required=True, help="output tree JSON")
    p.add_argument("--directed", action="store_true")
    p.add_argument("--K", type=int, default=3, help="max tree height (default 3)")
    p.set_defaults(fn=_cmd_optimize)

    p = sub.add_parser("skills", help="extract skills from a trajectory log")
    p.add_argument("trajectories")
    p.add_argument("state_tree")
    p.add_argument("action_tree")
    p.add_argument("-o", "--output", required=True, help="output skills JSON")
    p.add_argument("--K", type=int, default=3)
    p.set_defaults(fn=_cmd_skills)

    p = sub.add_parser("gridworld", help="offline abstraction experiment")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--noise-dim", type=int, default=20)
    p.add_argument("--steps", type=int, default=4000)
    p.add_argument("--episodes", type=int, default=15000)
    p.add_argument("--K", type=int, default=3)
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--plot", action="store_true", help="emit curves.svg")
    p.set_defaults(fn=_cmd_gridworld)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except EntropartError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - invariant violations
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
