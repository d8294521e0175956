"""Command-line experiment harness.

Subcommands: gen, train, eval, generalize, bench, pagerank. Every run writes
its fully resolved configuration beside its outputs, and all randomness is
seeded, so re-running a command reproduces its CSVs byte for byte (timing
columns aside).
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import data_io, dqn, qnet
from .pagerank import (
    PageRankSetup,
    burn_in_teleport,
    fit_parameters,
    improvement_ratio,
    pagerank,
    rank_percentile,
)
from .config import DEFAULTS, ExperimentConfig, load_config, write_config
from .graphs import GeneratorSpec, default_rg_radius, generate
from .mdp import EpisodeConfig, baseline_agent, run_episode, episode_return
from .homology import reward_igt
from .compression import reward_cpt
from .mdp import ExplorationState, candidate_actions, extend_state, reward_fn_for


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(c) for c in row) + "\n")


def family_params(cfg: ExperimentConfig, n: Optional[int] = None) -> dict:
    n = cfg.n_nodes if n is None else n
    fam = cfg.family
    if fam == "RG":
        radius = cfg.rg_radius if cfg.rg_radius > 0 else default_rg_radius(n)
        return {"radius": radius}
    if fam == "WS":
        return {"k": cfg.ws_k, "p": cfg.ws_p}
    if fam == "BA":
        return {"m": cfg.ba_m}
    if fam == "ER":
        return {"p": cfg.er_p}
    raise ValueError(f"unknown family {fam!r}")


def suite_from_config(cfg: ExperimentConfig) -> dqn.EnvironmentSuite:
    return dqn.build_suite(
        cfg.family,
        n=cfg.n_nodes,
        counts=(cfg.n_train, cfg.n_val, cfg.n_test),
        base_seed=cfg.base_seed,
        **family_params(cfg),
    )


def train_config(cfg: ExperimentConfig) -> dqn.TrainConfig:
    return dqn.TrainConfig(
        reward=cfg.reward,
        horizon=cfg.horizon,
        gamma=cfg.gamma,
        buffer_capacity=cfg.buffer_capacity,
        batch_size=cfg.batch_size,
        lr=cfg.lr,
        target_sync=cfg.target_sync,
        eps_start=cfg.eps_start,
        eps_end=cfg.eps_end,
        eps_decay_steps=cfg.eps_decay_steps,
        episodes_per_env=cfg.episodes_per_env,
        warmup=cfg.warmup,
        n_layers=cfg.n_layers,
        hidden=cfg.hidden,
        validate_every=cfg.validate_every,
        val_episodes=cfg.val_episodes,
        seed=cfg.seed,
    )


def _prepare_out(out: Path, cfg: ExperimentConfig, force: bool, must_be_empty: bool) -> None:
    if out.exists() and must_be_empty and any(out.iterdir()) and not force:
        raise RuntimeError(f"output directory {out} is not empty (use --force)")
    out.mkdir(parents=True, exist_ok=True)
    write_config(cfg, out / "resolved_config.txt")


def parallel_map(fn, items, workers: int):
    """Ordered map over items; each item must carry its own seed."""
    if workers <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# --- gen ---------------------------------------------------------------


def cmd_gen(cfg: ExperimentConfig, out: Path, force: bool) -> int:
    _prepare_out(out, cfg, force, must_be_empty=True)
    suite = suite_from_config(cfg)
    for split, graphs in (
        ("train", suite.train),
        ("val", suite.validation),
        ("test", suite.test),
    ):
        for i, g in enumerate(graphs):
            name = f"{cfg.family}_{split}_{i:03d}.edges"
            data_io.save_graph(g, out / name, header=f"{cfg.family} {split} #{i}")
    total = cfg.n_train + cfg.n_val + cfg.n_test
    print(f"wrote {total} environments to {out}")
    return 0


# --- train -------------------------------------------------------------


def cmd_train(cfg: ExperimentConfig, out: Path, force: bool) -> int:
    _prepare_out(out, cfg, force, must_be_empty=False)
    suite = suite_from_config(cfg)
    params, log = dqn.train(suite, train_config(cfg))
    qnet.save_params(params, out / "checkpoint.npz")
    (out / "training_log.csv").write_text(
        "\n".join(log.to_csv_lines()) + "\n", encoding="utf-8"
    )
    test = dqn.evaluate(
        params, suite.test, train_config(cfg), cfg.eval_episodes_per_graph, seed=cfg.seed + 77
    )
    print(f"trained {cfg.family}/{cfg.reward}: test return {test.mean:.3f} ± {test.stderr:.3f}")
    return 0


# --- eval --------------------------------------------------------------

AGENTS = ("random", "max_degree", "min_degree", "greedy", "gnn")


def _eval_task(args):
    agent_name, graph, reward, horizon, episodes, seed, params = args
    if agent_name == "gnn":
        agent = qnet.QPolicyAgent(params)
    else:
        agent = baseline_agent(agent_name, reward=reward)
    res = dqn.evaluate_policy(agent, [graph], horizon, reward, episodes, seed=seed)
    return res


def cmd_eval(cfg: ExperimentConfig, out: Path, checkpoint: Optional[Path], force: bool) -> int:
    if checkpoint is None:
        raise RuntimeError("eval needs --checkpoint from a train run")
    _prepare_out(out, cfg, force, must_be_empty=False)
    params = qnet.load_params(checkpoint)
    suite = suite_from_config(cfg)
    tasks = []
    labels = []
    for agent_name in AGENTS:
        for gi, g in enumerate(suite.test):
            labels.append((agent_name, gi))
            tasks.append(
                (
                    agent_name,
                    g,
                    cfg.reward,
                    cfg.horizon,
                    cfg.eval_episodes_per_graph,
                    cfg.seed + 101 * gi,
                    params if agent_name == "gnn" else None,
                )
            )
    results = parallel_map(_eval_task, tasks, cfg.workers)
    rows = [
        (agent_name, gi, _fmt(res.mean), _fmt(res.stderr))
        for (agent_name, gi), res in zip(labels, results)
    ]
    write_csv(out / "eval.csv", ("agent", "graph", "mean_return", "stderr"), rows)
    summary = {}
    for (agent_name, _), res in zip(labels, results):
        summary.setdefault(agent_name, []).extend(res.returns.tolist())
    print(f"{cfg.family}/{cfg.reward} test returns over {len(suite.test)} graphs:")
    for agent_name in AGENTS:
        arr = np.array(summary[agent_name])
        se = arr.std(ddof=1) / np.sqrt(arr.size) if arr.size > 1 else 0.0
        print(f"  {agent_name:>10}: {arr.mean():.3f} ± {se:.3f}")
    return 0


# --- generalize --------------------------------------------------------


def cmd_generalize(
    cfg: ExperimentConfig, out: Path, checkpoint: Optional[Path], force: bool
) -> int:
    if checkpoint is None:
        raise RuntimeError("generalize needs --checkpoint from a train run")
    _prepare_out(out, cfg, force, must_be_empty=False)
    params = qnet.load_params(checkpoint)
    rows = []
    agents = ("gnn", "greedy", "random")

    def sweep_point(sweep, value, n, horizon, point_seed):
        graphs = [
            generate(
                GeneratorSpec(
                    family=cfg.family, n=n, seed=3_000_000 + point_seed + i,
                    **family_params(cfg, n=n),
                )
            )
            for i in range(cfg.gen_graphs_per_point)
        ]
        for agent_name in agents:
            agent = (
                qnet.QPolicyAgent(params)
                if agent_name == "gnn"
                else baseline_agent(agent_name, reward=cfg.reward)
            )
            res = dqn.evaluate_policy(
                agent, graphs, horizon, cfg.reward, cfg.gen_episodes_per_graph,
                seed=cfg.seed + point_seed,
            )
            rows.append((sweep, value, agent_name, _fmt(res.mean), _fmt(res.stderr)))

    for i, horizon in enumerate(cfg.gen_horizons):
        sweep_point("horizon", horizon, cfg.n_nodes, horizon, 10_000 + i)
    for i, n in enumerate(cfg.gen_sizes):
        sweep_point("size", n, n, cfg.horizon, 20_000 + i)
    write_csv(
        out / "generalize.csv", ("sweep", "value", "agent", "mean_return", "stderr"), rows
    )
    print(f"wrote sweep over horizons {cfg.gen_horizons} and sizes {cfg.gen_sizes}")
    return 0


# --- bench -------------------------------------------------------------


def grow_state(g, size: int, seed: int) -> ExplorationState:
    """Random non-revisiting walk of `size` visited nodes for timing."""
    rng = np.random.default_rng([seed, 0xBE])
    state = ExplorationState.from_visited(g, [int(rng.integers(g.n))])
    while state.t < size:
        cands = candidate_actions(state)
        if not cands:
            break
        state = extend_state(state, cands[int(rng.integers(len(cands)))])
    return state


def _bench_once(state, params, repeats: int) -> dict[str, float]:
    cands = candidate_actions(state)
    batch = qnet.build_candidate_batch(state, cands)
    subs = [extend_state(state, v) for v in cands]
    out = {}

    def timer(fn) -> float:
        best = np.inf
        for _ in range(repeats):
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
        return best

    out["gnn_forward"] = timer(lambda: qnet.q_values(batch, params))
    out["greedy_igt"] = timer(lambda: [reward_igt(s) for s in subs])
    out["greedy_cpt"] = timer(lambda: [reward_cpt(s) for s in subs])
    out["n_candidates"] = len(cands)
    return out


def cmd_bench(cfg: ExperimentConfig, out: Path, checkpoint: Optional[Path], force: bool) -> int:
    _prepare_out(out, cfg, force, must_be_empty=False)
    params = (
        qnet.load_params(checkpoint)
        if checkpoint is not None
        else qnet.init_params(cfg.n_layers, cfg.hidden, seed=cfg.seed)
    )
    rows = []
    for size in cfg.bench_sizes:
        samples = {"gnn_forward": [], "greedy_igt": [], "greedy_cpt": []}
        n_cands = []
        for i in range(cfg.bench_graphs):
            n_env = size + 50
            g = generate(
                GeneratorSpec(
                    family=cfg.family, n=n_env, seed=4_000_000 + 37 * size + i,
                    **family_params(cfg, n=n_env),
                )
            )
            state = grow_state(g, size, seed=cfg.seed + i)
            res = _bench_once(state, params, cfg.bench_repeats)
            for key in samples:
                samples[key].append(res[key])
            n_cands.append(res["n_candidates"])
        for key, vals in samples.items():
            arr = np.array(vals)
            se = arr.std(ddof=1) / np.sqrt(arr.size) if arr.size > 1 else 0.0
            rows.append(
                (size, key, _fmt(float(np.median(arr))), _fmt(float(arr.mean())), _fmt(float(se)))
            )
        print(f"size {size}: medians "
              + ", ".join(f"{k}={np.median(v):.4g}s" for k, v in samples.items()))
    write_csv(
        out / "bench.csv",
        ("size", "metric", "median_seconds", "mean_seconds", "stderr"),
        rows,
    )
    return 0


# --- pagerank ----------------------------------------------------------


def synth_trajectories(cfg: ExperimentConfig):
    """Greedy-IGT walker trajectories on a fresh synthetic graph."""
    g = generate(
        GeneratorSpec(
            family=cfg.synth_family,
            n=cfg.synth_n,
            seed=cfg.seed + 5_000_000,
            **_family_defaults(cfg, cfg.synth_family, cfg.synth_n),
        )
    )
    agent = baseline_agent("greedy", reward="IGT")
    memo_fn = reward_fn_for("IGT")
    trajectories = []
    for e in range(cfg.synth_episodes):
        ep_cfg = EpisodeConfig(
            horizon=cfg.synth_horizon, reward="IGT", seed=cfg.seed + 9000 + e
        )
        trace = run_episode(g, ep_cfg, agent, reward_fn=memo_fn)
        trajectories.append(tuple(trace.visited))
    return g, trajectories


def _bias_models(cfg: ExperimentConfig, checkpoint: Optional[Path]):
    if checkpoint is not None:
        return {cfg.pr_reward: qnet.load_params(checkpoint)}
    # No checkpoint: train a compact network on same-family environments.
    n_env = min(cfg.synth_n, 50)
    suite = dqn.build_suite(
        cfg.synth_family,
        n=n_env,
        counts=(cfg.pr_n_train_envs, 2, 2),
        base_seed=cfg.base_seed + 50_000,
        **_family_defaults(cfg, cfg.synth_family, n_env),
    )
    tc = replace(
        train_config(cfg),
        reward=cfg.pr_reward,
        episodes_per_env=cfg.pr_episodes_per_env,
    )
    params, _ = dqn.train(suite, tc)
    return {cfg.pr_reward: params}


def _family_defaults(cfg: ExperimentConfig, fam: str, n: int) -> dict:
    if fam == "RG":
        return {"radius": default_rg_radius(n)}
    if fam == "WS":
        return {"k": cfg.ws_k, "p": cfg.ws_p}
    if fam == "BA":
        return {"m": cfg.ba_m}
    return {"p": cfg.er_p}


def cmd_pagerank(
    cfg: ExperimentConfig, out: Path, checkpoint: Optional[Path], force: bool
) -> int:
    _prepare_out(out, cfg, force, must_be_empty=False)
    if cfg.graph_file:
        loaded = data_io.load_graph(cfg.graph_file)
        g = loaded.graph
        trajectories = data_io.load_trajectories(cfg.trajectory_file, loaded.index)
    else:
        g, trajectories = synth_trajectories(cfg)
        data_io.save_trajectories(trajectories, out / "trajectories.txt")
        data_io.save_graph(g, out / "environment.edges")
    dataset = data_io.Dataset(g, list(trajectories), name="pagerank-input")
    windows, dropped = data_io.extract_windows(dataset, cfg.n_burn_in)
    split = data_io.split_windows(windows, cfg.split_fraction, cfg.seed)
    models = _bias_models(cfg, checkpoint)
    setup = PageRankSetup(
        alpha=cfg.alpha,
        greediness=cfg.p_g,
        n_burn_in=cfg.n_burn_in,
        mc_block_steps=cfg.mc_block_steps,
        mc_tol=cfg.mc_tol,
        mc_max_steps=cfg.mc_max_steps,
        seed=cfg.seed,
    )
    fitted, fitted_bias, cache = fit_parameters(
        [w.nodes for w in split.train],
        g,
        models,
        setup,
        budget=cfg.fit_budget,
        n_alphas=cfg.fit_alphas,
        seed=cfg.seed,
    )
    ratio = improvement_ratio(
        [w.nodes for w in split.test], g, models, fitted, fitted_bias, setup, cache
    )
    rows = [
        ("windows_total", len(windows)),
        ("windows_dropped_nonedges", dropped),
        ("windows_train", len(split.train)),
        ("windows_test", len(split.test)),
        ("unbiased_alpha", _fmt(fitted.alpha)),
        ("unbiased_objective", _fmt(fitted.objective)),
        ("biased_alpha", _fmt(fitted_bias.alpha)),
        ("biased_w_pr", _fmt(fitted_bias.weights[0])),
        ("biased_w_igt", _fmt(fitted_bias.weights[1])),
        ("biased_w_cpt", _fmt(fitted_bias.weights[2])),
        ("biased_objective", _fmt(fitted_bias.objective)),
        ("improvement_ratio", _fmt(ratio)),
        ("improvement_pct", _fmt((ratio - 1.0) * 100.0)),
    ]
    write_csv(out / "pagerank_report.csv", ("metric", "value"), rows)
    rank_rows = []
    for side, wins in (("train", split.train), ("test", split.test)):
        for w in wins:
            q = burn_in_teleport(g.n, w.nodes[:-1])
            eta = pagerank(g, fitted.alpha, q)
            rank = rank_percentile(eta, w.nodes, g)
            rank_rows.append(
                (side, w.trajectory, " ".join(map(str, w.nodes)),
                 _fmt(rank) if rank is not None else "excluded")
            )
    write_csv(
        out / "window_ranks.csv", ("side", "trajectory", "window", "unbiased_rank"), rank_rows
    )
    print(
        f"improvement ratio {ratio:.4f} ({(ratio - 1) * 100:+.2f}%) "
        f"with weights {fitted_bias.weights}"
    )
    return 0


# --- entry point --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curiograph",
        description="Curiosity-driven graph exploration experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, desc in (
        ("gen", "generate environment suites as edge-list files"),
        ("train", "train the exploration Q-network"),
        ("eval", "evaluate baselines and the trained network on the test suite"),
        ("generalize", "sweep horizon and environment size with a trained network"),
        ("bench", "wall-time scaling of reward evaluation vs the network"),
        ("pagerank", "fit and evaluate curiosity-biased next-node prediction"),
    ):
        p = sub.add_parser(name, help=desc)
        p.add_argument("--config", type=Path, default=None, help="key=value config file")
        p.add_argument("--seed", type=int, default=None, help="override the base seed")
        p.add_argument("--out", type=Path, required=True, help="output directory")
        p.add_argument("--checkpoint", type=Path, default=None, help="trained network npz")
        p.add_argument("--force", action="store_true", help="allow non-empty output dir")
        p.add_argument("--workers", type=int, default=None, help="worker pool size")
        p.add_argument("--smoke", action="store_true", help="shrunken CI-scale constants")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    try:
        cfg = load_config(args.config, overrides=overrides, smoke=args.smoke)
        if args.command == "gen":
            return cmd_gen(cfg, args.out, args.force)
        if args.command == "train":
            return cmd_train(cfg, args.out, args.force)
        if args.command == "eval":
            return cmd_eval(cfg, args.out, args.checkpoint, args.force)
        if args.command == "generalize":
            return cmd_generalize(cfg, args.out, args.checkpoint, args.force)
        if args.command == "bench":
            return cmd_bench(cfg, args.out, args.checkpoint, args.force)
        if args.command == "pagerank":
            return cmd_pagerank(cfg, args.out, args.checkpoint, args.force)
        raise RuntimeError(f"unknown command {args.command!r}")
    except Exception as exc:  # one-line diagnostic, nonzero exit
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
