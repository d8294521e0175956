"""Flat key=value experiment configuration shared by every command.

Every tunable constant of the library has a key here; unknown keys are
rejected so typos fail loudly. Each command writes its fully resolved
configuration next to its outputs for reproducibility.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

# Defaults for every constant. Types here drive parsing: int, float, str,
# and comma-separated int lists.
DEFAULTS: dict[str, Any] = {
    # environments
    "family": "RG",
    "n_nodes": 50,
    "n_train": 100,
    "n_val": 10,
    "n_test": 10,
    "base_seed": 1000,
    "rg_radius": 0.0,  # 0: pick the mean-degree-8 default for n_nodes
    "ws_k": 4,
    "ws_p": 0.1,
    "ba_m": 2,
    "er_p": 0.16,
    # exploration episodes
    "horizon": 10,
    "reward": "IGT",
    "gamma": 0.99,
    # Q-network
    "n_layers": 2,
    "hidden": 64,
    # DQN training
    "lr": 0.0007,
    "batch_size": 64,
    "buffer_capacity": 10000,
    "target_sync": 300,
    "eps_start": 1.0,
    "eps_end": 0.1,
    "eps_decay_steps": 8000,
    "episodes_per_env": 20,
    "warmup": 500,
    "validate_every": 100,
    "val_episodes": 6,
    # evaluation
    "eval_episodes_per_graph": 10,
    # generalization sweeps
    "gen_horizons": [5, 10, 20, 40],
    "gen_sizes": [20, 50, 100, 500],
    "gen_episodes_per_graph": 5,
    "gen_graphs_per_point": 5,
    # wall-time benchmark
    "bench_sizes": [25, 50, 100, 200, 400],
    "bench_graphs": 5,
    "bench_repeats": 3,
    # pagerank / prediction
    "alpha": 0.85,
    "p_g": 0.5,
    "n_burn_in": 4,
    "mc_block_steps": 100000,
    "mc_tol": 0.001,
    "mc_max_steps": 20000000,
    "fit_budget": 24,
    "fit_alphas": 4,
    "split_fraction": 0.7,
    "graph_file": "",  # empty: synthesize trajectories instead
    "trajectory_file": "",
    "synth_n": 200,
    "synth_family": "BA",
    "synth_episodes": 60,
    "synth_horizon": 12,
    "pr_train_params": "",  # checkpoint for the bias network ("" = train on the fly)
    "pr_reward": "IGT",
    "pr_episodes_per_env": 6,
    "pr_n_train_envs": 40,
    # misc
    "seed": 0,
    "workers": 1,
}

# Shrunken constants so every command finishes in minutes for CI smoke runs.
SMOKE_OVERRIDES: dict[str, Any] = {
    "n_nodes": 30,
    "n_train": 5,
    "n_val": 2,
    "n_test": 2,
    "horizon": 6,
    "hidden": 32,
    "episodes_per_env": 10,
    "warmup": 100,
    "eps_decay_steps": 200,
    "validate_every": 20,
    "eval_episodes_per_graph": 3,
    "gen_horizons": [4, 6],
    "gen_sizes": [20, 40],
    "gen_episodes_per_graph": 2,
    "gen_graphs_per_point": 2,
    "bench_sizes": [10, 20],
    "bench_graphs": 2,
    "bench_repeats": 1,
    "synth_n": 40,
    "synth_episodes": 10,
    "synth_horizon": 8,
    "mc_block_steps": 4000,
    "mc_tol": 0.02,
    "mc_max_steps": 200000,
    "fit_budget": 6,
    "fit_alphas": 2,
    "pr_episodes_per_env": 2,
    "pr_n_train_envs": 4,
    "n_burn_in": 3,
}


class ExperimentConfig(dict):
    """Dict of resolved settings with typed access helpers."""

    def __getattr__(self, key: str):
        try:
            return self[key]
        except KeyError as exc:
            raise AttributeError(key) from exc


def _parse_value(key: str, raw: str):
    default = DEFAULTS[key]
    raw = raw.strip()
    if isinstance(default, list):
        return [int(tok) for tok in raw.split(",") if tok.strip()]
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes", "on")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw


def parse_config_text(text: str) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in DEFAULTS:
            raise ValueError(f"line {lineno}: unknown configuration key {key!r}")
        out[key] = _parse_value(key, raw)
    return out


def load_config(
    path=None, overrides: dict[str, Any] | None = None, smoke: bool = False
) -> ExperimentConfig:
    cfg = ExperimentConfig(DEFAULTS)
    if smoke:
        cfg.update(SMOKE_OVERRIDES)
    if path is not None:
        cfg.update(parse_config_text(Path(path).read_text(encoding="utf-8")))
    for key, value in (overrides or {}).items():
        if key not in DEFAULTS:
            raise ValueError(f"unknown configuration key {key!r}")
        cfg[key] = value
    return cfg


def format_config(cfg: dict[str, Any]) -> str:
    lines = []
    for key in sorted(cfg):
        value = cfg[key]
        if isinstance(value, list):
            value = ",".join(str(v) for v in value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def write_config(cfg: dict[str, Any], path) -> None:
    Path(path).write_text(format_config(cfg), encoding="utf-8")
