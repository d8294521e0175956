"""Q-learning for graph exploration: replay buffer, target network,
epsilon-greedy schedule, Adam updates, and the evaluation protocol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import qnet
from .graphs import Graph, GeneratorSpec, generate
from .mdp import (
    EpisodeConfig,
    ExplorationState,
    candidate_actions,
    episode_return,
    extend_state,
    initial_state,
    reward_fn_for,
    run_episode,
    step,
)


class Transition(NamedTuple):
    env_index: int
    visited: tuple[int, ...]
    action: int
    reward: float
    next_visited: tuple[int, ...]
    next_candidates: tuple[int, ...]
    terminal: bool


@dataclass(frozen=True)
class TrainConfig:
    reward: str = "IGT"
    horizon: int = 10
    gamma: float = 0.99
    buffer_capacity: int = 10_000
    batch_size: int = 64
    lr: float = 7e-4
    target_sync: int = 300
    eps_start: float = 1.0
    eps_end: float = 0.1
    eps_decay_steps: int = 8_000
    episodes_per_env: int = 20
    warmup: int = 500
    clip_norm: float = 5.0  # global gradient-norm clip; 0 disables
    grad_steps_per_env_step: int = 1
    n_layers: int = 2
    hidden: int = 64
    validate_every: int = 100  # episodes between validation passes
    val_episodes: int = 6  # validation episodes per graph
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if not self.eps_end <= self.eps_start <= 1.0:
            raise ValueError("need eps_end <= eps_start <= 1")
        if min(self.buffer_capacity, self.batch_size, self.horizon) < 1:
            raise ValueError("capacities must be positive")


@dataclass(frozen=True)
class EnvironmentSuite:
    family: str
    train: tuple[Graph, ...]
    validation: tuple[Graph, ...]
    test: tuple[Graph, ...]


def build_suite(
    family: str,
    n: int = 50,
    counts: tuple[int, int, int] = (100, 10, 10),
    base_seed: int = 0,
    **family_params,
) -> EnvironmentSuite:
    """Generate disjoint-seeded train/validation/test environments."""

    def make(split_offset: int, count: int) -> tuple[Graph, ...]:
        return tuple(
            generate(
                GeneratorSpec(
                    family=family, n=n, seed=base_seed + split_offset + i, **family_params
                )
            )
            for i in range(count)
        )

    # Splits live in disjoint seed blocks so environments never repeat.
    return EnvironmentSuite(
        family,
        make(0, counts[0]),
        make(1_000_000, counts[1]),
        make(2_000_000, counts[2]),
    )


class ReplayBuffer:
    """FIFO ring buffer with uniform sampling."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self._items: list[Transition] = []
        self._next = 0

    def __len__(self) -> int:
        return len(self._items)

    def push(self, item: Transition) -> None:
        if len(self._items) < self.capacity:
            self._items.append(item)
        else:
            self._items[self._next] = item
            self._next = (self._next + 1) % self.capacity

    def sample_indices(self, rng, k: int) -> np.ndarray:
        return rng.integers(0, len(self._items), size=k)

    def __getitem__(self, i: int) -> Transition:
        return self._items[i]


def epsilon(step_count: int, cfg: TrainConfig) -> float:
    """Linear decay from eps_start to eps_end over eps_decay_steps."""
    if step_count < 0:
        raise ValueError("step must be >= 0")
    if cfg.eps_decay_steps <= 0 or step_count >= cfg.eps_decay_steps:
        return cfg.eps_end
    frac = step_count / cfg.eps_decay_steps
    return cfg.eps_start + (cfg.eps_end - cfg.eps_start) * frac


class _RewardCache:
    """Memoizes the reward functional per visited set within one environment."""

    def __init__(self, kind: str):
        self.fn = reward_fn_for(kind)
        self.cache: dict[frozenset, float] = {}

    def __call__(self, state: ExplorationState) -> float:
        key = state.visited_set
        hit = self.cache.get(key)
        if hit is None:
            hit = self.fn(state)
            self.cache[key] = hit
        return hit


class _EncodingCache:
    """Subgraph encodings keyed by (environment, visited order).

    Encodings are pure functions of the graph and the visited tuple, so they
    survive parameter updates; the cache is cleared wholesale if it grows
    past the cap.
    """

    def __init__(self, envs: Sequence[Graph], cap: int = 300_000):
        self.envs = envs
        self.cap = cap
        self._store: dict = {}

    def get(self, env_index: int, visited: tuple[int, ...]) -> qnet.SubgraphEncoding:
        key = (env_index, visited)
        enc = self._store.get(key)
        if enc is None:
            if len(self._store) >= self.cap:
                self._store.clear()
            sub = ExplorationState.from_visited(self.envs[env_index], visited).subgraph
            enc = qnet.SubgraphEncoding(sub)
            self._store[key] = enc
        return enc

    def candidates(self, env_index: int, visited: tuple[int, ...], cands):
        return [self.get(env_index, visited + (int(v),)) for v in cands]


class _Adam:
    def __init__(self, params: qnet.QNetworkParams, lr: float, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = params.zeros_like()
        self.v = params.zeros_like()
        self.t = 0

    def update(self, params: qnet.QNetworkParams, grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        bc1 = 1.0 - self.beta1**self.t
        bc2 = 1.0 - self.beta2**self.t
        for k, g in grads.items():
            m = self.m[k]
            v = self.v[k]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            params.arrays[k] -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)


def td_target(
    tr: Transition,
    target_params: qnet.QNetworkParams,
    gamma: float,
    graph: Graph,
) -> float:
    """Bellman backup: r for terminal transitions, else r + gamma * max target-Q."""
    if tr.terminal or not tr.next_candidates:
        return tr.reward
    state = ExplorationState.from_visited(graph, tr.next_visited)
    batch = qnet.build_candidate_batch(state, tr.next_candidates)
    return tr.reward + gamma * float(np.max(qnet.q_values(batch, target_params)))


@dataclass
class TrainingLog:
    rows: list[dict] = field(default_factory=list)

    HEADER = ("episode", "env_id", "return", "epsilon", "loss", "val_return")

    def add(self, **kw) -> None:
        self.rows.append(kw)

    def to_csv_lines(self) -> list[str]:
        lines = [",".join(self.HEADER)]
        for r in self.rows:
            lines.append(
                "{episode},{env_id},{ret:.12g},{eps:.6g},{loss},{val}".format(
                    episode=r["episode"],
                    env_id=r["env_id"],
                    ret=r["return"],
                    eps=r["epsilon"],
                    loss=f"{r['loss']:.12g}" if r["loss"] is not None else "",
                    val=f"{r['val_return']:.12g}" if r["val_return"] is not None else "",
                )
            )
        return lines


@dataclass
class EvalResult:
    mean: float
    stderr: float
    returns: np.ndarray


def evaluate_policy(
    agent,
    graphs: Sequence[Graph],
    horizon: int,
    reward: str,
    episodes_per_graph: int,
    seed: int = 0,
) -> EvalResult:
    """Undiscounted mean return and standard error over seeded rollouts."""
    returns = []
    for gi, g in enumerate(graphs):
        memo = _RewardCache(reward)
        for e in range(episodes_per_graph):
            cfg = EpisodeConfig(
                horizon=horizon, gamma=1.0, reward=reward, seed=seed + 7919 * gi + e
            )
            trace = run_episode(g, cfg, agent, reward_fn=memo)
            returns.append(episode_return(trace, 1.0))
    arr = np.array(returns, dtype=np.float64)
    stderr = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
    return EvalResult(float(arr.mean()), stderr, arr)


def evaluate(
    params: qnet.QNetworkParams,
    graphs: Sequence[Graph],
    cfg: TrainConfig,
    episodes_per_graph: int,
    seed: int = 0,
) -> EvalResult:
    agent = qnet.QPolicyAgent(params, epsilon=0.0)
    return evaluate_policy(
        agent, graphs, cfg.horizon, cfg.reward, episodes_per_graph, seed
    )


def train(
    suite: EnvironmentSuite,
    cfg: TrainConfig,
    initial: Optional[qnet.QNetworkParams] = None,
    on_grad_step=None,
) -> tuple[qnet.QNetworkParams, TrainingLog]:
    """DQN training over the suite's training environments.

    Environments are visited round-robin; one Adam step runs per environment
    step once the warmup transitions have accumulated. Returns the parameters
    with the best validation return seen (falling back to the final ones).
    `on_grad_step(step_index, params, target)` is an optional inspection hook
    invoked after each optimizer step.
    """
    envs = suite.train
    rng = np.random.default_rng([cfg.seed, 0xD9])
    params = initial.copy() if initial is not None else qnet.init_params(
        cfg.n_layers, cfg.hidden, seed=cfg.seed
    )
    target = params.copy()
    adam = _Adam(params, cfg.lr)
    buffer = ReplayBuffer(cfg.buffer_capacity)
    memos = [_RewardCache(cfg.reward) for _ in envs]
    log = TrainingLog()

    env_steps = 0
    grad_steps = 0
    best_val = -math.inf
    best_params: Optional[qnet.QNetworkParams] = None
    total_episodes = cfg.episodes_per_env * len(envs)

    encodings = _EncodingCache(envs)

    def grad_step() -> float:
        nonlocal grad_steps
        idxs = buffer.sample_indices(rng, cfg.batch_size)
        grads = params.zeros_like()
        loss = 0.0
        for i in idxs:
            tr = buffer[int(i)]
            if tr.terminal or not tr.next_candidates:
                y = tr.reward
            else:
                next_encs = encodings.candidates(
                    tr.env_index, tr.next_visited, tr.next_candidates
                )
                y = tr.reward + cfg.gamma * float(
                    np.max(qnet.q_values_enc(next_encs, target))
                )
            enc = encodings.get(tr.env_index, tr.next_visited)
            q, cache = qnet.q_value_subgraph(enc, enc.n - 1, params, True)
            err = q - y
            loss += err * err
            qnet.backward_subgraph(cache, 2.0 * err / cfg.batch_size, grads, params)
        loss /= cfg.batch_size
        if not math.isfinite(loss):
            raise RuntimeError(f"training diverged: non-finite loss {loss}")
        if cfg.clip_norm > 0:
            norm = math.sqrt(sum(float((g * g).sum()) for g in grads.values()))
            if norm > cfg.clip_norm:
                scale = cfg.clip_norm / norm
                for g in grads.values():
                    g *= scale
        adam.update(params, grads)
        grad_steps += 1
        if grad_steps % cfg.target_sync == 0:
            target.arrays = {k: v.copy() for k, v in params.arrays.items()}
        if on_grad_step is not None:
            on_grad_step(grad_steps, params, target)
        return loss

    for ep in range(total_episodes):
        env_i = ep % len(envs)
        g = envs[env_i]
        state = initial_state(
            g, EpisodeConfig(horizon=cfg.horizon, reward=cfg.reward), rng=rng
        )
        ep_return = 0.0
        losses = []
        cands = candidate_actions(state)
        while state.t < cfg.horizon and cands:
            eps = epsilon(env_steps, cfg)
            if rng.random() < eps:
                action = cands[int(rng.integers(len(cands)))]
            else:
                encs = encodings.candidates(env_i, state.visited, cands)
                action = cands[int(np.argmax(qnet.q_values_enc(encs, params)))]
            next_state, reward = step(state, action, memos[env_i])
            next_cands = candidate_actions(next_state)
            terminal = next_state.t >= cfg.horizon or not next_cands
            buffer.push(
                Transition(
                    env_i,
                    state.visited,
                    action,
                    reward,
                    next_state.visited,
                    tuple(next_cands),
                    terminal,
                )
            )
            ep_return += reward
            env_steps += 1
            if len(buffer) >= cfg.warmup:
                for _ in range(cfg.grad_steps_per_env_step):
                    losses.append(grad_step())
            state, cands = next_state, next_cands

        val_return = None
        if cfg.validate_every > 0 and (
            (ep + 1) % cfg.validate_every == 0 or ep + 1 == total_episodes
        ):
            # Rotating the evaluation seed keeps best-params selection from
            # overfitting one fixed set of validation rollouts.
            val = evaluate(
                params, suite.validation, cfg, cfg.val_episodes, seed=cfg.seed + 31 + ep
            )
            val_return = val.mean
            if val.mean > best_val:
                best_val = val.mean
                best_params = params.copy()
        log.add(
            episode=ep,
            env_id=env_i,
            **{"return": ep_return},
            epsilon=epsilon(env_steps, cfg),
            loss=float(np.mean(losses)) if losses else None,
            val_return=val_return,
        )

    return (best_params if best_params is not None else params), log
