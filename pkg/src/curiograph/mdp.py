"""Exploration MDP: visited-subgraph states, candidate actions with the
fallback rule, deterministic transitions, episode running, and the four
baseline agents.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import compression, homology
from .graphs import Graph

RewardFn = Callable[["ExplorationState"], float]

REWARD_KINDS = ("IGT", "CPT")


@dataclass(frozen=True)
class EpisodeConfig:
    """Episode parameters: horizon counts visited nodes including the start."""

    horizon: int
    gamma: float = 1.0
    reward: str = "IGT"
    start: Optional[int] = None  # None: uniform random under the seed
    seed: int = 0

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if self.reward not in REWARD_KINDS:
            raise ValueError(f"reward must be one of {REWARD_KINDS}")


class ExplorationState:
    """Ordered visited nodes plus the induced subgraph, grown incrementally.

    `subgraph` node i corresponds to visited[i]; the last visited node is
    always the subgraph's last node.
    """

    __slots__ = ("graph", "visited", "visited_set", "subgraph")

    def __init__(self, graph: Graph, visited: tuple[int, ...], subgraph: Graph):
        self.graph = graph
        self.visited = visited
        self.visited_set = frozenset(visited)
        self.subgraph = subgraph

    @property
    def t(self) -> int:
        return len(self.visited)

    @classmethod
    def from_visited(cls, graph: Graph, visited: Sequence[int]) -> "ExplorationState":
        visited = tuple(int(v) for v in visited)
        if len(set(visited)) != len(visited):
            raise ValueError("visited nodes must be distinct")
        sub_edges = []
        for i, u in enumerate(visited):
            nbrs = graph.neighbor_set(u)
            for j in range(i + 1, len(visited)):
                if visited[j] in nbrs:
                    sub_edges.append((i, j))
        return cls(graph, visited, Graph(len(visited), sub_edges))


def reward_fn_for(kind: str) -> RewardFn:
    if kind == "IGT":
        return homology.reward_igt
    if kind == "CPT":
        return compression.reward_cpt
    raise ValueError(f"unknown reward kind {kind!r}")


def initial_state(g: Graph, cfg: EpisodeConfig, rng=None) -> ExplorationState:
    if g.n == 0:
        raise ValueError("cannot explore an empty graph")
    if cfg.start is not None:
        v = int(cfg.start)
        if not 0 <= v < g.n:
            raise IndexError(f"start node {v} outside 0..{g.n - 1}")
    else:
        if rng is None:
            rng = np.random.default_rng([cfg.seed, 0x51])
        v = int(rng.integers(g.n))
    return ExplorationState(g, (v,), Graph(1, []))


def candidate_actions(state: ExplorationState) -> list[int]:
    """Unvisited neighbors of the newest node; if none, unvisited neighbors
    of the whole visited subgraph; empty means the episode is terminal."""
    last = state.visited[-1]
    cands = [v for v in state.graph.adj[last] if v not in state.visited_set]
    if cands:
        return [int(v) for v in cands]
    fallback: set[int] = set()
    for u in state.visited:
        fallback.update(
            int(v) for v in state.graph.adj[u] if v not in state.visited_set
        )
    return sorted(fallback)


def extend_state(state: ExplorationState, v: int) -> ExplorationState:
    """State with `v` appended: adds v's environment edges into the visited set."""
    n_old = state.subgraph.n
    new_edges = list(state.subgraph.edges)
    nbrs = state.graph.neighbor_set(v)
    for i, u in enumerate(state.visited):
        if u in nbrs:
            new_edges.append((i, n_old))
    return ExplorationState(
        state.graph, state.visited + (int(v),), Graph(n_old + 1, new_edges)
    )


def step(
    state: ExplorationState, v: int, reward_fn: RewardFn
) -> tuple[ExplorationState, float]:
    """Deterministic transition to the state including `v`; the reward is the
    functional evaluated on the newly induced subgraph."""
    if v not in candidate_actions(state):
        raise ValueError(f"node {v} is not a legal action in this state")
    new_state = extend_state(state, v)
    return new_state, float(reward_fn(new_state))


@dataclass(frozen=True)
class StepRecord:
    step: int  # |visited| after taking the action
    candidates: tuple[int, ...]
    chosen: int
    reward: float


@dataclass
class EpisodeTrace:
    start: int
    steps: list[StepRecord] = field(default_factory=list)
    terminal: bool = False

    @property
    def rewards(self) -> list[float]:
        return [s.reward for s in self.steps]

    @property
    def visited(self) -> list[int]:
        return [self.start] + [s.chosen for s in self.steps]

    def to_lines(self) -> list[str]:
        return [f"{s.step},{s.chosen},{s.reward:.12g}" for s in self.steps]


def run_episode(
    g: Graph,
    cfg: EpisodeConfig,
    agent,
    reward_fn: Optional[RewardFn] = None,
) -> EpisodeTrace:
    """Roll one episode of up to cfg.horizon visited nodes.

    The agent must implement choose(state, candidates, rng) -> node. The
    terminal flag is set when candidates run out before the horizon.
    """
    rng = np.random.default_rng([cfg.seed, 0x51])
    if reward_fn is None:
        reward_fn = reward_fn_for(cfg.reward)
    state = initial_state(g, cfg, rng)
    trace = EpisodeTrace(start=state.visited[0])
    while state.t < cfg.horizon:
        cands = candidate_actions(state)
        if not cands:
            trace.terminal = True
            break
        chosen = int(agent.choose(state, cands, rng))
        state, reward = step(state, chosen, reward_fn)
        trace.steps.append(StepRecord(state.t, tuple(cands), chosen, reward))
    return trace


def episode_return(trace: EpisodeTrace, gamma: float) -> float:
    return float(sum(r * gamma**i for i, r in enumerate(trace.rewards)))


def _random_tiebreak(values, candidates, rng, best_is_max=True):
    arr = np.asarray(values, dtype=np.float64)
    best = arr.max() if best_is_max else arr.min()
    ties = [c for c, v in zip(candidates, arr) if v == best]
    return ties[int(rng.integers(len(ties)))]


class RandomAgent:
    def choose(self, state, candidates, rng):
        return candidates[int(rng.integers(len(candidates)))]


class GreedyAgent:
    """Evaluates the reward on each candidate subgraph, takes the best
    one-step improvement; ties break uniformly under the episode rng."""

    def __init__(self, reward: str = "IGT", reward_fn: Optional[RewardFn] = None):
        self.reward_fn = reward_fn if reward_fn is not None else reward_fn_for(reward)

    def choose(self, state, candidates, rng):
        values = [self.reward_fn(extend_state(state, v)) for v in candidates]
        return _random_tiebreak(values, candidates, rng)


class DegreeAgent:
    """Picks by degree in the full environment (largest or smallest)."""

    def __init__(self, largest: bool):
        self.largest = largest

    def choose(self, state, candidates, rng):
        degs = [state.graph.degrees[v] for v in candidates]
        return _random_tiebreak(degs, candidates, rng, best_is_max=self.largest)


def baseline_agent(kind: str, reward: str = "IGT"):
    if kind == "random":
        return RandomAgent()
    if kind == "greedy":
        return GreedyAgent(reward=reward)
    if kind == "max_degree":
        return DegreeAgent(largest=True)
    if kind == "min_degree":
        return DegreeAgent(largest=False)
    raise ValueError(f"unknown baseline kind {kind!r}")
