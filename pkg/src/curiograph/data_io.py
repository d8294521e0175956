"""Edge-list and trajectory file ingestion, window extraction, and splits."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .graphs import Graph


@dataclass
class LoadedGraph:
    graph: Graph
    labels: list[str]  # labels[i] is the original token for node i
    self_loops_dropped: int
    duplicates_collapsed: int

    @property
    def index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}


def load_graph(path) -> LoadedGraph:
    """Read a "u v" edge list; '#' lines are ignored.

    Node tokens are remapped to contiguous integers in order of first
    appearance; the mapping is persisted next to the input as a two-column
    "<id> <token>" file. Duplicate edges collapse and self-loops are dropped,
    both counted in the result.
    """
    path = Path(path)
    labels: list[str] = []
    index: dict[str, int] = {}
    edges: set[tuple[int, int]] = set()
    self_loops = 0
    duplicates = 0

    def node_id(token: str) -> int:
        i = index.get(token)
        if i is None:
            i = len(labels)
            index[token] = i
            labels.append(token)
        return i

    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'u v', got {text!r}")
            u, v = node_id(parts[0]), node_id(parts[1])
            if u == v:
                self_loops += 1
                continue
            e = (u, v) if u < v else (v, u)
            if e in edges:
                duplicates += 1
            else:
                edges.add(e)
    g = Graph(len(labels), edges)
    mapping_path = path.with_name(path.name + ".ids")
    with open(mapping_path, "w", encoding="utf-8") as fh:
        for i, lab in enumerate(labels):
            fh.write(f"{i} {lab}\n")
    return LoadedGraph(g, labels, self_loops, duplicates)


def save_graph(g: Graph, path, header: Optional[str] = None) -> None:
    """Write the graph as one "u v" line per edge."""
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(f"# {header}\n")
        fh.write(f"# nodes {g.n}\n")
        for u, v in g.edges:
            fh.write(f"{u} {v}\n")


def load_graph_simple(path) -> Graph:
    """Edge list whose tokens are integer ids already; no remapping.

    Honors the "# nodes N" header written by save_graph so isolated trailing
    nodes survive the round trip.
    """
    path = Path(path)
    edges = []
    n = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if text.startswith("# nodes "):
                n = max(n, int(text.split()[-1]))
                continue
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'u v', got {text!r}")
            u, v = int(parts[0]), int(parts[1])
            edges.append((u, v))
            n = max(n, u + 1, v + 1)
    return Graph(n, edges)


class Window(NamedTuple):
    nodes: tuple[int, ...]
    trajectory: int  # index of the source trajectory


@dataclass
class Dataset:
    graph: Graph
    trajectories: list[tuple[int, ...]]
    name: str = ""
    source: str = ""
    labels: Optional[list[str]] = None


@dataclass
class Split:
    train: list[Window]
    test: list[Window]
    seed: int = 0
    fraction: float = 0.8


def load_trajectories(path, index: Optional[dict[str, int]] = None) -> list[tuple[int, ...]]:
    """One trajectory per line, space-separated node tokens.

    Tokens are looked up in `index` (from a loaded graph) when given,
    otherwise parsed as integers.
    """
    path = Path(path)
    out: list[tuple[int, ...]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                if index is None:
                    nodes = tuple(int(tok) for tok in text.split())
                else:
                    nodes = tuple(index[tok] for tok in text.split())
            except (ValueError, KeyError) as exc:
                raise ValueError(f"{path}:{lineno}: bad trajectory token ({exc})")
            out.append(nodes)
    return out


def save_trajectories(trajectories, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in trajectories:
            fh.write(" ".join(str(v) for v in t) + "\n")


def extract_windows(dataset: Dataset, n_burn_in: int) -> tuple[list[Window], int]:
    """Sliding windows of length n_burn_in + 1 whose consecutive nodes all
    share an edge; returns (windows, dropped count)."""
    if n_burn_in < 1:
        raise ValueError("n_burn_in must be >= 1")
    g = dataset.graph
    windows: list[Window] = []
    dropped = 0
    size = n_burn_in + 1
    for ti, traj in enumerate(dataset.trajectories):
        for node in traj:
            if not 0 <= node < g.n:
                raise ValueError(f"trajectory {ti} visits unknown node {node}")
        for s in range(0, len(traj) - size + 1):
            chunk = traj[s : s + size]
            if all(g.has_edge(chunk[i], chunk[i + 1]) for i in range(size - 1)):
                windows.append(Window(tuple(chunk), ti))
            else:
                dropped += 1
    return windows, dropped


def split_windows(windows: Sequence[Window], fraction: float, seed: int) -> Split:
    """Seeded trajectory-level split: windows from one trajectory never cross
    sides, preventing leakage between train and test."""
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must lie in (0, 1)")
    traj_ids = sorted({w.trajectory for w in windows})
    if len(traj_ids) == 1:
        warnings.warn("single trajectory: all windows assigned to the train side")
    rng = np.random.default_rng([seed, 0x5B])
    order = list(traj_ids)
    rng.shuffle(order)
    n_train = max(1, int(round(fraction * len(order)))) if order else 0
    train_ids = set(order[:n_train])
    train = [w for w in windows if w.trajectory in train_ids]
    test = [w for w in windows if w.trajectory not in train_ids]
    return Split(train, test, seed=seed, fraction=fraction)
