"""Random-walk compressibility: entropy, clustered information rates, and the
rate-distortion curve over description scales.

The compression reward of a subgraph is its compressibility C: the average
drop in the walk's information rate achievable by clustering nodes, taken
across every cluster count from all-singletons down to one cluster.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import Graph, connected_components, induced_subgraph, is_connected


@dataclass(frozen=True)
class WalkModel:
    """Stationary random walk on a connected graph.

    transition: row-stochastic matrix P with P[i, j] = A[i, j] / deg(i).
    stationary: pi with pi[i] = deg(i) / (2 * edge count).
    joint: pi[i] * P[i, j] (symmetric for undirected graphs).
    entropy: walk entropy H in bits.
    """

    transition: np.ndarray
    stationary: np.ndarray
    joint: np.ndarray
    entropy: float


@dataclass(frozen=True)
class Partition:
    """Cluster assignment per node; labels must be 0..n_clusters-1, all used."""

    assignment: np.ndarray
    n_clusters: int

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        arr = np.asarray(labels, dtype=np.int64)
        uniq = np.unique(arr)
        k = uniq.shape[0]
        if not np.array_equal(uniq, np.arange(k)):
            relabel = {int(u): i for i, u in enumerate(uniq)}
            arr = np.array([relabel[int(x)] for x in arr], dtype=np.int64)
        return cls(arr, k)

    def __post_init__(self):
        arr = self.assignment
        if arr.ndim != 1 or arr.shape[0] < 1:
            raise ValueError("assignment must be a nonempty 1-d array")
        if self.n_clusters < 1 or self.n_clusters > arr.shape[0]:
            raise ValueError("cluster count out of range")
        counts = np.bincount(arr, minlength=self.n_clusters)
        if counts.shape[0] != self.n_clusters or (counts == 0).any():
            raise ValueError("every cluster label 0..n-1 must be used")


@dataclass(frozen=True)
class RateDistortionCurve:
    """Best information rate found at each cluster count n = t .. 1.

    scales[i] = 1 - (n_i - 1) / t. Rates carry a running minimum so the
    curve is non-increasing as clusters coarsen; rates[0] equals the walk
    entropy and rates[-1] is 0.
    """

    cluster_counts: np.ndarray
    scales: np.ndarray
    rates: np.ndarray
    entropy: float


def _plogp_sum(x: np.ndarray) -> float:
    """Sum of x*log2(x) with the 0*log(0)=0 convention."""
    pos = x[x > 0]
    return float(np.sum(pos * np.log2(pos)))


def walk_model(g: Graph) -> WalkModel:
    if g.n < 2:
        raise ValueError("walk model needs at least 2 nodes")
    if (g.degrees == 0).any():
        raise ValueError("walk model undefined with isolated nodes")
    if not is_connected(g):
        raise ValueError("walk model needs a connected graph")
    a = g.adjacency_matrix()
    deg = g.degrees.astype(np.float64)
    p = a / deg[:, None]
    pi = deg / (2.0 * g.num_edges)
    joint = a / (2.0 * g.num_edges)
    entropy = _plogp_sum(pi) - _plogp_sum(joint)
    return WalkModel(p, pi, joint, entropy)


def _aggregate(w: WalkModel, assignment: np.ndarray, k: int):
    n = assignment.shape[0]
    one_hot = np.zeros((n, k), dtype=np.float64)
    one_hot[np.arange(n), assignment] = 1.0
    j = one_hot.T @ w.joint @ one_hot
    pi = one_hot.T @ w.stationary
    return j, pi


def clustered_rate(w: WalkModel, partition) -> float:
    """Entropy rate (bits/step) of the cluster-aggregated Markov chain.

    rate = -sum_ab Pi_a P'_ab log2 P'_ab with Pi_a the clustered stationary
    mass and P'_ab the stationarity-weighted aggregate transition. Equals the
    walk entropy for the singleton partition and 0 for one cluster.
    """
    if not isinstance(partition, Partition):
        partition = Partition.from_labels(partition)
    if partition.assignment.shape[0] != w.stationary.shape[0]:
        raise ValueError("partition size does not match walk model")
    j, pi = _aggregate(w, partition.assignment, partition.n_clusters)
    return max(_plogp_sum(pi) - _plogp_sum(j), 0.0)


def rate_distortion_curve(w: WalkModel) -> RateDistortionCurve:
    """Greedy agglomerative rate curve from singleton clusters down to one.

    At each cluster count the merge lowering the aggregated rate most is
    taken, among cluster pairs joined by at least one edge (all pairs if no
    such pair exists). The recorded curve is the running minimum of the
    rates seen, so it is non-increasing as the description coarsens.
    """
    t = w.stationary.shape[0]
    j = w.joint.copy()
    pi = w.stationary.copy()
    raw = np.empty(t, dtype=np.float64)  # raw[i] = greedy rate at n = t - i
    raw[0] = max(_plogp_sum(pi) - _plogp_sum(j), 0.0)
    for level in range(1, t):
        k = j.shape[0]
        adjacent = np.triu(j, k=1) > 0
        a_idx, b_idx = np.nonzero(adjacent)
        if a_idx.shape[0] == 0:  # disconnected aggregate: consider all pairs
            a_idx, b_idx = np.triu_indices(k, k=1)
        new_rates = _merged_rates(j, pi, a_idx, b_idx)
        best = int(np.argmin(new_rates))
        a, b = int(a_idx[best]), int(b_idx[best])
        j, pi = _apply_merge(j, pi, a, b)
        raw[level] = max(_plogp_sum(pi) - _plogp_sum(j), 0.0)
    rates = np.minimum.accumulate(raw)
    counts = np.arange(t, 0, -1)
    scales = 1.0 - (counts - 1) / t
    return RateDistortionCurve(counts, scales, rates, raw[0])


def _e(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    np.log2(x, out=out, where=x > 0)
    out *= x
    return out


def _merged_rates(j, pi, a_idx, b_idx) -> np.ndarray:
    """Aggregated rate after merging each candidate cluster pair (vectorized).

    Exploits symmetry of the joint matrix: only the rows/columns of the two
    merged clusters change, so each pair costs O(k) instead of O(k^2).
    """
    base = _plogp_sum(pi) - _plogp_sum(j)
    row_e = _e(j).sum(axis=1)
    r = np.arange(a_idx.shape[0])
    ra, rb = j[a_idx], j[b_idx]
    jaa = j[a_idx, a_idx]
    jbb = j[b_idx, b_idx]
    jab = j[a_idx, b_idx]
    em = _e(ra + rb)
    new_off = em.sum(axis=1) - em[r, a_idx] - em[r, b_idx]
    new_cells = 2.0 * new_off + _e(jaa + 2.0 * jab + jbb)
    old_cells = 2.0 * (row_e[a_idx] + row_e[b_idx]) - (
        _e(jaa) + _e(jbb) + 2.0 * _e(jab)
    )
    d_pi = _e(pi[a_idx] + pi[b_idx]) - _e(pi[a_idx]) - _e(pi[b_idx])
    return base + d_pi - (new_cells - old_cells)


def _apply_merge(j, pi, a, b):
    keep = np.ones(j.shape[0], dtype=bool)
    keep[b] = False
    j[a, :] += j[b, :]
    j[:, a] += j[:, b]
    j = j[np.ix_(keep, keep)]
    pi = pi.copy()
    pi[a] += pi[b]
    return j, pi[keep]


def compressibility(g: Graph) -> float:
    """Average reduction of the walk's information rate across all scales.

    C = H - (1/t) * sum of the rate curve over cluster counts t .. 1;
    always within [0, H].
    """
    w = walk_model(g)
    curve = rate_distortion_curve(w)
    return w.entropy - float(curve.rates.mean())


def component_weighted_compressibility(g: Graph) -> float:
    """Compressibility extended to disconnected graphs.

    Each connected component with at least one edge contributes its own
    compressibility weighted by its share of the edges; isolated nodes are
    ignored. An edgeless graph scores 0.
    """
    if g.num_edges == 0:
        return 0.0
    if is_connected(g) and g.n >= 2:
        return compressibility(g)
    total = 0.0
    for comp in connected_components(g):
        if len(comp) < 2:
            continue
        sub, _ = induced_subgraph(g, comp)
        total += (sub.num_edges / g.num_edges) * compressibility(sub)
    return total


def reward_cpt(state) -> float:
    """Compression reward: compressibility of the state's visited subgraph.

    Degenerate states (single node, edgeless or disconnected subgraphs) fall
    back to the component-weighted convention so the reward is total.
    """
    sub = state.subgraph
    if sub.n < 2 or sub.num_edges == 0:
        return 0.0
    return component_weighted_compressibility(sub)
