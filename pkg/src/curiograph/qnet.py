"""GraphSAGE-style Q-network over candidate subgraphs, in plain numpy.

Inputs are local degree profiles of the candidate subgraph; L rounds of
mean-aggregation message passing produce node embeddings; the readout
concatenates the subgraph mean embedding with the candidate node's embedding
and maps it through a two-layer MLP to a scalar Q-value. Reverse-mode
gradients are implemented by hand so training has no framework dependency
and gradient checks stay strict at 64-bit precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .graphs import Graph, ldp_features
from .mdp import ExplorationState, candidate_actions, extend_state

IN_DIM = 5  # local degree profile width

CHECKPOINT_VERSION = 1


# Degree-profile entries reach O(10); this fixed input scaling keeps first
# layer pre-activations near unit size, which trains noticeably more stably.
FEATURE_SCALE = 0.1


@dataclass
class QNetworkParams:
    n_layers: int
    hidden: int
    in_dim: int
    arrays: dict[str, np.ndarray]
    feature_scale: float = FEATURE_SCALE

    def copy(self) -> "QNetworkParams":
        return QNetworkParams(
            self.n_layers,
            self.hidden,
            self.in_dim,
            {k: v.copy() for k, v in self.arrays.items()},
            self.feature_scale,
        )

    def zeros_like(self) -> dict[str, np.ndarray]:
        return {k: np.zeros_like(v) for k, v in self.arrays.items()}

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QNetworkParams)
            and (self.n_layers, self.hidden, self.in_dim, self.feature_scale)
            == (other.n_layers, other.hidden, other.in_dim, other.feature_scale)
            and self.arrays.keys() == other.arrays.keys()
            and all(np.array_equal(v, other.arrays[k]) for k, v in self.arrays.items())
        )


def init_params(
    n_layers: int, hidden: int, seed: int, in_dim: int = IN_DIM
) -> QNetworkParams:
    """Seeded Glorot-uniform initialization; biases start at zero."""
    if n_layers < 1 or hidden < 1:
        raise ValueError("need n_layers >= 1 and hidden >= 1")
    rng = np.random.default_rng([seed, 0x9E])

    def glorot(rows, cols):
        bound = np.sqrt(6.0 / (rows + cols))
        return rng.uniform(-bound, bound, size=(rows, cols))

    arrays: dict[str, np.ndarray] = {}
    fan_in = in_dim
    for layer in range(n_layers):
        arrays[f"layer{layer}.comb"] = glorot(hidden, fan_in)
        arrays[f"layer{layer}.agg"] = glorot(hidden, fan_in)
        arrays[f"layer{layer}.bias"] = np.zeros(hidden)
        fan_in = hidden
    arrays["readout.w1"] = glorot(hidden, 2 * hidden)
    arrays["readout.b1"] = np.zeros(hidden)
    arrays["readout.w2"] = glorot(1, hidden)[0]
    arrays["readout.b2"] = np.zeros(())
    return QNetworkParams(n_layers, hidden, in_dim, arrays)


class SubgraphEncoding:
    """Precomputed forward-pass ingredients for one subgraph."""

    __slots__ = ("features", "src", "dst", "inv_deg", "n")

    def __init__(self, sub: Graph):
        self.n = sub.n
        self.features = ldp_features(sub)
        src, dst = [], []
        for u, v in sub.edges:
            src.extend((u, v))
            dst.extend((v, u))
        self.src = np.array(src, dtype=np.int64)
        self.dst = np.array(dst, dtype=np.int64)
        deg = sub.degrees.astype(np.float64)
        self.inv_deg = np.where(deg > 0, 1.0 / np.maximum(deg, 1.0), 0.0)

    def neighbor_mean(self, h: np.ndarray) -> np.ndarray:
        out = np.zeros_like(h)
        np.add.at(out, self.dst, h[self.src])
        out *= self.inv_deg[:, None]
        return out

    def neighbor_mean_t(self, v: np.ndarray) -> np.ndarray:
        # adjoint of neighbor_mean: A @ (D^-1 v) for symmetric adjacency A
        t = v * self.inv_deg[:, None]
        out = np.zeros_like(v)
        np.add.at(out, self.dst, t[self.src])
        return out


@dataclass
class CandidateBatch:
    """Per-candidate assembled subgraphs: the visited set plus one neighbor.

    Each subgraph keeps the visited nodes first and the candidate last, so
    the candidate's embedding index is always n-1.
    """

    base_visited: tuple[int, ...]
    candidates: tuple[int, ...]
    subgraphs: list[Graph]


def build_candidate_batch(
    state: ExplorationState, candidates: Optional[Sequence[int]] = None
) -> CandidateBatch:
    if candidates is None:
        candidates = candidate_actions(state)
    if len(candidates) == 0:
        raise ValueError("candidate batch needs at least one candidate")
    subs = [extend_state(state, v).subgraph for v in candidates]
    return CandidateBatch(state.visited, tuple(int(v) for v in candidates), subs)


def sage_forward(sub: Graph, params: QNetworkParams) -> np.ndarray:
    """Node embeddings after all message-passing rounds (no readout)."""
    emb, _ = _embed(SubgraphEncoding(sub), params, want_cache=False)
    return emb


def _embed(enc: SubgraphEncoding, params: QNetworkParams, want_cache: bool):
    h = enc.features * params.feature_scale
    cache = [] if want_cache else None
    for layer in range(params.n_layers):
        agg = enc.neighbor_mean(h)
        z = (
            h @ params.arrays[f"layer{layer}.comb"].T
            + agg @ params.arrays[f"layer{layer}.agg"].T
            + params.arrays[f"layer{layer}.bias"]
        )
        if want_cache:
            cache.append((h, agg, z))
        h = np.maximum(z, 0.0)
    return h, cache


def _readout(emb: np.ndarray, cand_idx: int, params: QNetworkParams, want_cache: bool):
    pooled = emb.mean(axis=0)
    z0 = np.concatenate([pooled, emb[cand_idx]])
    z1 = params.arrays["readout.w1"] @ z0 + params.arrays["readout.b1"]
    h1 = np.maximum(z1, 0.0)
    q = float(params.arrays["readout.w2"] @ h1 + params.arrays["readout.b2"])
    if want_cache:
        return q, (z0, z1, h1)
    return q, None


def q_value_subgraph(
    enc: SubgraphEncoding,
    cand_idx: int,
    params: QNetworkParams,
    want_cache: bool = False,
):
    emb, layer_cache = _embed(enc, params, want_cache)
    q, readout_cache = _readout(emb, cand_idx, params, want_cache)
    if want_cache:
        return q, (enc, cand_idx, emb, layer_cache, readout_cache)
    return q, None


def q_values(batch: CandidateBatch, params: QNetworkParams) -> np.ndarray:
    """Independent scalar Q-value per candidate subgraph."""
    out = np.empty(len(batch.candidates))
    for i, sub in enumerate(batch.subgraphs):
        out[i], _ = q_value_subgraph(SubgraphEncoding(sub), sub.n - 1, params)
    return out


def q_values_enc(
    encodings: Sequence[SubgraphEncoding], params: QNetworkParams
) -> np.ndarray:
    """Q-values for pre-encoded candidate subgraphs (candidate node last)."""
    out = np.empty(len(encodings))
    for i, enc in enumerate(encodings):
        out[i], _ = q_value_subgraph(enc, enc.n - 1, params)
    return out


def q_values_for(
    g: Graph,
    visited: Sequence[int],
    candidates: Sequence[int],
    params: QNetworkParams,
) -> np.ndarray:
    """Q-values for candidates of an arbitrary visited set on graph `g`."""
    state = ExplorationState.from_visited(g, visited)
    return q_values(build_candidate_batch(state, candidates), params)


def backward_subgraph(cache, dq: float, grads: dict[str, np.ndarray], params) -> None:
    """Accumulate d(dq * Q)/dparams into `grads` for one forward cache."""
    enc, cand_idx, emb, layer_cache, (z0, z1, h1) = cache
    hid = params.hidden
    grads["readout.b2"] += dq
    grads["readout.w2"] += dq * h1
    dh1 = dq * params.arrays["readout.w2"]
    dz1 = dh1 * (z1 > 0)
    grads["readout.w1"] += np.outer(dz1, z0)
    grads["readout.b1"] += dz1
    dz0 = params.arrays["readout.w1"].T @ dz1
    dh = np.tile(dz0[:hid] / enc.n, (enc.n, 1))
    dh[cand_idx] += dz0[hid:]
    for layer in range(params.n_layers - 1, -1, -1):
        h_in, agg, z = layer_cache[layer]
        dz = dh * (z > 0)
        grads[f"layer{layer}.comb"] += dz.T @ h_in
        grads[f"layer{layer}.agg"] += dz.T @ agg
        grads[f"layer{layer}.bias"] += dz.sum(axis=0)
        if layer > 0:
            dh = dz @ params.arrays[f"layer{layer}.comb"]
            dh += enc.neighbor_mean_t(dz @ params.arrays[f"layer{layer}.agg"])


def grad(
    batch: CandidateBatch, params: QNetworkParams, dq: np.ndarray
) -> dict[str, np.ndarray]:
    """Exact reverse-mode gradients of sum_i dq[i] * Q_i w.r.t. every parameter."""
    if len(dq) != len(batch.candidates):
        raise ValueError("dq must align with the candidate list")
    grads = params.zeros_like()
    for i, sub in enumerate(batch.subgraphs):
        if dq[i] == 0.0:
            continue
        _, cache = q_value_subgraph(SubgraphEncoding(sub), sub.n - 1, params, True)
        backward_subgraph(cache, float(dq[i]), grads, params)
    return grads


class QPolicyAgent:
    """Greedy-by-Q agent; with epsilon > 0 it explores uniformly at random."""

    def __init__(self, params: QNetworkParams, epsilon: float = 0.0):
        self.params = params
        self.epsilon = epsilon

    def choose(self, state, candidates, rng):
        if self.epsilon > 0.0 and rng.random() < self.epsilon:
            return candidates[int(rng.integers(len(candidates)))]
        values = q_values(build_candidate_batch(state, candidates), self.params)
        return candidates[int(np.argmax(values))]


def save_params(params: QNetworkParams, path) -> None:
    """Versioned npz checkpoint; round-trips bit-exactly."""
    np.savez(
        path,
        checkpoint_version=np.array(CHECKPOINT_VERSION),
        meta=np.array([params.n_layers, params.hidden, params.in_dim]),
        feature_scale=np.array(params.feature_scale),
        **params.arrays,
    )


def load_params(path) -> QNetworkParams:
    with np.load(path) as data:
        version = int(data["checkpoint_version"])
        if version != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        n_layers, hidden, in_dim = (int(x) for x in data["meta"])
        feature_scale = float(data["feature_scale"])
        arrays = {
            k: data[k].copy()
            for k in data.files
            if k not in ("checkpoint_version", "meta", "feature_scale")
        }
    return QNetworkParams(n_layers, hidden, in_dim, arrays, feature_scale)
