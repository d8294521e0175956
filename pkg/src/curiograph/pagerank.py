"""Personalized PageRank, curiosity-biased walker PageRank, score
combination, next-node rank evaluation, parameter fitting, and walker
diffusion measurement.

The biased score vector is the long-run visit frequency of a non-Markovian
walker: between teleports it never revisits its path and picks candidates by
the rank of their Q-values under a trained exploration network. Because no
eigenproblem exists for that process, the scores are Monte Carlo estimates
with a block-frequency convergence test.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from . import qnet
from .graphs import Graph, bfs_distances
from .mdp import ExplorationState, candidate_actions

REWARD_CODES = {"PR": 0, "IGT": 1, "CPT": 2}


class _BufferedUniform:
    """Uniform(0,1) draws fetched in blocks; one generator call per 8192 draws."""

    def __init__(self, rng, block: int = 8192):
        self._rng = rng
        self._block = block
        self._buf = rng.random(block).tolist()
        self._i = 0

    def __call__(self) -> float:
        if self._i >= len(self._buf):
            self._buf = self._rng.random(self._block).tolist()
            self._i = 0
        x = self._buf[self._i]
        self._i += 1
        return x


@dataclass(frozen=True)
class PageRankSetup:
    """Damping, teleport vector, walker greediness, and combination weights.

    weights = (w_pr, w_igt, w_cpt) must sit on the unit sphere. The Monte
    Carlo controls govern biased-score estimation: visit frequencies are
    compared every mc_block_steps and declared converged when consecutive
    cumulative estimates differ by less than mc_tol in L1.
    """

    alpha: float = 0.85
    personalization: Optional[np.ndarray] = None  # None: uniform
    greediness: float = 0.5
    weights: tuple[float, float, float] = (1.0, 0.0, 0.0)
    n_burn_in: int = 5
    mc_block_steps: int = 100_000
    mc_tol: float = 1e-3
    mc_max_steps: int = 20_000_000
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError("alpha must lie in [0, 1)")
        if not 0.0 < self.greediness <= 1.0:
            raise ValueError("greediness must lie in (0, 1]")
        w = self.weights
        if abs(w[0] ** 2 + w[1] ** 2 + w[2] ** 2 - 1.0) > 1e-9:
            raise ValueError("weights must have unit square norm")
        if self.personalization is not None:
            q = np.asarray(self.personalization, dtype=np.float64)
            if (q < 0).any() or abs(q.sum() - 1.0) > 1e-12:
                raise ValueError("personalization must be a probability vector")


def uniform_teleport(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def burn_in_teleport(n: int, recent_nodes: Sequence[int]) -> np.ndarray:
    """Teleport mass spread uniformly over the recently visited nodes."""
    q = np.zeros(n)
    q[list(recent_nodes)] = 1.0 / len(recent_nodes)
    return q


def pagerank(
    g: Graph,
    alpha: float,
    q: Optional[np.ndarray] = None,
    tol: float = 1e-10,
    max_iter: int = 100_000,
) -> np.ndarray:
    """Stationary scores by power iteration: eta = alpha P^T eta + (1-alpha) q.

    Dangling (isolated) nodes teleport according to q. Iteration stops when
    the L1 change drops below `tol`; exceeding `max_iter` raises.
    """
    if g.n == 0:
        raise ValueError("empty graph")
    q = uniform_teleport(g.n) if q is None else np.asarray(q, dtype=np.float64)
    deg = g.degrees.astype(np.float64)
    dangling = deg == 0
    p = g.adjacency_matrix()
    p[~dangling] /= deg[~dangling, None]
    pt = p.T.copy()
    eta = q.copy()
    for _ in range(max_iter):
        nxt = alpha * (pt @ eta + float(eta[dangling].sum()) * q) + (1.0 - alpha) * q
        delta = float(np.abs(nxt - eta).sum())
        eta = nxt
        if delta < tol:
            return eta / eta.sum()
    raise RuntimeError(f"pagerank failed to converge: last L1 change {delta:.3e}")


def pagerank_residual(g: Graph, eta: np.ndarray, alpha: float, q: np.ndarray) -> float:
    """Max-norm residual of the stationarity equation (I - alpha P^T) eta = (1-alpha) q."""
    deg = g.degrees.astype(np.float64)
    dangling = deg == 0
    p = g.adjacency_matrix()
    p[~dangling] /= deg[~dangling, None]
    p[dangling] = q
    lhs = eta - alpha * (p.T @ eta)
    return float(np.abs(lhs - (1.0 - alpha) * q).max())


def biased_transition_probs(
    candidates: Sequence[int], q_values: np.ndarray, greediness: float
) -> np.ndarray:
    """Rank-geometric candidate probabilities, aligned with `candidates`.

    Candidates are ranked by descending Q-value (ties by node id) and
    candidate at rank r gets (1-p) p^(r-1) / (1 - p^m). The vector is nudged
    so it sums to 1.0 exactly. greediness = 1 degenerates to uniform.
    """
    m = len(candidates)
    if m == 0:
        raise ValueError("no candidates: teleport required")
    p = float(greediness)
    if p >= 1.0:
        probs = np.full(m, 1.0 / m)
    else:
        order = np.lexsort((np.asarray(candidates), -np.asarray(q_values)))
        ranks = np.empty(m, dtype=np.int64)
        ranks[order] = np.arange(m)
        probs = (1.0 - p) * p ** ranks.astype(np.float64) / (1.0 - p**m)
    # Nudge toward an exact float sum of 1.0; rotating the adjusted entry
    # sidesteps oscillation in numpy's pairwise summation.
    probs /= probs.sum()
    order = np.argsort(probs)[::-1]
    for attempt in range(8 * m):
        total = probs.sum()
        if total == 1.0:
            break
        probs[order[attempt % m]] += 1.0 - total
    return probs


class BiasedWalkSampler:
    """Caches per-(path set, current node) transition tables for the biased walker.

    The candidate distribution depends only on the path's node set and the
    walker's position, so cached tables are shared across teleport restarts,
    personalization vectors, and damping values.
    """

    def __init__(self, g: Graph, params: qnet.QNetworkParams, greediness: float):
        self.g = g
        self.params = params
        self.greediness = greediness
        self._table: dict = {}

    def transition(self, path_set: frozenset, current: int):
        key = (path_set, current)
        hit = self._table.get(key)
        if hit is not None:
            return hit
        visited = sorted(path_set - {current}) + [current]
        state = ExplorationState.from_visited(self.g, visited)
        cands = candidate_actions(state)
        if not cands:
            entry = (None, None)
        else:
            values = qnet.q_values(
                qnet.build_candidate_batch(state, cands), self.params
            )
            probs = biased_transition_probs(cands, values, self.greediness)
            entry = (cands, np.cumsum(probs).tolist())
        self._table[key] = entry
        return entry


def biased_pagerank(
    g: Graph,
    qnet_params: qnet.QNetworkParams,
    reward_kind: str,
    setup: PageRankSetup,
    sampler: Optional[BiasedWalkSampler] = None,
    rng=None,
) -> np.ndarray:
    """Monte Carlo visit frequencies of the curiosity-biased walker.

    With probability 1-alpha the walker teleports per the personalization
    vector and forgets its path; otherwise it moves to a not-yet-visited
    neighbor with rank-geometric probabilities driven by the Q-network. A
    walker with no legal move teleports. Returns cumulative visit
    frequencies once consecutive block estimates agree to mc_tol in L1;
    hitting mc_max_steps first raises with the last distance.
    """
    if rng is None:
        rng = np.random.default_rng(
            [setup.seed, 0xB1A5, REWARD_CODES.get(reward_kind, 9)]
        )
    if sampler is None:
        sampler = BiasedWalkSampler(g, qnet_params, setup.greediness)
    q = (
        uniform_teleport(g.n)
        if setup.personalization is None
        else np.asarray(setup.personalization, dtype=np.float64)
    )
    cum_q = np.cumsum(q).tolist()
    counts = np.zeros(g.n)
    uniform = _BufferedUniform(rng)
    alpha = setup.alpha

    def teleport() -> int:
        return bisect_right(cum_q, uniform())

    current = teleport()
    path_set = frozenset((current,))
    counts[current] += 1.0
    prev_freq = None
    steps = 1
    last_dist = math.inf
    while steps < setup.mc_max_steps:
        moved = False
        if uniform() < alpha:
            cands, cum = sampler.transition(path_set, current)
            if cands is not None:
                current = cands[bisect_right(cum, uniform())]
                path_set = path_set | {current}
                moved = True
        if not moved:
            current = teleport()
            path_set = frozenset((current,))
        counts[current] += 1.0
        steps += 1
        if steps % setup.mc_block_steps == 0:
            freq = counts / steps
            if prev_freq is not None:
                last_dist = float(np.abs(freq - prev_freq).sum())
                if last_dist < setup.mc_tol:
                    return freq
            prev_freq = freq
    raise RuntimeError(
        f"biased pagerank did not converge in {setup.mc_max_steps} steps "
        f"(last block L1 distance {last_dist:.3e})"
    )


def combine_scores(
    eta_pr: np.ndarray,
    eta_igt: Optional[np.ndarray],
    eta_cpt: Optional[np.ndarray],
    weights: tuple[float, float, float],
) -> np.ndarray:
    """Linear combination of score vectors, renormalized onto the simplex."""
    w_pr, w_igt, w_cpt = weights
    if abs(w_pr**2 + w_igt**2 + w_cpt**2 - 1.0) > 1e-9:
        raise ValueError("weights must have unit square norm")
    combo = w_pr * eta_pr
    if w_igt != 0.0:
        if eta_igt is None:
            raise ValueError("igt weight set but no igt scores given")
        combo = combo + w_igt * eta_igt
    if w_cpt != 0.0:
        if eta_cpt is None:
            raise ValueError("cpt weight set but no cpt scores given")
        combo = combo + w_cpt * eta_cpt
    combo = np.clip(combo, 0.0, None)
    total = combo.sum()
    if total <= 0.0:
        raise ValueError("combined scores vanish; cannot renormalize")
    return combo / total


def window_candidates(g: Graph, window: Sequence[int]) -> tuple[list[int], bool]:
    """Ranking population for a trajectory window: unvisited neighbors of the
    last burn-in node. The flag is False when the true next node is absent."""
    *burn_in, target = window
    last = burn_in[-1]
    visited = set(burn_in)
    cands = sorted(int(v) for v in g.adj[last] if int(v) not in visited)
    return cands, int(target) in cands


def rank_percentile(
    scores: np.ndarray, window: Sequence[int], g: Graph
) -> Optional[float]:
    """Mid-rank percentile of the true next node among the candidates.

    Percentile = (rank - 0.5) / m * 100 with ascending mid-ranks, so equal
    scores share the mean rank. Returns None for excluded windows (target
    not reachable from the window's last node).
    """
    cands, ok = window_candidates(g, window)
    if not ok:
        return None
    target = int(window[-1])
    vals = scores[cands]
    tval = scores[target]
    less = int(np.sum(vals < tval))
    equal = int(np.sum(vals == tval))
    midrank = less + (equal + 1) / 2.0
    return (midrank - 0.5) / len(cands) * 100.0


@dataclass
class FittedPageRank:
    alpha: float
    weights: tuple[float, float, float]
    objective: float
    windows_used: int
    windows_excluded: int


class _ScoreCache:
    """Per-(window, alpha) score vectors; biased vectors also key on reward kind."""

    def __init__(self, g: Graph, models: dict, setup: PageRankSetup):
        self.g = g
        self.setup = setup
        self.samplers = {
            kind: BiasedWalkSampler(g, params, setup.greediness)
            for kind, params in models.items()
        }
        self._pr: dict = {}
        self._biased: dict = {}

    def pr(self, wi: int, q: np.ndarray, alpha: float) -> np.ndarray:
        key = (wi, alpha)
        if key not in self._pr:
            self._pr[key] = pagerank(self.g, alpha, q)
        return self._pr[key]

    def biased(self, wi: int, q: np.ndarray, alpha: float, kind: str) -> np.ndarray:
        key = (wi, alpha, kind)
        if key not in self._biased:
            rng = np.random.default_rng(
                [
                    self.setup.seed,
                    wi,
                    np.float64(alpha).view(np.uint64),
                    REWARD_CODES[kind],
                ]
            )
            run = replace(self.setup, alpha=alpha, personalization=q)
            self._biased[key] = biased_pagerank(
                self.g, None, kind, run, sampler=self.samplers[kind], rng=rng
            )
        return self._biased[key]


def _window_teleports(g: Graph, windows) -> list[np.ndarray]:
    return [burn_in_teleport(g.n, w[:-1]) for w in windows]


def _objective(
    cache: _ScoreCache,
    windows,
    teleports,
    included,
    alpha: float,
    weights: tuple[float, float, float],
    kinds: tuple[str, ...],
) -> float:
    total = 0.0
    for wi in included:
        eta_pr = cache.pr(wi, teleports[wi], alpha)
        eta_igt = (
            cache.biased(wi, teleports[wi], alpha, "IGT") if weights[1] != 0.0 else None
        )
        eta_cpt = (
            cache.biased(wi, teleports[wi], alpha, "CPT") if weights[2] != 0.0 else None
        )
        combo = combine_scores(eta_pr, eta_igt, eta_cpt, weights)
        total += rank_percentile(combo, windows[wi], cache.g)
    return total


def _sphere_weights(rng, use_igt: bool, use_cpt: bool) -> tuple[float, float, float]:
    raw = np.abs(rng.normal(size=3))
    raw[1] *= 1.0 if use_igt else 0.0
    raw[2] *= 1.0 if use_cpt else 0.0
    norm = float(np.sqrt((raw**2).sum()))
    if norm == 0.0:
        return (1.0, 0.0, 0.0)
    w = raw / norm
    return (float(w[0]), float(w[1]), float(w[2]))


def fit_parameters(
    train_windows,
    g: Graph,
    models: dict,
    setup: PageRankSetup,
    budget: int = 24,
    n_alphas: int = 4,
    seed: int = 0,
) -> tuple[FittedPageRank, FittedPageRank, _ScoreCache]:
    """Maximize the summed rank objective on the training windows.

    Searches alpha alone for the unbiased setup and (alpha, weights) jointly
    for the biased one, by seeded random search with local refinement.
    `models` maps reward kinds ("IGT"/"CPT") to trained network parameters;
    absent kinds keep their weight pinned at 0. Alphas are drawn from a small
    pool so biased Monte Carlo score vectors can be reused across the search.
    Returns (fitted unbiased, fitted biased, score cache).
    """
    if len(train_windows) == 0:
        raise ValueError("need at least one training window")
    rng = np.random.default_rng([seed, 0xF17])
    cache = _ScoreCache(g, models, setup)
    teleports = _window_teleports(g, train_windows)
    included = [
        wi for wi, w in enumerate(train_windows) if window_candidates(g, w)[1]
    ]
    excluded = len(train_windows) - len(included)
    if not included:
        raise ValueError("every training window is excluded (targets unreachable)")
    kinds = tuple(models.keys())
    use_igt, use_cpt = "IGT" in models, "CPT" in models

    alphas = [float(a) for a in rng.uniform(0.05, 0.95, size=max(1, n_alphas))]

    # Unbiased: alpha-only search over the pool plus refinement around the best.
    pure = (1.0, 0.0, 0.0)
    scored = [
        (_objective(cache, train_windows, teleports, included, a, pure, kinds), a)
        for a in alphas
    ]
    best_obj, best_alpha = max(scored)
    for _ in range(max(0, budget - len(alphas))):
        a = float(np.clip(best_alpha + rng.normal() * 0.1, 0.01, 0.99))
        obj = _objective(cache, train_windows, teleports, included, a, pure, kinds)
        if obj > best_obj:
            best_obj, best_alpha = obj, a
    fitted = FittedPageRank(best_alpha, pure, best_obj, len(included), excluded)

    # Biased: joint (alpha, weights) search; alphas reuse the cached pool.
    best_b = (best_obj, best_alpha, pure)  # the degenerate point is always legal
    trials = max(1, budget)
    per_alpha = max(1, trials // len(alphas))
    for a in alphas:
        for _ in range(per_alpha):
            w = _sphere_weights(rng, use_igt, use_cpt)
            obj = _objective(cache, train_windows, teleports, included, a, w, kinds)
            if obj > best_b[0]:
                best_b = (obj, a, w)
    # Local refinement of the weights at the winning alpha.
    for _ in range(max(0, trials // 2)):
        w0 = np.array(best_b[2])
        w = w0 + rng.normal(size=3) * 0.15
        w[1] *= 1.0 if use_igt else 0.0
        w[2] *= 1.0 if use_cpt else 0.0
        w = np.abs(w)
        norm = float(np.sqrt((w**2).sum()))
        if norm == 0.0:
            continue
        w = tuple(float(x) for x in (w / norm))
        obj = _objective(cache, train_windows, teleports, included, best_b[1], w, kinds)
        if obj > best_b[0]:
            best_b = (obj, best_b[1], w)
    fitted_bias = FittedPageRank(
        best_b[1], best_b[2], best_b[0], len(included), excluded
    )
    return fitted, fitted_bias, cache


def improvement_ratio(
    test_windows,
    g: Graph,
    models: dict,
    fitted: FittedPageRank,
    fitted_bias: FittedPageRank,
    setup: PageRankSetup,
    cache: Optional[_ScoreCache] = None,
) -> float:
    """Summed test rank under the biased scores over the unbiased ones.

    Both sums run over the same included windows, so degenerate bias weights
    (1, 0, 0) at the same alpha give exactly 1.0.
    """
    if len(test_windows) == 0:
        raise ValueError("need at least one test window")
    cache = _ScoreCache(g, models, setup) if cache is None else cache
    # Test windows get fresh cache keys after any training fit.
    offset = 1_000_000
    teleports = _window_teleports(g, test_windows)
    num = 0.0
    den = 0.0
    used = 0
    for wi, w in enumerate(test_windows):
        cands, ok = window_candidates(g, w)
        if not ok:
            continue
        q = teleports[wi]
        eta_pr_b = cache.pr(offset + wi, q, fitted_bias.alpha)
        eta_igt = (
            cache.biased(offset + wi, q, fitted_bias.alpha, "IGT")
            if fitted_bias.weights[1] != 0.0
            else None
        )
        eta_cpt = (
            cache.biased(offset + wi, q, fitted_bias.alpha, "CPT")
            if fitted_bias.weights[2] != 0.0
            else None
        )
        combo = combine_scores(eta_pr_b, eta_igt, eta_cpt, fitted_bias.weights)
        num += rank_percentile(combo, w, g)
        eta_pr = cache.pr(offset + wi, q, fitted.alpha)
        den += rank_percentile(eta_pr, w, g)
        used += 1
    if used == 0:
        raise ValueError("every test window is excluded (targets unreachable)")
    return num / den


def walker_diffusion(
    g: Graph,
    walker_kind: str,
    horizon: int,
    trials: int,
    params: Optional[qnet.QNetworkParams] = None,
    greediness: float = 0.5,
    seed: int = 0,
) -> np.ndarray:
    """Mean hop distance from the start node at each step, over seeded trials.

    Walkers never teleport and never revisit path nodes (the exploration
    candidate rule); "unbiased" picks uniformly among candidates, while
    "IGT"/"CPT" use rank-geometric choices driven by `params`. A walker with
    no remaining candidates holds its position.
    """
    if walker_kind not in ("unbiased", "IGT", "CPT"):
        raise ValueError("walker_kind must be 'unbiased', 'IGT', or 'CPT'")
    if walker_kind != "unbiased" and params is None:
        raise ValueError("biased walkers need trained network parameters")
    rng = np.random.default_rng([seed, 0xD1F, REWARD_CODES.get(walker_kind, 0)])
    sampler = (
        BiasedWalkSampler(g, params, greediness) if walker_kind != "unbiased" else None
    )
    dist_sum = np.zeros(horizon + 1)
    for _ in range(trials):
        start = int(rng.integers(g.n))
        dists = bfs_distances(g, start)
        current = start
        path_set = frozenset([current])
        for t in range(1, horizon + 1):
            if sampler is None:
                state = ExplorationState.from_visited(
                    g, sorted(path_set - {current}) + [current]
                )
                cands = candidate_actions(state)
                if cands:
                    current = cands[int(rng.integers(len(cands)))]
                    path_set = path_set | {current}
            else:
                cands, cum = sampler.transition(path_set, current)
                if cands is not None:
                    current = int(
                        cands[np.searchsorted(cum, rng.random(), side="right")]
                    )
                    path_set = path_set | {current}
            dist_sum[t] += dists[current]
    return dist_sum / trials
