"""Independent oracles the test suite checks the library against.

Everything here is deliberately slow and simple: exact rational arithmetic,
exhaustive enumeration, and dense linear solves. None of it shares code with
the implementation paths it verifies.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np

from curiograph.graphs import Graph


def rational_boundary_rank(g: Graph) -> int:
    """Rank over Q of the signed edge-by-triangle boundary matrix.

    Triangles are enumerated by brute force over node triples; elimination
    uses exact fractions, so the result is an independent check on the
    GF(2) bit-packed route.
    """
    edges = list(g.edges)
    edge_index = {e: i for i, e in enumerate(edges)}
    triangles = [
        (a, b, c)
        for a, b, c in combinations(range(g.n), 3)
        if g.has_edge(a, b) and g.has_edge(a, c) and g.has_edge(b, c)
    ]
    if not triangles:
        return 0
    rows = [[Fraction(0)] * len(triangles) for _ in edges]
    for j, (a, b, c) in enumerate(triangles):
        # oriented boundary of [a, b, c]: [b,c] - [a,c] + [a,b]
        rows[edge_index[(b, c)]][j] = Fraction(1)
        rows[edge_index[(a, c)]][j] = Fraction(-1)
        rows[edge_index[(a, b)]][j] = Fraction(1)
    return _rational_rank(rows)


def _rational_rank(rows: list[list[Fraction]]) -> int:
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    rank = 0
    pivot_row = 0
    for col in range(n_cols):
        pivot = None
        for r in range(pivot_row, n_rows):
            if rows[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        rows[pivot_row], rows[pivot] = rows[pivot], rows[pivot_row]
        inv = 1 / rows[pivot_row][col]
        rows[pivot_row] = [x * inv for x in rows[pivot_row]]
        for r in range(n_rows):
            if r != pivot_row and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [x - factor * y for x, y in zip(rows[r], rows[pivot_row])]
        rank += 1
        pivot_row += 1
        if pivot_row == n_rows:
            break
    return rank


def rational_betti(g: Graph) -> tuple[int, int]:
    """(beta0, beta1) from scratch: BFS components and the rational rank."""
    seen = [False] * g.n
    beta0 = 0
    for s in range(g.n):
        if seen[s]:
            continue
        beta0 += 1
        stack = [s]
        seen[s] = True
        while stack:
            u = stack.pop()
            for v in g.adj[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(int(v))
    beta1 = g.num_edges - g.n + beta0 - rational_boundary_rank(g)
    return beta0, beta1


def set_partitions(n: int):
    """All partitions of range(n) as label arrays, via restricted growth strings."""
    labels = [0] * n
    maxes = [0] * n

    def rec(i: int):
        if i == n:
            yield list(labels)
            return
        top = maxes[i - 1] if i > 0 else -1
        for lab in range(top + 2):
            labels[i] = lab
            maxes[i] = max(top, lab)
            yield from rec(i + 1)

    yield from rec(0)


def aggregated_rate(joint: np.ndarray, pi: np.ndarray, labels) -> float:
    """Clustered chain rate computed the long way, term by term."""
    labels = np.asarray(labels)
    k = labels.max() + 1
    big_pi = np.zeros(k)
    big_j = np.zeros((k, k))
    n = pi.shape[0]
    for i in range(n):
        big_pi[labels[i]] += pi[i]
        for j in range(n):
            big_j[labels[i], labels[j]] += joint[i, j]
    rate = 0.0
    for a in range(k):
        for b in range(k):
            if big_j[a, b] > 0:
                rate -= big_j[a, b] * np.log2(big_j[a, b] / big_pi[a])
    return rate


def exhaustive_rate_curve(g: Graph) -> np.ndarray:
    """Exact minimum aggregated rate per cluster count n = t .. 1, with the
    same running-minimum convention the greedy curve uses."""
    from curiograph.compression import walk_model

    w = walk_model(g)
    t = g.n
    best = np.full(t + 1, np.inf)  # best[k] for k clusters
    for labels in set_partitions(t):
        k = max(labels) + 1
        rate = aggregated_rate(w.joint, w.stationary, labels)
        if rate < best[k]:
            best[k] = rate
    raw = best[np.arange(t, 0, -1)]  # order n = t .. 1
    return np.minimum.accumulate(raw)


def exhaustive_compressibility(g: Graph) -> float:
    from curiograph.compression import walk_model

    w = walk_model(g)
    return w.entropy - float(exhaustive_rate_curve(g).mean())


def dense_pagerank_solve(g: Graph, alpha: float, q: np.ndarray) -> np.ndarray:
    """Direct linear solve of (I - alpha P^T) eta = (1 - alpha) q."""
    deg = g.degrees.astype(np.float64)
    p = g.adjacency_matrix()
    nonzero = deg > 0
    p[nonzero] /= deg[nonzero, None]
    p[~nonzero] = q  # dangling nodes teleport
    eta = np.linalg.solve(np.eye(g.n) - alpha * p.T, (1.0 - alpha) * q)
    return eta / eta.sum()


def finite_difference_grads(loss_fn, params, names_and_indices, step: float = 1e-5):
    """Central finite differences of loss_fn at selected parameter entries."""
    out = []
    for name, idx in names_and_indices:
        arr = params.arrays[name]
        flat = arr.reshape(-1)
        original = flat[idx] if arr.ndim else float(arr)
        if arr.ndim:
            flat[idx] = original + step
            up = loss_fn(params)
            flat[idx] = original - step
            down = loss_fn(params)
            flat[idx] = original
        else:
            params.arrays[name] = np.array(original + step)
            up = loss_fn(params)
            params.arrays[name] = np.array(original - step)
            down = loss_fn(params)
            params.arrays[name] = np.array(original)
        out.append((up - down) / (2.0 * step))
    return np.array(out)
