"""Topological gap counting: clique complexes, boundary ranks, Betti numbers.

The gap reward for an exploration state is the first Betti number of the
visited subgraph: the number of independent edge loops not filled in by
triangles.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .graphs import Graph


@dataclass(frozen=True)
class CliqueComplex2:
    """A graph's clique complex truncated at dimension 2.

    Triangles are every 3-clique, stored as sorted triples in lexicographic
    order. Nothing above dimension 2 is needed: beta_1 only sees vertices,
    edges, and triangle fillings.
    """

    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    triangles: tuple[tuple[int, int, int], ...]


class BettiPair(NamedTuple):
    beta0: int
    beta1: int


def build_complex(g: Graph) -> CliqueComplex2:
    """Enumerate all triangles of `g` by neighbor-list intersection."""
    triangles = []
    for u, v in g.edges:  # u < v by Graph construction
        common = g.neighbor_set(u) & g.neighbor_set(v)
        for w in common:
            if w > v:
                triangles.append((u, v, w))
    triangles.sort()
    return CliqueComplex2(g.n, g.edges, tuple(triangles))


def boundary_rank(c: CliqueComplex2) -> int:
    """Rank over GF(2) of the edge-by-triangle boundary matrix.

    Columns (one per triangle, three incident edges each) are packed into
    Python ints and reduced by bitwise Gaussian elimination; signs are
    irrelevant mod 2.
    """
    if not c.triangles:
        return 0
    edge_index = {e: i for i, e in enumerate(c.edges)}
    pivots: dict[int, int] = {}  # lowest set bit -> reduced column
    rank = 0
    for a, b, d in c.triangles:
        col = (
            (1 << edge_index[(a, b)])
            | (1 << edge_index[(a, d)])
            | (1 << edge_index[(b, d)])
        )
        while col:
            low = col & -col
            pivot = pivots.get(low)
            if pivot is None:
                pivots[low] = col
                rank += 1
                break
            col ^= pivot
    return rank


def _component_count(g: Graph) -> int:
    parent = list(range(g.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = g.n
    for u, v in g.edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            comps -= 1
    return comps


def betti(g: Graph) -> BettiPair:
    """(beta0, beta1) of the clique complex of `g`.

    beta0 counts connected components (union-find); beta1 follows from
    the cycle-space dimension minus the rank of the triangle boundary:
    beta1 = |E| - |V| + beta0 - rank(boundary).
    """
    beta0 = _component_count(g)
    rank2 = boundary_rank(build_complex(g))
    beta1 = g.num_edges - g.n + beta0 - rank2
    return BettiPair(beta0, beta1)


def reward_igt(state) -> float:
    """Information-gap reward: beta1 of the state's visited subgraph."""
    return float(betti(state.subgraph).beta1)
