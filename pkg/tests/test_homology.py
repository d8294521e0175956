import numpy as np
import pytest

from curiograph.graphs import Graph, GeneratorSpec, generate, default_rg_radius
from curiograph.homology import betti, boundary_rank, build_complex, reward_igt
from curiograph.mdp import ExplorationState

from oracles import rational_betti, rational_boundary_rank


def cycle(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n):
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


class TestBuildComplex:
    def test_square_has_no_triangles(self):
        assert build_complex(cycle(4)).triangles == ()

    def test_k4_triangle_count(self):
        assert len(build_complex(complete(4)).triangles) == 4

    def test_k5_triangle_count(self):
        assert len(build_complex(complete(5)).triangles) == 10

    def test_triangles_sorted_and_valid(self):
        g = generate(GeneratorSpec("ER", 12, p=0.5, seed=3))
        c = build_complex(g)
        assert list(c.triangles) == sorted(set(c.triangles))
        for a, b, d in c.triangles:
            assert a < b < d
            assert g.has_edge(a, b) and g.has_edge(a, d) and g.has_edge(b, d)


class TestBoundaryRank:
    def test_single_triangle(self):
        g = complete(3)
        assert boundary_rank(build_complex(g)) == 1

    def test_no_triangles(self):
        assert boundary_rank(build_complex(cycle(5))) == 0

    def test_k4_rank_matches_rational_oracle(self):
        g = complete(4)
        assert rational_boundary_rank(g) == 3
        assert boundary_rank(build_complex(g)) == 3

    def test_gf2_equals_rational_on_random_graphs(self):
        rng = np.random.default_rng(7)
        for _ in range(60):
            n = int(rng.integers(4, 12))
            g = generate(GeneratorSpec("ER", n, p=float(rng.uniform(0.2, 0.7)),
                                       seed=int(rng.integers(2**31))))
            assert boundary_rank(build_complex(g)) == rational_boundary_rank(g)


class TestBetti:
    def test_square(self):
        assert tuple(betti(cycle(4))) == (1, 1)

    def test_two_disjoint_edges(self):
        g = Graph(4, [(0, 1), (2, 3)])
        assert tuple(betti(g)) == (2, 0)

    def test_k4_filled(self):
        assert tuple(betti(complete(4))) == (1, 0)

    def test_tree_has_no_cycles(self):
        g = Graph(6, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5)])
        assert tuple(betti(g)) == (1, 0)

    def test_forest(self):
        g = Graph(6, [(0, 1), (2, 3), (4, 5)])
        assert tuple(betti(g)) == (3, 0)

    def test_connecting_edge_lowers_beta0_only(self):
        g = Graph(5, [(0, 1), (1, 2), (3, 4)])
        before = betti(g)
        g2 = Graph(5, list(g.edges) + [(2, 3)])
        after = betti(g2)
        assert after.beta0 == before.beta0 - 1
        assert after.beta1 == before.beta1

    def test_closing_chordless_cycle_raises_beta1(self):
        g = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
        before = betti(g)
        g2 = Graph(5, list(g.edges) + [(0, 4)])
        after = betti(g2)
        assert after.beta1 == before.beta1 + 1
        assert after.beta0 == before.beta0

    def test_matches_rational_oracle_mixed_families(self):
        rng = np.random.default_rng(99)
        for _ in range(40):
            n = int(rng.integers(5, 13))
            fam = ("ER", "WS", "RG")[int(rng.integers(3))]
            seed = int(rng.integers(2**31))
            if fam == "ER":
                spec = GeneratorSpec("ER", n, p=float(rng.uniform(0.2, 0.6)), seed=seed)
            elif fam == "WS":
                k = 2 if n <= 5 else 4
                spec = GeneratorSpec("WS", n, k=k, p=0.3, seed=seed)
            else:
                spec = GeneratorSpec("RG", n, radius=0.6, seed=seed)
            g = generate(spec)
            assert tuple(betti(g)) == rational_betti(g)


class TestRewardIgt:
    def test_square_state(self):
        env = cycle(4)
        state = ExplorationState.from_visited(env, [0, 1, 2, 3])
        assert reward_igt(state) == 1.0

    def test_single_node(self):
        env = cycle(4)
        state = ExplorationState.from_visited(env, [2])
        assert reward_igt(state) == 0.0

    def test_path_state_is_zero(self):
        env = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
        state = ExplorationState.from_visited(env, [0, 1, 2, 3])
        assert reward_igt(state) == 0.0
