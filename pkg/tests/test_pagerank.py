import numpy as np
import pytest

from curiograph import qnet
from curiograph.graphs import Graph, GeneratorSpec, generate
from curiograph.pagerank import (
    PageRankSetup,
    biased_pagerank,
    biased_transition_probs,
    combine_scores,
    pagerank,
    pagerank_residual,
    rank_percentile,
    uniform_teleport,
    walker_diffusion,
    window_candidates,
)

from oracles import dense_pagerank_solve


def cycle(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def constant_q_params(seed=0):
    p = qnet.init_params(2, 16, seed=seed)
    p.arrays["readout.w2"][:] = 0.0
    return p


class TestPagerank:
    def test_alpha_zero_returns_q(self):
        g = generate(GeneratorSpec("ER", 12, p=0.4, seed=3))
        q = np.linspace(1, 12, 12)
        q /= q.sum()
        eta = pagerank(g, 0.0, q)
        assert np.allclose(eta, q, atol=1e-14)

    def test_regular_graph_uniform(self):
        g = cycle(9)
        eta = pagerank(g, 0.85)
        assert np.allclose(eta, 1.0 / 9, atol=1e-10)

    def test_path3_matches_dense_solve(self):
        g = Graph(3, [(0, 1), (1, 2)])
        q = uniform_teleport(3)
        eta = pagerank(g, 0.85, q)
        direct = dense_pagerank_solve(g, 0.85, q)
        assert np.abs(eta - direct).max() < 1e-10

    def test_matches_dense_solve_random_graphs(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            g = generate(GeneratorSpec("ER", 25, p=0.2, seed=int(rng.integers(2**31))))
            q = rng.random(25)
            q /= q.sum()
            alpha = float(rng.uniform(0.1, 0.95))
            eta = pagerank(g, alpha, q)
            direct = dense_pagerank_solve(g, alpha, q)
            assert np.abs(eta - direct).max() < 1e-10
            assert pagerank_residual(g, eta, alpha, q) < 1e-8

    def test_dangling_nodes_teleport(self):
        g = Graph(3, [(0, 1)])  # node 2 isolated
        q = uniform_teleport(3)
        eta = pagerank(g, 0.85, q)
        assert eta.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.abs(eta - dense_pagerank_solve(g, 0.85, q)).max() < 1e-10


class TestBiasedTransitionProbs:
    def test_single_candidate(self):
        probs = biased_transition_probs([4], np.array([0.3]), 0.5)
        assert probs.tolist() == [1.0]

    def test_two_candidates_half_greediness(self):
        probs = biased_transition_probs([7, 9], np.array([1.0, 0.0]), 0.5)
        assert probs == pytest.approx([2.0 / 3.0, 1.0 / 3.0])

    def test_rank_order_follows_q_then_id(self):
        cands = [5, 2, 9]
        q = np.array([0.1, 0.9, 0.1])
        probs = biased_transition_probs(cands, q, 0.5)
        # candidate 2 ranks first; tie between 5 and 9 broken by node id
        assert probs[1] > probs[0] > probs[2]

    def test_exact_sum_across_sizes_and_greediness(self):
        rng = np.random.default_rng(0)
        for m in range(1, 21):
            for p in (0.1, 0.5, 0.9):
                probs = biased_transition_probs(
                    list(range(m)), rng.normal(size=m), p
                )
                assert probs.sum() == 1.0

    def test_greediness_one_is_uniform(self):
        probs = biased_transition_probs([1, 2, 3, 4], np.arange(4.0), 1.0)
        assert np.allclose(probs, 0.25)

    def test_near_one_limit_approaches_uniform(self):
        probs = biased_transition_probs([1, 2, 3], np.arange(3.0), 1.0 - 1e-9)
        assert np.allclose(probs, 1.0 / 3.0, atol=1e-6)

    def test_empty_candidates_signal(self):
        with pytest.raises(ValueError):
            biased_transition_probs([], np.array([]), 0.5)


class TestBiasedPagerank:
    def test_cycle_matches_unbiased_frequencies(self):
        # After a teleport the walker picks between two ring directions; at
        # greediness 1 that choice is uniform, symmetry holds, and the visit
        # frequencies match the unbiased stationary scores. (At greediness
        # < 1 the node-id tie-break prefers one direction and the wrap-around
        # breaks exact rotational symmetry by a few percent.)
        g = cycle(10)
        setup = PageRankSetup(
            alpha=0.85, greediness=1.0, mc_block_steps=500_000, mc_tol=5e-4,
            mc_max_steps=20_000_000, seed=1,
        )
        eta = biased_pagerank(g, constant_q_params(), "IGT", setup)
        assert np.abs(eta - pagerank(g, 0.85)).sum() < 1e-2

    def test_cycle_id_tiebreak_bias_is_deterministic(self):
        g = cycle(10)
        setup = PageRankSetup(
            alpha=0.85, greediness=0.5, mc_block_steps=100_000, mc_tol=2e-3,
            mc_max_steps=5_000_000, seed=1,
        )
        a = biased_pagerank(g, constant_q_params(), "IGT", setup)
        b = biased_pagerank(g, constant_q_params(), "IGT", setup)
        assert np.array_equal(a, b)

    def test_alpha_zero_is_teleport_only(self):
        g = cycle(6)
        q = np.array([0.5, 0.1, 0.1, 0.1, 0.1, 0.1])
        setup = PageRankSetup(
            alpha=0.0, personalization=q, greediness=0.5,
            mc_block_steps=100_000, mc_tol=1e-3, mc_max_steps=5_000_000, seed=2,
        )
        eta = biased_pagerank(g, constant_q_params(), "IGT", setup)
        assert np.abs(eta - q).sum() < 1e-2

    def test_greediness_one_close_to_pagerank_at_low_alpha(self):
        # With alpha = 0.3 paths are short, so the no-revisit constraint
        # barely distorts the walk; uniform candidate choice then tracks the
        # plain PageRank stationary scores.
        g = generate(GeneratorSpec("RG", 20, seed=9))
        setup = PageRankSetup(
            alpha=0.3, greediness=1.0, mc_block_steps=400_000, mc_tol=5e-4,
            mc_max_steps=30_000_000, seed=3,
        )
        eta = biased_pagerank(g, constant_q_params(), "IGT", setup)
        assert np.abs(eta - pagerank(g, 0.3)).sum() < 1e-2

    def test_nonconvergence_raises(self):
        g = cycle(8)
        setup = PageRankSetup(
            alpha=0.85, mc_block_steps=100, mc_tol=1e-12, mc_max_steps=500, seed=4,
        )
        with pytest.raises(RuntimeError, match="converge"):
            biased_pagerank(g, constant_q_params(), "IGT", setup)


class TestCombineScores:
    def test_pure_pagerank_identity(self):
        rng = np.random.default_rng(0)
        eta = rng.random(10)
        eta /= eta.sum()
        out = combine_scores(eta, None, None, (1.0, 0.0, 0.0))
        assert np.abs(out - eta).max() < 1e-12

    def test_pure_igt(self):
        rng = np.random.default_rng(1)
        eta = rng.random(8)
        eta /= eta.sum()
        other = rng.random(8)
        other /= other.sum()
        out = combine_scores(other, eta, None, (0.0, 1.0, 0.0))
        assert np.abs(out - eta).max() < 1e-12

    def test_equal_vectors_fixed_point(self):
        eta = np.full(5, 0.2)
        w = (0.6, 0.8, 0.0)
        out = combine_scores(eta, eta, None, w)
        assert np.allclose(out, eta)

    def test_norm_constraint_enforced(self):
        eta = np.full(4, 0.25)
        with pytest.raises(ValueError):
            combine_scores(eta, eta, None, (1.0, 1.0, 0.0))


class TestRankPercentile:
    def _chain(self):
        # 0 - 1 - {2,3,4,5} fan; window [0, 1, target]
        return Graph(6, [(0, 1), (1, 2), (1, 3), (1, 4), (1, 5)])

    def test_unique_max_midrank(self):
        g = self._chain()
        scores = np.array([0.0, 0.0, 0.9, 0.1, 0.05, 0.01])
        # 4 candidates (2,3,4,5); target 2 ranks highest: (4 - 0.5)/4
        assert rank_percentile(scores, [0, 1, 2], g) == pytest.approx(87.5)

    def test_all_equal_scores_give_fifty(self):
        g = self._chain()
        scores = np.full(6, 0.25)
        assert rank_percentile(scores, [0, 1, 3], g) == pytest.approx(50.0)

    def test_pinned_formula_third_of_four(self):
        g = self._chain()
        scores = np.zeros(6)
        scores[[2, 3, 4, 5]] = [0.4, 0.3, 0.2, 0.1]
        # target 4 (score 0.2) has ascending mid-rank 2 of 4 -> 37.5
        assert rank_percentile(scores, [0, 1, 4], g) == pytest.approx(37.5)

    def test_monotone_transform_invariance(self):
        g = self._chain()
        rng = np.random.default_rng(3)
        scores = rng.random(6)
        before = rank_percentile(scores, [0, 1, 3], g)
        after = rank_percentile(np.exp(3.0 * scores) + 5.0, [0, 1, 3], g)
        assert before == after

    def test_unreachable_target_excluded(self):
        g = self._chain()
        scores = np.full(6, 1.0 / 6)
        # target 2 is not adjacent to the last burn-in node 0
        assert rank_percentile(scores, [1, 0, 2], g) is None
        # target already visited: not a legal next step
        assert rank_percentile(scores, [0, 1, 0], g) is None

    def test_window_candidates_excludes_visited(self):
        g = self._chain()
        cands, ok = window_candidates(g, [2, 1, 3])
        assert cands == [0, 3, 4, 5]
        assert ok


class TestWalkerDiffusion:
    def test_step_zero_distance_zero(self):
        g = cycle(8)
        d = walker_diffusion(g, "unbiased", horizon=4, trials=10, seed=0)
        assert d[0] == 0.0

    def test_cycle_first_step_distance_one(self):
        g = cycle(12)
        d = walker_diffusion(g, "unbiased", horizon=3, trials=20, seed=1)
        assert d[1] == pytest.approx(1.0)

    def test_bounded_by_diameter(self):
        g = generate(GeneratorSpec("WS", 20, k=4, p=0.2, seed=5))
        from curiograph.graphs import bfs_distances

        diameter = max(bfs_distances(g, s).max() for s in range(g.n))
        d = walker_diffusion(g, "unbiased", horizon=15, trials=10, seed=2)
        assert (d <= diameter + 1e-12).all()

    def test_biased_walker_runs(self):
        g = generate(GeneratorSpec("RG", 25, seed=3))
        d = walker_diffusion(
            g, "IGT", horizon=6, trials=5, params=constant_q_params(), seed=4
        )
        assert d.shape == (7,)
        assert (d >= 0).all()

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            walker_diffusion(cycle(5), "fastest", 3, 2)
