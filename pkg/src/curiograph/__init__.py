"""Curiosity-driven graph exploration.

Topological reward functionals (1-cycle counts and network compressibility)
over visited subgraphs, a GraphSAGE-style Q-network trained with DQN to
maximize them, and curiosity-biased PageRank for next-node prediction.
"""

from .graphs import (
    Graph,
    GeneratorSpec,
    generate,
    induced_subgraph,
    ldp_features,
)
from .homology import BettiPair, betti, build_complex, boundary_rank, reward_igt
from .compression import (
    Partition,
    RateDistortionCurve,
    WalkModel,
    clustered_rate,
    compressibility,
    rate_distortion_curve,
    reward_cpt,
    walk_model,
)
from .mdp import (
    EpisodeConfig,
    EpisodeTrace,
    ExplorationState,
    baseline_agent,
    candidate_actions,
    episode_return,
    initial_state,
    run_episode,
    step,
)
from .qnet import (
    CandidateBatch,
    QNetworkParams,
    QPolicyAgent,
    build_candidate_batch,
    grad,
    init_params,
    load_params,
    q_values,
    sage_forward,
    save_params,
)
from .dqn import (
    EnvironmentSuite,
    ReplayBuffer,
    TrainConfig,
    Transition,
    build_suite,
    epsilon,
    evaluate,
    evaluate_policy,
    td_target,
    train,
)
from .pagerank import (
    PageRankSetup,
    biased_pagerank,
    biased_transition_probs,
    combine_scores,
    fit_parameters,
    improvement_ratio,
    pagerank,
    rank_percentile,
    walker_diffusion,
)

__version__ = "0.1.0"
