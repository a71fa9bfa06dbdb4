import numpy as np
import pytest
from scipy.stats import chisquare

from helpers import graph_from_edges, path_graph
from pugraph.embeddings import WalkConfig, generate_walks
from pugraph.errors import ConfigurationError


class TestWalkConfig:
    def test_defaults_match_unbiased_short_walks(self):
        cfg = WalkConfig()
        assert cfg.p == 1.0
        assert cfg.q == 1.0
        assert cfg.walk_length == 5
        assert cfg.walks_per_node == 10

    @pytest.mark.parametrize("kwargs", [{"p": 0.0}, {"q": -1.0}, {"walk_length": 0}, {"walks_per_node": 0}])
    def test_invalid_config(self, kwargs):
        with pytest.raises(ConfigurationError):
            WalkConfig(**kwargs)


class TestGenerateWalks:
    def test_isolated_node_single_step_walk(self):
        g = graph_from_edges([(0, 1)], n_nodes=3)  # node 2 isolated
        walks = generate_walks(g, WalkConfig(walks_per_node=2, rng_seed=0))
        from_isolated = [w for w in walks if w[0] == 2]
        assert len(from_isolated) == 2
        assert all(w == [2] for w in from_isolated)

    def test_walk_counts_and_length_cap(self):
        g = path_graph(4)
        cfg = WalkConfig(walk_length=5, walks_per_node=3, rng_seed=1)
        walks = generate_walks(g, cfg)
        assert len(walks) == 4 * 3
        assert all(1 <= len(w) <= 5 for w in walks)
        for walk in walks:
            for a, b in zip(walk, walk[1:]):
                assert g.has_edge(a, b)

    def test_unbiased_transition_uniform_from_middle(self):
        # brute-force oracle on a-b-c with p=q=1: every transition out of b
        # picks a or c proportionally to equal weights
        g = path_graph(3)
        cfg = WalkConfig(p=1.0, q=1.0, walk_length=8, walks_per_node=1100, rng_seed=3)
        walks = generate_walks(g, cfg)
        counts = {0: 0, 2: 0}
        total = 0
        for walk in walks:
            for here, nxt in zip(walk, walk[1:]):
                if here == 1:
                    counts[nxt] += 1
                    total += 1
        assert total >= 10_000
        assert chisquare([counts[0], counts[2]]).pvalue > 0.001

    def test_return_parameter_bias(self):
        # 1/p = 100: the walk overwhelmingly returns to the previous node
        g = path_graph(3)
        back, on = 0, 0
        walks = generate_walks(g, WalkConfig(p=0.01, q=1.0, walk_length=10, walks_per_node=300, rng_seed=5))
        for walk in walks:
            for prev, here, nxt in zip(walk, walk[1:], walk[2:]):
                if here == 1:
                    if nxt == prev:
                        back += 1
                    else:
                        on += 1
        assert back > 10 * on

    def test_determinism_and_seed_sensitivity(self):
        g = graph_from_edges([(0, 1), (1, 2), (2, 0), (2, 3)], n_nodes=4)
        cfg = WalkConfig(rng_seed=11)
        assert generate_walks(g, cfg) == generate_walks(g, cfg)
        assert generate_walks(g, cfg) != generate_walks(g, WalkConfig(rng_seed=12))

    def test_empty_graph_rejected(self):
        g = graph_from_edges([], n_nodes=0)
        with pytest.raises(ConfigurationError):
            generate_walks(g, WalkConfig())

    def test_weighted_first_step(self):
        # star with one heavy edge: first steps from center follow the weights
        g = graph_from_edges([(0, 1), (0, 2)], weights=[9.0, 1.0])
        walks = generate_walks(g, WalkConfig(walk_length=2, walks_per_node=2000, rng_seed=7))
        first = [w[1] for w in walks if w[0] == 0 and len(w) > 1]
        share_heavy = first.count(1) / len(first)
        assert 0.85 <= share_heavy <= 0.95
