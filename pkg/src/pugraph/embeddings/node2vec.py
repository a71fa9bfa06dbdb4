"""Neighborhood-preserving embedding: biased walks plus skip-gram."""

from __future__ import annotations

from ..seeding import derive_seed
from .skipgram import train_skipgram
from .walks import WalkConfig, generate_walks


def train_node2vec(graph, cfg: WalkConfig | None = None, dim=64, window=5, negatives=5, epochs=5, lr=0.025, rng_seed=0):
    """Walks with the default unbiased setting (p = q = 1, length 5), then skip-gram."""
    if cfg is None:
        cfg = WalkConfig(rng_seed=derive_seed(rng_seed, "node2vec-walks"))
    corpus = generate_walks(graph, cfg)
    return train_skipgram(
        corpus,
        graph.node_count,
        dim=dim,
        window=window,
        negatives=negatives,
        epochs=epochs,
        lr=lr,
        rng_seed=derive_seed(rng_seed, "node2vec-skipgram"),
        node_ids=list(graph.external_ids),
        method_tag="node2vec",
    )
