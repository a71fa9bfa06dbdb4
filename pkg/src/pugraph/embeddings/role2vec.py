"""Structural embedding: nodes collapse to roles, walks train role vectors.

A node's role is the pair (log-binned degree, binned triangle count); walks
are rewritten as role sequences before skip-gram, so structurally equivalent
nodes share one vector by construction.
"""

from __future__ import annotations

import numpy as np

from ..seeding import derive_seed
from .base import EmbeddingMatrix
from .skipgram import train_skipgram
from .walks import WalkConfig, generate_walks


def triangle_counts(graph):
    """Number of triangles through each node (self-loops ignored)."""
    counts = np.zeros(graph.node_count, dtype=np.int64)
    for v in range(graph.node_count):
        nbrs, _ = graph.neighbors(v)
        nbrs = nbrs[nbrs != v]
        total = 0
        for a in nbrs:
            a_nbrs, _ = graph.neighbors(int(a))
            a_nbrs = a_nbrs[a_nbrs != a]
            total += len(np.intersect1d(nbrs, a_nbrs, assume_unique=True))
        counts[v] = total // 2
    return counts


def structural_roles(graph, triangle_bins=3):
    """Role index per node from (floor(log2(degree + 1)), capped triangle count)."""
    degrees = np.array([graph.degree(v) for v in range(graph.node_count)], dtype=np.int64)
    log_deg = np.floor(np.log2(degrees + 1)).astype(np.int64)
    tri = np.minimum(triangle_counts(graph), triangle_bins)
    keys = list(zip(log_deg.tolist(), tri.tolist()))
    role_of_key = {key: i for i, key in enumerate(sorted(set(keys)))}
    return np.array([role_of_key[key] for key in keys], dtype=np.int64), len(role_of_key)


def train_role2vec(graph, cfg: WalkConfig | None = None, dim=64, triangle_bins=3, window=5, negatives=5, epochs=5, lr=0.025, rng_seed=0):
    """Skip-gram over role sequences; every node gets its role's vector."""
    if cfg is None:
        cfg = WalkConfig(rng_seed=derive_seed(rng_seed, "role2vec-walks"))
    roles, n_roles = structural_roles(graph, triangle_bins=triangle_bins)
    corpus = [[int(roles[v]) for v in walk] for walk in generate_walks(graph, cfg)]
    role_vectors = train_skipgram(
        corpus,
        n_roles,
        dim=dim,
        window=window,
        negatives=negatives,
        epochs=epochs,
        lr=lr,
        rng_seed=derive_seed(rng_seed, "role2vec-skipgram"),
        method_tag="role2vec-roles",
    )
    return EmbeddingMatrix(role_vectors.vectors[roles], "role2vec", list(graph.external_ids))
