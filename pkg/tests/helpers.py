"""Shared fixtures: synthetic SCAR feature data and small named graphs."""

from __future__ import annotations

import numpy as np

from pugraph.graph import TransactionGraph


def scar_blobs(n, prior, label_freq, rng, separation=8.0, spread=0.6, dim=2):
    """Two compact Gaussian clusters with uniformly labeled positives.

    The wide separation relative to spread makes the observed-label posterior
    nearly flat at ``label_freq`` over the positive cluster, so a calibrated
    linear model can represent it; labels are an exact-count uniform draw.
    Returns ``(features, truth, observed)``.
    """
    n_pos = int(round(prior * n))
    truth = np.zeros(n, dtype=np.int8)
    truth[:n_pos] = 1
    features = rng.normal(size=(n, dim)) * spread
    features[:n_pos, 0] += separation
    observed = np.zeros(n, dtype=np.int8)
    labeled = rng.choice(n_pos, size=int(round(label_freq * n_pos)), replace=False)
    observed[labeled] = 1
    return features, truth, observed


def graph_from_edges(edges, n_nodes=None, weights=None):
    src = np.array([e[0] for e in edges], dtype=np.int64)
    dst = np.array([e[1] for e in edges], dtype=np.int64)
    if n_nodes is None:
        n_nodes = int(max(src.max(initial=-1), dst.max(initial=-1)) + 1)
    w = np.ones(len(edges)) if weights is None else np.asarray(weights, dtype=np.float64)
    return TransactionGraph(src, dst, w, [str(i) for i in range(n_nodes)])


def two_cliques(size=10, bridge=True):
    edges = []
    for a in range(size):
        for b in range(a + 1, size):
            edges.append((a, b))
    for a in range(size, 2 * size):
        for b in range(a + 1, 2 * size):
            edges.append((a, b))
    if bridge:
        edges.append((0, size))
    return graph_from_edges(edges, n_nodes=2 * size)


def star_graph(leaves=6):
    return graph_from_edges([(0, i) for i in range(1, leaves + 1)], n_nodes=leaves + 1)


def path_graph(n=3):
    return graph_from_edges([(i, i + 1) for i in range(n - 1)], n_nodes=n)


def cycle_graph(n=8):
    return graph_from_edges([(i, (i + 1) % n) for i in range(n)], n_nodes=n)


def binary_tree(depth=3):
    n = 2 ** (depth + 1) - 1
    edges = []
    for i in range(n):
        for child in (2 * i + 1, 2 * i + 2):
            if child < n:
                edges.append((i, child))
    return graph_from_edges(edges, n_nodes=n)
