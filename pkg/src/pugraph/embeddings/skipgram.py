"""Negative-sampling skip-gram over walk corpora, trained by minibatch SGD."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigurationError
from ..seeding import derive_rng
from .base import EmbeddingMatrix


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -30.0, 30.0)))


def _scatter_clipped(matrix, index, updates, clip=1.0):
    uniq, inverse = np.unique(index, return_inverse=True)
    totals = np.zeros((len(uniq), matrix.shape[1]))
    np.add.at(totals, inverse, updates)
    norms = np.linalg.norm(totals, axis=1)
    over = norms > clip
    if np.any(over):
        totals[over] *= (clip / norms[over])[:, None]
    matrix[uniq] += totals


def _corpus_pairs(corpus, window):
    centers, contexts = [], []
    for walk in corpus:
        n = len(walk)
        for i in range(n):
            lo = max(0, i - window)
            hi = min(n, i + window + 1)
            for j in range(lo, hi):
                if j != i:
                    centers.append(walk[i])
                    contexts.append(walk[j])
    return np.array(centers, dtype=np.int64), np.array(contexts, dtype=np.int64)


def train_skipgram(
    corpus,
    n_nodes,
    dim=64,
    window=5,
    negatives=5,
    epochs=5,
    lr=0.025,
    rng_seed=0,
    batch_size=1024,
    node_ids=None,
    method_tag="skipgram",
):
    """One vector per node id in ``[0, n_nodes)``.

    Nodes that never appear in the corpus keep their initialization vector.
    The learning rate decays linearly to 1% of ``lr`` over the run.
    """
    if dim < 1:
        raise ConfigurationError(f"embedding dim must be >= 1, got {dim}")
    if not corpus:
        raise ConfigurationError("empty walk corpus")
    if negatives < 1:
        raise ConfigurationError("negatives must be >= 1")

    rng = derive_rng(rng_seed, "skipgram")
    w_in = (rng.random((n_nodes, dim)) - 0.5) / dim
    w_out = np.zeros((n_nodes, dim))

    centers, contexts = _corpus_pairs(corpus, window)
    if len(centers) == 0:
        # corpus of single-node walks: nothing to train on
        return EmbeddingMatrix(w_in, method_tag, node_ids or [str(i) for i in range(n_nodes)])

    counts = np.bincount(np.concatenate([centers, contexts]), minlength=n_nodes).astype(np.float64)
    noise = counts**0.75
    noise_cum = np.cumsum(noise / noise.sum())

    n_pairs = len(centers)
    # small vocabularies concentrate a batch's updates on few rows; shrink the
    # batch so the summed per-row step stays near true-SGD scale
    batch_size = max(64, min(batch_size, 4 * n_nodes))
    batches_per_epoch = (n_pairs + batch_size - 1) // batch_size
    total = epochs * batches_per_epoch
    step = 0
    for _ in range(epochs):
        order = rng.permutation(n_pairs)
        for start in range(0, n_pairs, batch_size):
            rows = order[start:start + batch_size]
            c = centers[rows]
            o = contexts[rows]
            neg = np.searchsorted(noise_cum, rng.random((len(rows), negatives)), side="right")
            neg = np.minimum(neg, n_nodes - 1)

            v = w_in[c]
            u_pos = w_out[o]
            u_neg = w_out[neg]
            g_pos = _sigmoid(np.einsum("bd,bd->b", v, u_pos)) - 1.0
            g_neg = _sigmoid(np.einsum("bd,bkd->bk", v, u_neg))

            lr_t = lr * max(0.01, 1.0 - step / total)
            grad_v = g_pos[:, None] * u_pos + np.einsum("bk,bkd->bd", g_neg, u_neg)
            _scatter_clipped(w_in, c, -lr_t * grad_v)
            out_idx = np.concatenate([o, neg.reshape(-1)])
            out_grad = np.concatenate(
                [
                    -lr_t * g_pos[:, None] * v,
                    (-lr_t * g_neg[:, :, None] * v[:, None, :]).reshape(-1, dim),
                ]
            )
            _scatter_clipped(w_out, out_idx, out_grad)
            step += 1

    return EmbeddingMatrix(w_in, method_tag, node_ids or [str(i) for i in range(n_nodes)])
