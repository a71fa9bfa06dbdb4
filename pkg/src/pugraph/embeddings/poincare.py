"""Hierarchy-preserving embedding in the open unit ball.

Edges are positive pairs; sampled non-neighbors are negatives.  Gradients of
the hyperbolic distance are rescaled by the inverse metric ((1 - |x|^2)^2 / 4)
and every update is followed by a projection that keeps all points strictly
inside the ball, so the ball invariant holds after every optimizer step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError
from ..seeding import derive_rng
from .base import EmbeddingMatrix

BALL_EPS = 1e-5


@dataclass
class PoincareEmbedding:
    vectors: np.ndarray
    node_ids: list[str]
    burn_in_epochs: int
    epochs: int
    learning_rate: float
    negatives_per_positive: int
    max_norm_seen: float = 0.0
    method_tag: str = "poincare"
    step_norms_ok: bool = field(default=True)

    def norms(self):
        return np.linalg.norm(self.vectors, axis=1)

    def to_embedding_matrix(self):
        return EmbeddingMatrix(self.vectors, self.method_tag, list(self.node_ids))


def poincare_distance(u, v):
    """Hyperbolic distance between batches of ball points (last axis = dim)."""
    uu = np.sum(u * u, axis=-1)
    vv = np.sum(v * v, axis=-1)
    delta = np.sum((u - v) ** 2, axis=-1)
    gamma = 1.0 + 2.0 * delta / np.maximum((1.0 - uu) * (1.0 - vv), 1e-15)
    return np.arccosh(np.maximum(gamma, 1.0))


def _project(vectors, rows):
    norms = np.linalg.norm(vectors[rows], axis=1)
    over = norms >= 1.0 - BALL_EPS
    if np.any(over):
        # land strictly inside 1 - eps so float fuzz cannot cross the bound
        shrink = (1.0 - BALL_EPS) * (1.0 - 1e-9) / norms[over]
        vectors[rows[over]] *= shrink[:, None]


def train_poincare(graph, dim=64, epochs=30, lr=0.1, negatives=5, rng_seed=0, burn_in_epochs=2, batch_size=512):
    """Riemannian SGD on the softmax ranking loss over edge pairs."""
    if lr <= 0:
        raise ConfigurationError("lr must be positive")
    if dim < 1:
        raise ConfigurationError("embedding dim must be >= 1")
    if graph.node_count == 0:
        raise ConfigurationError("cannot embed an empty graph")
    n = graph.node_count
    rng = derive_rng(rng_seed, "poincare")
    vectors = (rng.random((n, dim)) - 0.5) * 2e-3

    result = PoincareEmbedding(
        vectors=vectors,
        node_ids=list(graph.external_ids),
        burn_in_epochs=burn_in_epochs,
        epochs=epochs,
        learning_rate=lr,
        negatives_per_positive=negatives,
    )
    if graph.edge_count == 0:
        result.max_norm_seen = float(np.max(np.linalg.norm(vectors, axis=1))) if n else 0.0
        return result

    heads = np.concatenate([graph.und_u, graph.und_v])
    tails = np.concatenate([graph.und_v, graph.und_u])
    keep = heads != tails  # self-loops carry no ranking signal
    heads, tails = heads[keep], tails[keep]
    n_pairs = len(heads)
    max_norm = 0.0

    for epoch in range(burn_in_epochs + epochs):
        lr_t = lr / 10.0 if epoch < burn_in_epochs else lr
        order = rng.permutation(n_pairs)
        for start in range(0, n_pairs, batch_size):
            rows = order[start:start + batch_size]
            u_idx = heads[rows]
            pos_idx = tails[rows]
            b = len(rows)

            neg = rng.integers(0, n, size=(b, negatives))
            for _ in range(4):
                bad = (neg == u_idx[:, None]) | (neg == pos_idx[:, None])
                if not np.any(bad):
                    break
                neg[bad] = rng.integers(0, n, size=int(bad.sum()))

            target = np.concatenate([pos_idx[:, None], neg], axis=1)  # (b, K)
            u = vectors[u_idx]  # (b, d)
            x = vectors[target]  # (b, K, d)

            alpha = np.maximum(1.0 - np.sum(u * u, axis=1), 1e-12)  # (b,)
            beta = np.maximum(1.0 - np.sum(x * x, axis=2), 1e-12)  # (b, K)
            diff = u[:, None, :] - x  # (b, K, d)
            delta = np.sum(diff * diff, axis=2)
            gamma = np.maximum(1.0 + 2.0 * delta / (alpha[:, None] * beta), 1.0 + 1e-15)
            dist = np.arccosh(gamma)

            logits = -dist
            logits -= logits.max(axis=1, keepdims=True)
            probs = np.exp(logits)
            probs /= probs.sum(axis=1, keepdims=True)
            # dL/d(dist): pull the positive pair together, push negatives apart
            coef = -probs
            coef[:, 0] += 1.0

            root = np.sqrt(np.maximum(gamma * gamma - 1.0, 1e-24))
            ux = np.einsum("bd,bkd->bk", u, x)
            xx = np.sum(x * x, axis=2)
            uu = np.sum(u * u, axis=1)

            # d(dist)/du and d(dist)/dx for every pair in the batch
            du_scale = 4.0 / (beta * root)
            grad_u_pairs = du_scale[:, :, None] * (
                ((xx - 2.0 * ux + 1.0) / (alpha[:, None] ** 2))[:, :, None] * u[:, None, :]
                - x / alpha[:, None, None]
            )
            dx_scale = 4.0 / (alpha[:, None] * root)
            grad_x_pairs = dx_scale[:, :, None] * (
                ((uu[:, None] - 2.0 * ux + 1.0) / (beta**2))[:, :, None] * x
                - u[:, None, :] / beta[:, :, None]
            )

            grad_u = np.einsum("bk,bkd->bd", coef, grad_u_pairs)
            grad_x = coef[:, :, None] * grad_x_pairs

            # Riemannian rescaling by the inverse metric at each point
            grad_u *= (alpha**2 / 4.0)[:, None]
            grad_x *= (beta**2 / 4.0)[:, :, None]

            np.add.at(vectors, u_idx, -lr_t * grad_u)
            np.add.at(vectors, target.reshape(-1), (-lr_t * grad_x).reshape(-1, dim))

            touched = np.unique(np.concatenate([u_idx, target.reshape(-1)]))
            _project(vectors, touched)
            max_norm = max(max_norm, float(np.max(np.linalg.norm(vectors[touched], axis=1))))
            if not np.isfinite(vectors[touched]).all():
                raise FloatingPointError("poincare training diverged")

    result.max_norm_seen = max_norm
    result.step_norms_ok = max_norm < 1.0
    return result
