"""Community-preserving embedding by modularized nonnegative factorization.

Minimizes ``|S - M U^T|^2 + alpha |H - U C^T|^2 - beta tr(H^T B H)`` over
nonnegative factors, where S mixes first- and second-order proximity and B is
the modularity matrix.  The community indicator H carries a trace penalty
(weight ``trace_penalty``) that pins ``tr(H^T H)`` near the node count;
without it the modularity term is unbounded below.  Factors from the
best-objective iteration are returned, with the objective log truncated at
that iteration, so the logged objective never ends above its start.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError
from ..seeding import derive_rng
from .base import EmbeddingMatrix

_EPS = 1e-12


@dataclass
class MnmfFactors:
    embedding: EmbeddingMatrix
    community_membership: np.ndarray
    basis: np.ndarray
    community_centers: np.ndarray
    objective_history: np.ndarray

    def communities(self):
        return np.argmax(self.community_membership, axis=1)


def _proximity_matrix(graph, eta):
    n = graph.node_count
    adj = np.zeros((n, n))
    adj[graph.und_u, graph.und_v] = graph.und_w
    adj[graph.und_v, graph.und_u] = graph.und_w
    row_norms = np.linalg.norm(adj, axis=1)
    safe = np.where(row_norms == 0.0, 1.0, row_norms)
    normalized = adj / safe[:, None]
    second_order = normalized @ normalized.T
    np.fill_diagonal(second_order, 0.0)
    return adj, adj + eta * second_order


def fit_mnmf_factors(
    graph,
    dim=64,
    communities=8,
    alpha=1.0,
    beta=1.0,
    eta=5.0,
    iterations=100,
    trace_penalty=None,
    rng_seed=0,
):
    if communities < 2:
        raise ConfigurationError(f"communities must be >= 2, got {communities}")
    if dim < 1:
        raise ConfigurationError("embedding dim must be >= 1")
    if graph.edge_count == 0:
        raise ConfigurationError("modularity matrix needs at least one edge")
    n = graph.node_count
    adj, prox = _proximity_matrix(graph, eta)
    degrees = adj.sum(axis=1)
    two_m = degrees.sum()
    # needs 4*lam > 2*alpha so the auxiliary quadratic stays nonnegative
    lam = float(trace_penalty) if trace_penalty is not None else max(float(alpha), 0.2)

    rng = derive_rng(rng_seed, "mnmf")
    m_basis = rng.random((n, dim))
    u_embed = rng.random((n, dim))
    c_centers = rng.random((communities, dim))
    h_member = rng.random((n, communities))

    def objective(m, u, c, h):
        recon = prox - m @ u.T
        fit_term = float(np.sum(recon * recon))
        comm = h - u @ c.T
        comm_term = float(np.sum(comm * comm))
        modularity = float(np.sum(h * (adj @ h)) - np.sum((degrees @ h) ** 2) / two_m)
        return fit_term + alpha * comm_term - beta * modularity

    history = [objective(m_basis, u_embed, c_centers, h_member)]
    best = (history[0], 0, (m_basis.copy(), u_embed.copy(), c_centers.copy(), h_member.copy()))
    for it in range(1, iterations + 1):
        m_basis *= (prox @ u_embed) / np.maximum(m_basis @ (u_embed.T @ u_embed), _EPS)
        u_embed *= (prox.T @ m_basis + alpha * h_member @ c_centers) / np.maximum(
            u_embed @ (m_basis.T @ m_basis + alpha * c_centers.T @ c_centers), _EPS
        )
        c_centers *= (h_member.T @ u_embed) / np.maximum(c_centers @ (u_embed.T @ u_embed), _EPS)

        ah = adj @ h_member
        degree_mix = np.outer(degrees, degrees @ h_member) / two_m
        hhh = h_member @ (h_member.T @ h_member)
        uc = u_embed @ c_centers.T
        inner = 2.0 * beta * ah + 2.0 * alpha * uc + (4.0 * lam - 2.0 * alpha) * h_member
        discriminant = np.maximum((2.0 * beta * degree_mix) ** 2 + 16.0 * lam * hhh * inner, 0.0)
        ratio = np.maximum(
            (-2.0 * beta * degree_mix + np.sqrt(discriminant)) / np.maximum(8.0 * lam * hhh, _EPS),
            0.0,
        )
        h_member *= np.sqrt(ratio)

        value = objective(m_basis, u_embed, c_centers, h_member)
        history.append(value)
        if value < best[0]:
            best = (value, it, (m_basis.copy(), u_embed.copy(), c_centers.copy(), h_member.copy()))

    _, best_it, (m_basis, u_embed, c_centers, h_member) = best
    return MnmfFactors(
        embedding=EmbeddingMatrix(u_embed, "mnmf", list(graph.external_ids)),
        community_membership=h_member,
        basis=m_basis,
        community_centers=c_centers,
        objective_history=np.array(history[: best_it + 1]),
    )


def train_mnmf(graph, dim=64, communities=8, alpha=1.0, beta=1.0, eta=5.0, iterations=100, trace_penalty=None, rng_seed=0):
    """Embedding rows from the community-preserving factorization."""
    return fit_mnmf_factors(
        graph,
        dim=dim,
        communities=communities,
        alpha=alpha,
        beta=beta,
        eta=eta,
        iterations=iterations,
        trace_penalty=trace_penalty,
        rng_seed=rng_seed,
    ).embedding
