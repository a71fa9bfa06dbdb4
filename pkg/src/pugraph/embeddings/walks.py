"""Second-order (biased) random walks over the undirected adjacency.

Transition weights follow the return/in-out scheme: from the previous node
``t`` standing at ``cur``, an edge to ``x`` gets weight/p when ``x == t``,
weight when ``x`` neighbors ``t``, and weight/q otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError
from ..seeding import derive_rng


@dataclass
class WalkConfig:
    p: float = 1.0
    q: float = 1.0
    walk_length: int = 5
    walks_per_node: int = 10
    rng_seed: int = 0

    def __post_init__(self):
        if self.p <= 0 or self.q <= 0:
            raise ConfigurationError(f"p and q must be positive, got p={self.p}, q={self.q}")
        if self.walk_length < 1:
            raise ConfigurationError("walk_length must be >= 1")
        if self.walks_per_node < 1:
            raise ConfigurationError("walks_per_node must be >= 1")


def _step(rng, weights):
    cum = np.cumsum(weights)
    return int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))


def generate_walks(graph, cfg: WalkConfig):
    """``walks_per_node`` walks from every node, each at most ``walk_length`` nodes.

    Walks stop early at neighborless nodes, so isolated nodes produce
    single-node walks.  Per-node child seeds make the corpus independent of
    the iteration order over start nodes.
    """
    if graph.node_count == 0:
        raise ConfigurationError("cannot walk an empty graph")
    walks = []
    inv_p = 1.0 / cfg.p
    inv_q = 1.0 / cfg.q
    for start in range(graph.node_count):
        rng = derive_rng(cfg.rng_seed, "walk", start)
        for _ in range(cfg.walks_per_node):
            walk = [start]
            while len(walk) < cfg.walk_length:
                cur = walk[-1]
                nbrs, wts = graph.neighbors(cur)
                if len(nbrs) == 0:
                    break
                if len(walk) == 1:
                    probs = wts
                else:
                    prev = walk[-2]
                    prev_nbrs, _ = graph.neighbors(prev)
                    factor = np.full(len(nbrs), inv_q)
                    factor[np.isin(nbrs, prev_nbrs, assume_unique=True)] = 1.0
                    factor[nbrs == prev] = inv_p
                    probs = wts * factor
                walk.append(int(nbrs[_step(rng, probs)]))
            walks.append(walk)
    return walks
