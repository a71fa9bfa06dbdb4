"""Desk-scale synthetic transaction graphs with planted illicit nodes.

A planted-partition graph whose first block holds every illicit node; illicit
pairs attach with boosted probability, so illicit nodes form a denser
subcommunity.  Exactly ``round(label_frequency * n_illicit)`` illicit nodes
are labeled, chosen uniformly at random: the label mechanism is completely
random by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .graph import LabelStore, TransactionGraph
from .seeding import derive_rng


@dataclass
class SyntheticSpec:
    n_nodes: int = 2000
    n_illicit: int = 100
    n_blocks: int = 4
    p_in: float = 0.012
    p_out: float = 0.0006
    illicit_bias: float = 3.0
    label_frequency: float = 1.0

    def __post_init__(self):
        if self.n_illicit >= self.n_nodes:
            raise ConfigurationError("n_illicit must be smaller than n_nodes")
        if self.n_blocks < 1:
            raise ConfigurationError("n_blocks must be >= 1")
        if not 0.0 < self.label_frequency <= 1.0:
            raise ConfigurationError(f"label_frequency must be in (0, 1], got {self.label_frequency}")
        for name, p in (("p_in", self.p_in), ("p_out", self.p_out)):
            if not 0.0 <= p <= 1.0:
                raise ConfigurationError(f"{name} must be a probability, got {p}")
        if self.illicit_bias < 0 or self.p_in * self.illicit_bias > 1.0:
            raise ConfigurationError(
                f"infeasible illicit edge probability p_in * illicit_bias = {self.p_in * self.illicit_bias}"
            )
        if self.n_illicit > self.n_nodes // self.n_blocks + self.n_nodes % self.n_blocks:
            raise ConfigurationError("first block is too small to hold every illicit node")


def _block_assignment(spec):
    base = spec.n_nodes // spec.n_blocks
    sizes = [base + (1 if b < spec.n_nodes % spec.n_blocks else 0) for b in range(spec.n_blocks)]
    blocks = np.repeat(np.arange(spec.n_blocks), sizes)
    return blocks, np.cumsum([0] + sizes)


def generate_synthetic(spec: SyntheticSpec, rng_seed: int):
    """Graph plus label store with full truth and uniformly labeled positives."""
    rng = derive_rng(rng_seed, "synthetic-graph")
    blocks, offsets = _block_assignment(spec)
    n = spec.n_nodes
    illicit = np.zeros(n, dtype=bool)
    illicit[: spec.n_illicit] = True  # nodes 0..n_illicit-1 live in block 0

    src_parts, dst_parts = [], []

    def bernoulli_pairs(rows, cols, prob, triangular):
        if prob <= 0.0 or len(rows) == 0 or len(cols) == 0:
            return
        mask = rng.random((len(rows), len(cols))) < prob
        if triangular:
            mask = np.triu(mask, k=1)
        r_idx, c_idx = np.nonzero(mask)
        src_parts.append(rows[r_idx])
        dst_parts.append(cols[c_idx])

    p_illicit = min(1.0, spec.p_in * spec.illicit_bias)
    ill_nodes = np.arange(spec.n_illicit)
    block0 = np.arange(offsets[0], offsets[1])
    normal0 = block0[~illicit[block0]]

    bernoulli_pairs(ill_nodes, ill_nodes, p_illicit, triangular=True)
    bernoulli_pairs(ill_nodes, normal0, spec.p_in, triangular=False)
    bernoulli_pairs(normal0, normal0, spec.p_in, triangular=True)
    for b in range(1, spec.n_blocks):
        members = np.arange(offsets[b], offsets[b + 1])
        bernoulli_pairs(members, members, spec.p_in, triangular=True)
    for a in range(spec.n_blocks):
        for b in range(a + 1, spec.n_blocks):
            bernoulli_pairs(
                np.arange(offsets[a], offsets[a + 1]),
                np.arange(offsets[b], offsets[b + 1]),
                spec.p_out,
                triangular=False,
            )

    if src_parts:
        src = np.concatenate(src_parts)
        dst = np.concatenate(dst_parts)
    else:
        src = dst = np.empty(0, dtype=np.int64)
    graph = TransactionGraph(
        src,
        dst,
        np.ones(len(src)),
        [f"n{i}" for i in range(n)],
        directed=False,
        tag="synthetic",
    )

    truth = illicit.astype(np.int8)
    observed = np.zeros(n, dtype=np.int8)
    n_labeled = int(round(spec.label_frequency * spec.n_illicit))
    label_rng = derive_rng(rng_seed, "synthetic-labels")
    chosen = label_rng.choice(spec.n_illicit, size=n_labeled, replace=False)
    observed[chosen] = 1
    return graph, LabelStore(observed=observed, truth=truth)
