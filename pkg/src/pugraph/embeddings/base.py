"""Embedding container, concatenation, and CSV export/import."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np


@dataclass
class EmbeddingMatrix:
    """One fixed-length real vector per graph node.

    ``vectors`` is indexed by dense node id; ``node_ids`` carries the matching
    external ids so matrices from different runs can be aligned.
    """

    vectors: np.ndarray
    method_tag: str
    node_ids: list[str]

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2:
            raise ValueError("vectors must be 2-d")
        if len(self.node_ids) != self.vectors.shape[0]:
            raise ValueError("node_ids and vectors disagree on node count")
        if not np.all(np.isfinite(self.vectors)):
            raise ValueError(f"{self.method_tag}: embedding contains NaN or Inf")

    @property
    def dim(self):
        return self.vectors.shape[1]

    @property
    def node_count(self):
        return self.vectors.shape[0]

    def vector(self, node):
        return self.vectors[node]


def concat_embeddings(a: EmbeddingMatrix, b: EmbeddingMatrix) -> EmbeddingMatrix:
    """Concatenate two embeddings of the same node set along the feature axis."""
    if set(a.node_ids) != set(b.node_ids):
        only_a = sorted(set(a.node_ids) - set(b.node_ids))
        only_b = sorted(set(b.node_ids) - set(a.node_ids))
        raise ValueError(f"node sets differ: only in first={only_a[:10]}, only in second={only_b[:10]}")
    if a.node_ids == b.node_ids:
        b_aligned = b.vectors
    else:
        index = {ext: i for i, ext in enumerate(b.node_ids)}
        b_aligned = b.vectors[[index[ext] for ext in a.node_ids]]
    return EmbeddingMatrix(
        vectors=np.hstack([a.vectors, b_aligned]),
        method_tag=f"{a.method_tag}+{b.method_tag}",
        node_ids=list(a.node_ids),
    )


def write_embedding_csv(embedding: EmbeddingMatrix, path):
    """CSV with header ``node_id,e0..e{d-1}`` plus a ``.meta.json`` sidecar."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_id"] + [f"e{i}" for i in range(embedding.dim)])
        for ext, row in zip(embedding.node_ids, embedding.vectors):
            writer.writerow([ext] + [repr(float(v)) for v in row])
    with open(str(path) + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump({"method_tag": embedding.method_tag, "dim": embedding.dim}, fh)


def read_embedding_csv(path):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        dim = len(header) - 1
        node_ids, rows = [], []
        for row in reader:
            node_ids.append(row[0])
            rows.append([float(v) for v in row[1:]])
    try:
        with open(str(path) + ".meta.json", "r", encoding="utf-8") as fh:
            tag = json.load(fh)["method_tag"]
    except FileNotFoundError:
        tag = "imported"
    vectors = np.array(rows, dtype=np.float64).reshape(len(node_ids), dim)
    return EmbeddingMatrix(vectors=vectors, method_tag=tag, node_ids=node_ids)
