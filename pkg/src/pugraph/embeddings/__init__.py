"""Node-embedding trainers sharing the EmbeddingMatrix contract."""

from .base import EmbeddingMatrix, concat_embeddings, read_embedding_csv, write_embedding_csv
from .mnmf import MnmfFactors, fit_mnmf_factors, train_mnmf
from .node2vec import train_node2vec
from .poincare import BALL_EPS, PoincareEmbedding, poincare_distance, train_poincare
from .role2vec import structural_roles, train_role2vec, triangle_counts
from .skipgram import train_skipgram
from .walks import WalkConfig, generate_walks

__all__ = [
    "BALL_EPS",
    "EmbeddingMatrix",
    "MnmfFactors",
    "PoincareEmbedding",
    "WalkConfig",
    "concat_embeddings",
    "fit_mnmf_factors",
    "generate_walks",
    "poincare_distance",
    "read_embedding_csv",
    "structural_roles",
    "train_mnmf",
    "train_node2vec",
    "train_poincare",
    "train_role2vec",
    "train_skipgram",
    "triangle_counts",
    "write_embedding_csv",
]
