"""PU-learning toolkit for illicit-node detection in transaction graphs."""

__version__ = "0.1.0"

from .dataset import PuDataset, train_test_split
from .graph import (
    LabelStore,
    SubnetworkSample,
    TransactionGraph,
    load_edge_list,
    load_labels,
    sample_subnetwork,
)
from .metrics import MetricsReport, estimated_vs_defacto, puf1, standard_metrics
from .synthetic import SyntheticSpec, generate_synthetic

__all__ = [
    "LabelStore",
    "MetricsReport",
    "PuDataset",
    "SubnetworkSample",
    "SyntheticSpec",
    "TransactionGraph",
    "__version__",
    "estimated_vs_defacto",
    "generate_synthetic",
    "load_edge_list",
    "load_labels",
    "puf1",
    "sample_subnetwork",
    "standard_metrics",
    "train_test_split",
]
