"""Feature/label container passed between embedding, training, and evaluation."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np


@dataclass
class PuDataset:
    """Feature matrix with observed labels and optional ground truth.

    ``observed`` is what a model may train on; ``truth`` exists only for
    engineered or synthetic data and is read exclusively by evaluation code.
    """

    features: np.ndarray
    observed: np.ndarray
    truth: np.ndarray | None = None
    split_tag: str = "none"

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.features.ndim != 2:
            raise ValueError("features must be a 2-d matrix")
        self.observed = np.asarray(self.observed, dtype=np.int8)
        if len(self.observed) != self.features.shape[0]:
            raise ValueError("features and observed labels disagree on row count")
        if self.truth is not None:
            self.truth = np.asarray(self.truth, dtype=np.int8)
            if len(self.truth) != len(self.observed):
                raise ValueError("truth labels disagree on row count")
            if np.any((self.observed == 1) & (self.truth != 1)):
                raise ValueError("observed positive with truth != 1")

    def __len__(self):
        return self.features.shape[0]

    def subset(self, index, split_tag=None):
        """Row subset (keeps truth when present)."""
        index = np.asarray(index)
        return PuDataset(
            features=self.features[index],
            observed=self.observed[index],
            truth=None if self.truth is None else self.truth[index],
            split_tag=self.split_tag if split_tag is None else split_tag,
        )

    def with_observed(self, observed):
        return replace(self, observed=np.asarray(observed, dtype=np.int8))


def train_test_split(data: PuDataset, train_fraction: float, rng) -> tuple[PuDataset, PuDataset, np.ndarray, np.ndarray]:
    """80/20-style split stratified by the observed label.

    Returns ``(train, test, train_idx, test_idx)``; the index arrays refer to
    rows of ``data``.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    train_parts, test_parts = [], []
    for cls in (0, 1):
        rows = np.flatnonzero(data.observed == cls)
        rows = rows[rng.permutation(len(rows))]
        cut = int(round(train_fraction * len(rows)))
        train_parts.append(rows[:cut])
        test_parts.append(rows[cut:])
    train_idx = np.sort(np.concatenate(train_parts))
    test_idx = np.sort(np.concatenate(test_parts))
    return (
        data.subset(train_idx, split_tag="train"),
        data.subset(test_idx, split_tag="test"),
        train_idx,
        test_idx,
    )
