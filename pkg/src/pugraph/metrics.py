"""Standard and PU-aware evaluation metrics.

Besides precision/recall/F1 against a chosen reference labeling, this module
provides the PU-estimable F1 surrogate (recall squared over the positive
prediction rate) and paired reporting against observed vs. true labels for
engineered datasets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MetricError


@dataclass
class MetricsReport:
    precision: float
    recall: float
    f1: float
    puf1: float
    positive_prediction_rate: float
    variant: str
    tp: int
    fp: int
    tn: int
    fn: int

    METRIC_NAMES = ("precision", "recall", "f1", "puf1")

    def value(self, metric):
        return getattr(self, metric)

    def as_dict(self):
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "puf1": self.puf1,
            "positive_prediction_rate": self.positive_prediction_rate,
            "variant": self.variant,
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
        }


def _as_binary(arr, name):
    arr = np.asarray(arr)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-d")
    return arr.astype(np.int8)


def standard_metrics(predictions, reference_labels, variant="estimated"):
    """Confusion counts plus precision/recall/F1 against ``reference_labels``.

    Precision is defined as 0 when nothing is predicted positive, keeping
    report tables NaN-free.
    """
    predictions = _as_binary(predictions, "predictions")
    reference = _as_binary(reference_labels, "reference_labels")
    if len(predictions) != len(reference):
        raise ValueError(f"length mismatch: {len(predictions)} predictions vs {len(reference)} labels")
    tp = int(np.sum((predictions == 1) & (reference == 1)))
    fp = int(np.sum((predictions == 1) & (reference == 0)))
    fn = int(np.sum((predictions == 0) & (reference == 1)))
    tn = int(np.sum((predictions == 0) & (reference == 0)))
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    rate = (tp + fp) / len(predictions) if len(predictions) else 0.0
    return MetricsReport(
        precision=precision,
        recall=recall,
        f1=f1,
        puf1=_puf1_from_parts(recall, rate),
        positive_prediction_rate=rate,
        variant=variant,
        tp=tp,
        fp=fp,
        tn=tn,
        fn=fn,
    )


def _puf1_from_parts(recall_on_labeled, positive_rate):
    if positive_rate <= 0.0:
        return 0.0
    return recall_on_labeled**2 / positive_rate


def puf1(predictions, observed):
    """Recall-on-labeled squared over the positive prediction rate.

    The recall estimate uses only the labeled positives, so the value is
    computable from PU data alone; it rewards high recall and punishes
    indiscriminate positive prediction.
    """
    predictions = _as_binary(predictions, "predictions")
    observed = _as_binary(observed, "observed")
    if len(predictions) != len(observed):
        raise ValueError(f"length mismatch: {len(predictions)} predictions vs {len(observed)} labels")
    if len(predictions) == 0:
        raise MetricError("puf1 needs at least one prediction")
    labeled = observed == 1
    if not np.any(labeled):
        raise MetricError("puf1 is undefined without labeled positives")
    recall_on_labeled = float(np.mean(predictions[labeled] == 1))
    positive_rate = float(np.mean(predictions == 1))
    return _puf1_from_parts(recall_on_labeled, positive_rate)


def estimated_vs_defacto(predictions, observed, truth):
    """Paired reports: metrics against observed labels and against truth.

    The estimated report treats hidden positives as negatives (what one would
    compute on real PU data); the defacto report uses the true labels.
    """
    if truth is None:
        raise ValueError("defacto metrics need truth labels")
    estimated = standard_metrics(predictions, observed, variant="estimated")
    defacto = standard_metrics(predictions, truth, variant="defacto")
    return estimated, defacto
