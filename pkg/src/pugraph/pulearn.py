"""PU classifiers: score rescaling, unlabeled-subsample bagging, unbiased risk.

All fits consume only ``(features, observed)``; true labels, when a dataset
carries them, are evaluation-only and never read here.
"""

from __future__ import annotations

import numpy as np

from .classifiers import ScoredModel, _sigmoid, _Standardizer, linear_svm_trainer, logreg_trainer
from .dataset import PuDataset
from .errors import CalibrationError, ConfigurationError, DegenerateDataError, SamplingError
from .seeding import derive_rng, derive_seed


def double_hinge(z):
    """Composite convex loss ``max(-z, max(0, (1 - z) / 2))``.

    Satisfies ``loss(z) - loss(-z) == -z``, which removes the bias term from
    the PU risk estimate.
    """
    z = np.asarray(z, dtype=np.float64)
    return np.maximum(-z, np.maximum(0.0, (1.0 - z) / 2.0))


def pu_risk(margins_positive, margins_unlabeled, prior):
    """Unbiased PU risk of a decision function from its raw margins.

    ``prior * mean_P[l(g)] - prior * mean_P[l(-g)] + mean_U[l(-g)]`` with the
    double hinge; the first two terms reduce to ``-prior * mean_P[g]``.
    """
    gp = np.asarray(margins_positive, dtype=np.float64)
    gu = np.asarray(margins_unlabeled, dtype=np.float64)
    return float(
        prior * np.mean(double_hinge(gp))
        - prior * np.mean(double_hinge(-gp))
        + np.mean(double_hinge(-gu))
    )


class ElkanotoModel(ScoredModel):
    """Base classifier for the observed label, rescaled by the label frequency.

    The adapted score ``min(1, base_score / label_freq)`` estimates the true
    positive-class probability; it is a monotone transform of the base score,
    so rankings are preserved.
    """

    kind = "elkanoto"

    def __init__(self, base, label_freq):
        super().__init__()
        if not 0.0 < label_freq <= 1.0:
            raise ConfigurationError(f"label frequency must be in (0, 1], got {label_freq}")
        self.base = base
        self.label_freq = float(label_freq)
        self.n_features = base.n_features

    def scores(self, features):
        return np.minimum(1.0, self.base.scores(features) / self.label_freq)


def fit_elkanoto(data, base_trainer=None, holdout_fraction=0.2, rng_seed=0):
    """Fit a base model on PU labels and estimate the label frequency.

    A stratified holdout is excluded from the base fit; the label-frequency
    estimate is the mean base score over the holdout's labeled positives
    (the e1 estimator).
    """
    if not isinstance(data, PuDataset):
        raise TypeError("expected a PuDataset")
    if base_trainer is None:
        base_trainer = logreg_trainer()
    if not 0.0 < holdout_fraction < 1.0:
        raise ConfigurationError("holdout_fraction must be in (0, 1)")
    rng = derive_rng(rng_seed, "elkanoto-holdout")
    holdout_parts = []
    for cls in (0, 1):
        rows = np.flatnonzero(data.observed == cls)
        rows = rows[rng.permutation(len(rows))]
        holdout_parts.append(rows[: int(round(holdout_fraction * len(rows)))])
    holdout = np.sort(np.concatenate(holdout_parts))
    holdout_positives = holdout[data.observed[holdout] == 1]
    if len(holdout_positives) < 5:
        raise DegenerateDataError(
            f"need at least 5 labeled positives in the holdout, got {len(holdout_positives)}"
        )
    mask = np.ones(len(data), dtype=bool)
    mask[holdout] = False
    base = base_trainer(data.features[mask], data.observed[mask], derive_seed(rng_seed, "elkanoto-base"))
    label_freq = float(np.mean(base.scores(data.features[holdout_positives])))
    if label_freq <= 0.0:
        raise CalibrationError("all holdout positives scored 0; label frequency cannot be estimated")
    return ElkanotoModel(base, min(1.0, label_freq))


class BaggingPuModel(ScoredModel):
    """Ensemble of biased fits on the positives plus unlabeled subsamples.

    ``oob_scores`` aggregates, for each training row, the member scores from
    rounds that did not sample it (NaN for labeled positives, which every
    round uses).
    """

    kind = "bagging_pu"

    def __init__(self, members, oob_scores, rounds, sample_size):
        super().__init__()
        self.members = members
        self.oob_scores = oob_scores
        self.rounds = rounds
        self.sample_size = sample_size
        self.n_features = members[0].n_features

    def scores(self, features):
        total = np.zeros(np.asarray(features).shape[0])
        for member in self.members:
            total += member.scores(features)
        return total / len(self.members)


def fit_bagging_pu(data, base_trainer=None, rounds=100, sample_size=None, replace=True, rng_seed=0):
    """Bagging over unlabeled subsamples treated as provisional negatives.

    Each round draws ``sample_size`` unlabeled rows (with replacement by
    default), fits the base trainer on positives vs. the draw, and scores the
    out-of-bag unlabeled rows.
    """
    if not isinstance(data, PuDataset):
        raise TypeError("expected a PuDataset")
    if base_trainer is None:
        base_trainer = linear_svm_trainer()
    if rounds < 1:
        raise ConfigurationError("rounds must be >= 1")
    positives = np.flatnonzero(data.observed == 1)
    unlabeled = np.flatnonzero(data.observed == 0)
    if len(positives) == 0:
        raise DegenerateDataError("bagging needs at least one labeled positive")
    if len(unlabeled) == 0:
        raise DegenerateDataError("bagging needs at least one unlabeled example")
    if sample_size is None:
        sample_size = len(positives)
    if sample_size > len(unlabeled) and not replace:
        raise SamplingError(
            f"cannot draw {sample_size} of {len(unlabeled)} unlabeled rows without replacement"
        )

    x_pos = data.features[positives]
    x_unl = data.features[unlabeled]
    members = []
    oob_sum = np.zeros(len(unlabeled))
    oob_count = np.zeros(len(unlabeled))
    all_sum = np.zeros(len(unlabeled))
    for t in range(rounds):
        rng = derive_rng(rng_seed, "bagging-draw", t)
        draw = np.sort(rng.choice(len(unlabeled), size=sample_size, replace=replace))
        bag_x = np.vstack([x_pos, x_unl[draw]])
        bag_labels = np.concatenate([np.ones(len(positives), dtype=np.int8), np.zeros(sample_size, dtype=np.int8)])
        member = base_trainer(bag_x, bag_labels, derive_seed(rng_seed, "bagging-fit", t))
        members.append(member)
        scores_u = member.scores(x_unl)
        in_bag = np.zeros(len(unlabeled), dtype=bool)
        in_bag[draw] = True
        oob_sum[~in_bag] += scores_u[~in_bag]
        oob_count[~in_bag] += 1
        all_sum += scores_u

    with np.errstate(invalid="ignore"):
        oob_unlabeled = np.where(oob_count > 0, oob_sum / np.maximum(oob_count, 1), all_sum / rounds)
    oob_scores = np.full(len(data), np.nan)
    oob_scores[unlabeled] = oob_unlabeled
    return BaggingPuModel(members, oob_scores, rounds, sample_size)


class UpuModel(ScoredModel):
    """Linear decision function minimizing the unbiased PU risk.

    ``objective_history`` logs the regularized risk once per epoch; the
    backtracking step size makes the log non-increasing.
    """

    kind = "upu"

    def __init__(self, weights, bias, scaler, prior, objective_history):
        super().__init__()
        self.weights = weights
        self.bias = bias
        self.scaler = scaler
        self.prior = prior
        self.objective_history = objective_history
        self.n_features = len(weights)

    def raw_margin(self, features):
        features = self._check_features(features)
        return self.scaler.apply(features) @ self.weights + self.bias

    def scores(self, features):
        return _sigmoid(self.raw_margin(features))


def _upu_objective_and_grad(x_pos, x_unl, w, b, prior, l2):
    gp = x_pos @ w + b
    gu = x_unl @ w + b
    risk = pu_risk(gp, gu, prior)
    objective = risk + 0.5 * l2 * float(w @ w)
    # d/dg of double_hinge(-g): 1 for g > 1, 1/2 for -1 <= g <= 1, 0 below
    coef_u = np.where(gu > 1.0, 1.0, np.where(gu >= -1.0, 0.5, 0.0)) / len(gu)
    grad_w = -prior * x_pos.mean(axis=0) + x_unl.T @ coef_u + l2 * w
    grad_b = -prior + float(coef_u.sum())
    return objective, grad_w, grad_b


def fit_upu(data, prior=None, epochs=200, lr=0.5, l2=1e-4, rng_seed=0):
    """Gradient descent on the unbiased PU risk with the double hinge.

    ``prior`` defaults to :func:`estimate_class_prior`; pass it explicitly
    when the class prior is known.
    """
    if not isinstance(data, PuDataset):
        raise TypeError("expected a PuDataset")
    if prior is None:
        # estimated priors can clip to 1.0 on weakly separable features; keep
        # the unattended path inside the open interval the risk needs
        prior = min(max(estimate_class_prior(data, rng_seed=rng_seed), 0.02), 0.98)
    if not 0.0 < prior < 1.0:
        raise ConfigurationError(f"class prior must be in (0, 1), got {prior}")
    if epochs < 1:
        raise ConfigurationError("epochs must be >= 1")
    if lr <= 0:
        raise ConfigurationError("lr must be positive")
    positives = np.flatnonzero(data.observed == 1)
    unlabeled = np.flatnonzero(data.observed == 0)
    if len(positives) == 0 or len(unlabeled) == 0:
        raise DegenerateDataError("uPU needs at least one positive and one unlabeled example")

    scaler = _Standardizer().fit(data.features)
    x = scaler.apply(data.features)
    x_pos, x_unl = x[positives], x[unlabeled]
    w = np.zeros(x.shape[1])
    b = 0.0
    history = []
    step = float(lr)
    objective, grad_w, grad_b = _upu_objective_and_grad(x_pos, x_unl, w, b, prior, l2)
    for _ in range(epochs):
        for _ in range(40):
            w_new = w - step * grad_w
            b_new = b - step * grad_b
            candidate = _upu_objective_and_grad(x_pos, x_unl, w_new, b_new, prior, l2)
            if candidate[0] <= objective:
                break
            step /= 2.0
        else:
            history.append(objective)
            continue
        w, b = w_new, b_new
        objective, grad_w, grad_b = candidate
        history.append(objective)
    return UpuModel(w, b, scaler, float(prior), np.array(history))


def estimate_class_prior(data, base_trainer=None, holdout_fraction=0.2, rng_seed=0):
    """Class-prior estimate: labeled fraction over the label frequency.

    Uses the Elkan-Noto label-frequency estimate; result is clipped into
    ``(0, 1]``.
    """
    adapted = fit_elkanoto(data, base_trainer=base_trainer, holdout_fraction=holdout_fraction, rng_seed=rng_seed)
    labeled_fraction = float(np.mean(data.observed == 1))
    return float(min(1.0, labeled_fraction / adapted.label_freq))
