"""Baseline supervised models sharing one scored-classifier contract.

Every fitted model exposes ``scores(X) -> [0, 1]`` so PU wrappers and the
benchmark harness can treat base classifiers and PU adaptations uniformly.
Implementations are deliberately plain numpy: deterministic given a seed and
cheap to refit many times inside bagging rounds.
"""

from __future__ import annotations

import json

import numpy as np

from .dataset import PuDataset
from .errors import ConfigurationError, DegenerateDataError
from .seeding import derive_rng

MODEL_FORMAT_VERSION = 1


def _sigmoid(z):
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _check_two_classes(labels):
    labels = np.asarray(labels).astype(np.int8)
    if labels.ndim != 1:
        raise ValueError("labels must be 1-d")
    if not (np.any(labels == 1) and np.any(labels == 0)):
        raise DegenerateDataError("training labels contain a single class")
    return labels


class ScoredModel:
    """Fitted classifier with a positive-class score in [0, 1]."""

    kind = "scored"

    def __init__(self):
        self.n_features = None

    def scores(self, features):
        raise NotImplementedError

    def _check_features(self, features):
        features = np.asarray(features, dtype=np.float64)
        if features.ndim == 1:
            features = features.reshape(1, -1)
        if self.n_features is not None and features.shape[1] != self.n_features:
            raise ValueError(f"feature dim mismatch: model expects {self.n_features}, got {features.shape[1]}")
        return features


def predict(model, features, threshold=0.5):
    """Scores plus thresholded labels; deterministic for a fitted model."""
    features = np.asarray(features, dtype=np.float64)
    if features.size == 0:
        features = features.reshape(0, model.n_features or 0)
        return np.empty(0), np.empty(0, dtype=np.int8)
    scores = model.scores(features)
    return scores, (scores >= threshold).astype(np.int8)


class _Standardizer:
    """Column-wise zero-mean unit-variance transform (constant columns pass through)."""

    def fit(self, features):
        self.mean = features.mean(axis=0)
        std = features.std(axis=0)
        std[std == 0.0] = 1.0
        self.std = std
        return self

    def apply(self, features):
        return (features - self.mean) / self.std

    def to_dict(self):
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, payload):
        out = cls()
        out.mean = np.array(payload["mean"], dtype=np.float64)
        out.std = np.array(payload["std"], dtype=np.float64)
        return out


def _lr_schedule(base_lr, step, total_steps):
    return base_lr * max(0.01, 1.0 - step / max(1, total_steps))


class LogisticRegressionSgd(ScoredModel):
    """L2-regularized logistic regression trained by minibatch SGD."""

    kind = "logreg"

    def __init__(self, l2=1e-4, epochs=100, lr=0.1, batch_size=32, rng_seed=0):
        super().__init__()
        if epochs < 1:
            raise ConfigurationError("epochs must be >= 1")
        if lr <= 0:
            raise ConfigurationError("lr must be positive")
        if l2 < 0:
            raise ConfigurationError("l2 must be nonnegative")
        self.l2 = float(l2)
        self.epochs = int(epochs)
        self.lr = float(lr)
        self.batch_size = int(batch_size)
        self.rng_seed = int(rng_seed)

    def fit(self, features, labels):
        features = np.asarray(features, dtype=np.float64)
        labels = _check_two_classes(labels)
        n, d = features.shape
        self.n_features = d
        self.scaler = _Standardizer().fit(features)
        x = self.scaler.apply(features)
        t = labels.astype(np.float64)
        rng = derive_rng(self.rng_seed, "logreg")
        w = np.zeros(d)
        b = 0.0
        steps_per_epoch = (n + self.batch_size - 1) // self.batch_size
        total = self.epochs * steps_per_epoch
        step = 0
        for _ in range(self.epochs):
            order = rng.permutation(n)
            for start in range(0, n, self.batch_size):
                rows = order[start:start + self.batch_size]
                z = x[rows] @ w + b
                err = _sigmoid(z) - t[rows]
                lr_t = _lr_schedule(self.lr, step, total)
                w -= lr_t * (x[rows].T @ err / len(rows) + self.l2 * w)
                b -= lr_t * float(err.mean())
                step += 1
        self.weights = w
        self.bias = b
        return self

    def scores(self, features):
        features = self._check_features(features)
        return _sigmoid(self.scaler.apply(features) @ self.weights + self.bias)

    def to_dict(self):
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "kind": self.kind,
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "scaler": self.scaler.to_dict(),
        }

    @classmethod
    def from_dict(cls, payload):
        model = cls()
        model.weights = np.array(payload["weights"], dtype=np.float64)
        model.bias = float(payload["bias"])
        model.scaler = _Standardizer.from_dict(payload["scaler"])
        model.n_features = len(model.weights)
        return model


def _fit_platt(margins, labels, iterations=200):
    """1-d logistic fit mapping margins to probabilities (Newton steps)."""
    a, b = 1.0, 0.0
    t = labels.astype(np.float64)
    for _ in range(iterations):
        p = _sigmoid(a * margins + b)
        grad_a = float(np.mean((p - t) * margins))
        grad_b = float(np.mean(p - t))
        wdiag = np.maximum(p * (1 - p), 1e-12)
        haa = float(np.mean(wdiag * margins * margins)) + 1e-9
        hbb = float(np.mean(wdiag)) + 1e-9
        a -= grad_a / haa
        b -= grad_b / hbb
        if abs(grad_a) < 1e-10 and abs(grad_b) < 1e-10:
            break
    return a, b


class LinearSvm(ScoredModel):
    """Hinge-loss linear model via subgradient descent, Platt-calibrated.

    A 20% stratified slice of the training data is held in for fitting the
    score->probability sigmoid so PU wrappers can treat scores as
    probabilities.
    """

    kind = "linear_svm"

    def __init__(self, c_reg=1.0, epochs=50, lr=0.1, batch_size=32, calibration_fraction=0.2, rng_seed=0):
        super().__init__()
        if c_reg <= 0:
            raise ConfigurationError("c_reg must be positive")
        if epochs < 1:
            raise ConfigurationError("epochs must be >= 1")
        self.c_reg = float(c_reg)
        self.epochs = int(epochs)
        self.lr = float(lr)
        self.batch_size = int(batch_size)
        self.calibration_fraction = float(calibration_fraction)
        self.rng_seed = int(rng_seed)

    def _split_calibration(self, n, rng):
        # label-independent split keeps the fit antisymmetric under label flips
        order = rng.permutation(n)
        take = int(round(self.calibration_fraction * n))
        cal = np.sort(order[:take])
        mask = np.ones(n, dtype=bool)
        mask[cal] = False
        return np.flatnonzero(mask), cal

    def fit(self, features, labels):
        features = np.asarray(features, dtype=np.float64)
        labels = _check_two_classes(labels)
        n, d = features.shape
        self.n_features = d
        self.scaler = _Standardizer().fit(features)
        x = self.scaler.apply(features)
        rng = derive_rng(self.rng_seed, "linear-svm")
        fit_rows, cal_rows = self._split_calibration(n, rng)
        if not (np.any(labels[fit_rows] == 1) and np.any(labels[fit_rows] == 0)):
            fit_rows = np.arange(n)

        xa = x[fit_rows]
        ta = labels[fit_rows].astype(np.float64) * 2.0 - 1.0
        reg = 1.0 / (self.c_reg * len(fit_rows))
        w = np.zeros(d)
        b = 0.0
        steps_per_epoch = (len(fit_rows) + self.batch_size - 1) // self.batch_size
        total = self.epochs * steps_per_epoch
        step = 0
        for _ in range(self.epochs):
            order = rng.permutation(len(fit_rows))
            for start in range(0, len(fit_rows), self.batch_size):
                rows = order[start:start + self.batch_size]
                z = xa[rows] @ w + b
                violating = ta[rows] * z < 1.0
                lr_t = _lr_schedule(self.lr, step, total)
                grad_w = reg * w * len(fit_rows)
                grad_b = 0.0
                if np.any(violating):
                    tv = ta[rows][violating]
                    grad_w = grad_w - (tv[:, None] * xa[rows][violating]).sum(axis=0) / len(rows)
                    grad_b = -float(tv.sum()) / len(rows)
                w -= lr_t * grad_w
                b -= lr_t * grad_b
                step += 1
        self.weights = w
        self.bias = b

        if len(cal_rows) and np.any(labels[cal_rows] == 1) and np.any(labels[cal_rows] == 0):
            margins = x[cal_rows] @ w + b
            self.platt_a, self.platt_b = _fit_platt(margins, labels[cal_rows])
        else:
            self.platt_a, self.platt_b = 1.0, 0.0
        return self

    def raw_margin(self, features):
        features = self._check_features(features)
        return self.scaler.apply(features) @ self.weights + self.bias

    def scores(self, features):
        return _sigmoid(self.platt_a * self.raw_margin(features) + self.platt_b)

    def to_dict(self):
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "kind": self.kind,
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "platt_a": self.platt_a,
            "platt_b": self.platt_b,
            "scaler": self.scaler.to_dict(),
        }

    @classmethod
    def from_dict(cls, payload):
        model = cls()
        model.weights = np.array(payload["weights"], dtype=np.float64)
        model.bias = float(payload["bias"])
        model.platt_a = float(payload["platt_a"])
        model.platt_b = float(payload["platt_b"])
        model.scaler = _Standardizer.from_dict(payload["scaler"])
        model.n_features = len(model.weights)
        return model


def _best_split(x_col, labels):
    """Best threshold and gini impurity for one feature column, or None."""
    order = np.argsort(x_col, kind="stable")
    values = x_col[order]
    ones = labels[order].astype(np.float64)
    n = len(values)
    cum_ones = np.cumsum(ones)
    total_ones = cum_ones[-1]
    lefts = np.arange(1, n)
    valid = values[1:] != values[:-1]
    if not np.any(valid):
        return None
    left_ones = cum_ones[:-1]
    right_ones = total_ones - left_ones
    rights = n - lefts
    p_l = left_ones / lefts
    p_r = right_ones / rights
    gini = (lefts * 2 * p_l * (1 - p_l) + rights * 2 * p_r * (1 - p_r)) / n
    gini[~valid] = np.inf
    best = int(np.argmin(gini))
    if not np.isfinite(gini[best]):
        return None
    threshold = (values[best] + values[best + 1]) / 2.0
    return float(gini[best]), threshold


class _TreeNode:
    __slots__ = ("feature", "threshold", "left", "right", "positive_fraction")

    def __init__(self):
        self.feature = None
        self.threshold = None
        self.left = None
        self.right = None
        self.positive_fraction = None


class RandomForest(ScoredModel):
    """Bootstrap ensemble of gini decision trees on sqrt(d) feature subsets.

    The ensemble score is the fraction of trees voting positive (each tree
    votes with its leaf majority), not an average of leaf probabilities.
    """

    kind = "random_forest"

    def __init__(self, n_trees=100, max_depth=12, min_samples_split=2, rng_seed=0):
        super().__init__()
        if n_trees < 1:
            raise ConfigurationError("n_trees must be >= 1")
        if max_depth < 0:
            raise ConfigurationError("max_depth must be >= 0")
        self.n_trees = int(n_trees)
        self.max_depth = int(max_depth)
        self.min_samples_split = int(min_samples_split)
        self.rng_seed = int(rng_seed)

    def _grow(self, x, labels, depth, rng, n_candidates):
        node = _TreeNode()
        node.positive_fraction = float(labels.mean())
        if (
            depth >= self.max_depth
            or len(labels) < self.min_samples_split
            or node.positive_fraction in (0.0, 1.0)
        ):
            return node
        feats = rng.choice(x.shape[1], size=n_candidates, replace=False)
        best = None
        for f in feats:
            found = _best_split(x[:, f], labels)
            if found is None:
                continue
            gini, threshold = found
            if best is None or gini < best[0]:
                best = (gini, int(f), threshold)
        if best is None:
            return node
        _, f, threshold = best
        mask = x[:, f] <= threshold
        node.feature = f
        node.threshold = threshold
        node.left = self._grow(x[mask], labels[mask], depth + 1, rng, n_candidates)
        node.right = self._grow(x[~mask], labels[~mask], depth + 1, rng, n_candidates)
        return node

    def fit(self, features, labels):
        features = np.asarray(features, dtype=np.float64)
        labels = _check_two_classes(labels)
        n, d = features.shape
        self.n_features = d
        n_candidates = max(1, int(round(np.sqrt(d))))
        self.trees = []
        for t in range(self.n_trees):
            rng = derive_rng(self.rng_seed, "rf-tree", t)
            rows = rng.integers(0, n, size=n)
            self.trees.append(self._grow(features[rows], labels[rows], 0, rng, n_candidates))
        return self

    @staticmethod
    def _route(node, features, rows, votes):
        if node.feature is None:
            votes[rows] = 1.0 if node.positive_fraction >= 0.5 else 0.0
            return
        mask = features[rows, node.feature] <= node.threshold
        RandomForest._route(node.left, features, rows[mask], votes)
        RandomForest._route(node.right, features, rows[~mask], votes)

    def scores(self, features):
        features = self._check_features(features)
        n = features.shape[0]
        acc = np.zeros(n)
        votes = np.empty(n)
        rows = np.arange(n)
        for tree in self.trees:
            self._route(tree, features, rows, votes)
            acc += votes
        return acc / self.n_trees

    @staticmethod
    def _node_to_dict(node):
        if node.feature is None:
            return {"leaf": node.positive_fraction}
        return {
            "feature": node.feature,
            "threshold": node.threshold,
            "left": RandomForest._node_to_dict(node.left),
            "right": RandomForest._node_to_dict(node.right),
        }

    @staticmethod
    def _node_from_dict(payload):
        node = _TreeNode()
        if "leaf" in payload:
            node.positive_fraction = float(payload["leaf"])
            return node
        node.feature = int(payload["feature"])
        node.threshold = float(payload["threshold"])
        node.positive_fraction = 0.0
        node.left = RandomForest._node_from_dict(payload["left"])
        node.right = RandomForest._node_from_dict(payload["right"])
        return node

    def to_dict(self):
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "kind": self.kind,
            "n_features": self.n_features,
            "trees": [self._node_to_dict(t) for t in self.trees],
        }

    @classmethod
    def from_dict(cls, payload):
        model = cls(n_trees=len(payload["trees"]))
        model.trees = [cls._node_from_dict(t) for t in payload["trees"]]
        model.n_features = payload["n_features"]
        return model


def _as_xy(data):
    if isinstance(data, PuDataset):
        return data.features, data.observed
    raise TypeError("expected a PuDataset")


def fit_logreg(train, l2=1e-4, epochs=100, lr=0.1, rng_seed=0):
    """Logistic-regression baseline on the observed labels."""
    x, s = _as_xy(train)
    return LogisticRegressionSgd(l2=l2, epochs=epochs, lr=lr, rng_seed=rng_seed).fit(x, s)


def fit_linear_svm(train, c_reg=1.0, epochs=50, rng_seed=0):
    """Calibrated linear-SVM baseline on the observed labels."""
    x, s = _as_xy(train)
    return LinearSvm(c_reg=c_reg, epochs=epochs, rng_seed=rng_seed).fit(x, s)


def fit_random_forest(train, n_trees=100, max_depth=12, rng_seed=0):
    """Random-forest baseline on the observed labels."""
    x, s = _as_xy(train)
    return RandomForest(n_trees=n_trees, max_depth=max_depth, rng_seed=rng_seed).fit(x, s)


def logreg_trainer(**params):
    """Factory: ``trainer(features, labels, rng_seed) -> ScoredModel``."""

    def train(features, labels, rng_seed):
        return LogisticRegressionSgd(rng_seed=rng_seed, **params).fit(features, labels)

    train.kind = "logreg"
    return train


def linear_svm_trainer(**params):
    def train(features, labels, rng_seed):
        return LinearSvm(rng_seed=rng_seed, **params).fit(features, labels)

    train.kind = "linear_svm"
    return train


def random_forest_trainer(**params):
    def train(features, labels, rng_seed):
        return RandomForest(rng_seed=rng_seed, **params).fit(features, labels)

    train.kind = "random_forest"
    return train


_MODEL_CLASSES = {}


def _register(cls):
    _MODEL_CLASSES[cls.kind] = cls


_register(LogisticRegressionSgd)
_register(LinearSvm)
_register(RandomForest)


def save_model(model, path):
    """Versioned JSON parameter dump."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model.to_dict(), fh)


def load_model(path):
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    kind = payload["kind"]
    if kind not in _MODEL_CLASSES:
        raise ValueError(f"unknown model kind {kind!r}")
    return _MODEL_CLASSES[kind].from_dict(payload)
