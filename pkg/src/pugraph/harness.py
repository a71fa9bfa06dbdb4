"""Experiment drivers: hidden-positive sweeps and the benchmark matrix.

One run: sample a subnetwork around the labeled positives, train embeddings
on it, optionally hide some labeled positives, split the seed nodes 80/20,
fit every model on the observed labels, and evaluate the held-out seeds with
estimated (and, when truth is known, defacto) metrics.  Repeats are averaged.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .classifiers import (
    fit_linear_svm,
    fit_logreg,
    fit_random_forest,
    linear_svm_trainer,
    logreg_trainer,
    predict,
    random_forest_trainer,
)
from .dataset import PuDataset, train_test_split
from .embeddings import WalkConfig, concat_embeddings, train_mnmf, train_node2vec, train_poincare, train_role2vec
from .errors import ConfigurationError
from .graph import LabelStore, load_edge_list, load_labels, sample_subnetwork
from .metrics import MetricsReport, standard_metrics
from .pulearn import fit_bagging_pu, fit_elkanoto, fit_upu
from .seeding import derive_rng, derive_seed
from .synthetic import SyntheticSpec, generate_synthetic

MODEL_DISPLAY = {
    "logreg": "LR",
    "random_forest": "RF",
    "linear_svm": "SVM",
    "bagging_pu": "BA",
    "elkanoto": "ET",
    "upu": "UPU",
}

METRICS = MetricsReport.METRIC_NAMES


@dataclass
class EmbeddingSpec:
    method: str
    params: dict = field(default_factory=dict)
    parts: list[str] = field(default_factory=list)
    tag: str = ""

    def __post_init__(self):
        known = {"node2vec", "poincare", "role2vec", "mnmf", "concat"}
        if self.method not in known:
            raise ConfigurationError(f"unknown embedding method {self.method!r}", key="embeddings.method")
        if self.method == "concat" and len(self.parts) < 2:
            raise ConfigurationError("concat embedding needs at least two parts", key="embeddings.parts")
        if not self.tag:
            self.tag = "+".join(self.parts) if self.method == "concat" else self.method


@dataclass
class ModelSpec:
    kind: str
    params: dict = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if self.kind not in MODEL_DISPLAY:
            raise ConfigurationError(f"unknown model kind {self.kind!r}", key="models.kind")
        if not self.name:
            self.name = MODEL_DISPLAY[self.kind]

    def content_key(self):
        return json.dumps({"kind": self.kind, "params": self.params}, sort_keys=True)


@dataclass
class DatasetSource:
    synthetic: SyntheticSpec | None = None
    edges_path: str | None = None
    labels_path: str | None = None
    fmt: str = "csv"
    directed: bool = False

    def __post_init__(self):
        if self.synthetic is None and (self.edges_path is None or self.labels_path is None):
            raise ConfigurationError(
                "dataset needs either a synthetic spec or edges+labels paths", key="dataset"
            )

    def load(self, rng_seed):
        if self.synthetic is not None:
            return generate_synthetic(self.synthetic, derive_seed(rng_seed, "dataset"))
        graph = load_edge_list(self.edges_path, fmt=self.fmt, directed=self.directed)
        labels, warnings = load_labels(self.labels_path, graph)
        if warnings:
            print(f"warning: {len(warnings)} label ids not in graph (first: {warnings[:3]})")
        return graph, labels


def default_benchmark_embeddings():
    return [
        EmbeddingSpec("node2vec"),
        EmbeddingSpec("poincare"),
        EmbeddingSpec("role2vec"),
        EmbeddingSpec("mnmf"),
        EmbeddingSpec("concat", parts=["node2vec", "poincare"]),
        EmbeddingSpec("concat", parts=["node2vec", "mnmf"]),
    ]


def default_benchmark_models():
    return [
        ModelSpec("logreg"),
        ModelSpec("random_forest"),
        ModelSpec("linear_svm"),
        ModelSpec("bagging_pu"),
        ModelSpec("elkanoto"),
        ModelSpec("upu"),
    ]


def default_sweep_models():
    return [ModelSpec("logreg"), ModelSpec("linear_svm")]


@dataclass
class ExperimentConfig:
    dataset: DatasetSource
    embeddings: list[EmbeddingSpec] = field(default_factory=default_benchmark_embeddings)
    models: list[ModelSpec] = field(default_factory=default_benchmark_models)
    repeats: int = 10
    train_fraction: float = 0.8
    hide_counts: list[int] = field(default_factory=list)
    hide_count: int = 0
    rng_seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        if self.repeats < 1:
            raise ConfigurationError("repeats must be >= 1", key="repeats")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigurationError("train_fraction must be in (0, 1)", key="train_fraction")
        names = [m.name for m in self.models]
        seen = {}
        for i, name in enumerate(names):
            if name in seen:
                seen[name] += 1
                self.models[i].name = f"{name}#{seen[name]}"
            else:
                seen[name] = 1
        tags = [e.tag for e in self.embeddings]
        if len(set(tags)) != len(tags):
            raise ConfigurationError("embedding tags must be unique", key="embeddings")


def engineer_pu_dataset(data: PuDataset, hide_count: int, rng_seed: int):
    """Hide ``hide_count`` uniformly chosen labeled positives.

    Returns ``(engineered, hidden_rows)``.  Truth is the original observed
    labels unless the dataset already carries truth, which is kept untouched;
    hiding only ever flips observed labels.  The hidden set is a prefix of a
    seeded permutation, so growing ``hide_count`` with the same seed yields
    nested hidden sets.
    """
    labeled = np.flatnonzero(data.observed == 1)
    if hide_count > len(labeled):
        raise ValueError(f"cannot hide {hide_count} of {len(labeled)} labeled positives")
    if hide_count < 0:
        raise ValueError("hide_count must be >= 0")
    perm = derive_rng(rng_seed, "engineer-hide").permutation(labeled)
    hidden = np.sort(perm[:hide_count])
    truth = data.truth.copy() if data.truth is not None else data.observed.copy()
    observed = data.observed.copy()
    observed[hidden] = 0
    return PuDataset(data.features, observed, truth, data.split_tag), hidden


def _train_base_embedding(method, graph, rng_seed, params):
    params = dict(params)
    if method in ("node2vec", "role2vec"):
        walk_params = {k: params.pop(k) for k in ("p", "q", "walk_length", "walks_per_node") if k in params}
        cfg = WalkConfig(rng_seed=derive_seed(rng_seed, "walks"), **walk_params)
        trainer = train_node2vec if method == "node2vec" else train_role2vec
        return trainer(graph, cfg=cfg, rng_seed=rng_seed, **params)
    if method == "poincare":
        return train_poincare(graph, rng_seed=rng_seed, **params).to_embedding_matrix()
    if method == "mnmf":
        return train_mnmf(graph, rng_seed=rng_seed, **params)
    raise ConfigurationError(f"unknown embedding method {method!r}", key="embeddings.method")


def train_embeddings(graph, specs, rng_seed):
    """Train every non-concat spec once, then assemble the concatenations."""
    trained = {}
    for spec in specs:
        if spec.method != "concat":
            trained[spec.tag] = _train_base_embedding(spec.method, graph, derive_seed(rng_seed, spec.tag), spec.params)
    for spec in specs:
        if spec.method == "concat":
            missing = [p for p in spec.parts if p not in trained]
            if missing:
                raise ConfigurationError(f"concat parts not defined: {missing}", key="embeddings.parts")
            emb = trained[spec.parts[0]]
            for part in spec.parts[1:]:
                emb = concat_embeddings(emb, trained[part])
            trained[spec.tag] = emb
    return trained


def fit_model(spec: ModelSpec, train: PuDataset, rng_seed: int):
    """Fit one model spec; returns the model plus metadata extras."""
    params = dict(spec.params)
    extras = {}
    if spec.kind == "logreg":
        model = fit_logreg(train, rng_seed=rng_seed, **params)
    elif spec.kind == "linear_svm":
        model = fit_linear_svm(train, rng_seed=rng_seed, **params)
    elif spec.kind == "random_forest":
        model = fit_random_forest(train, rng_seed=rng_seed, **params)
    elif spec.kind == "bagging_pu":
        base = _base_trainer(params.pop("base", "linear_svm"), params.pop("base_params", {}))
        model = fit_bagging_pu(train, base_trainer=base, rng_seed=rng_seed, **params)
    elif spec.kind == "elkanoto":
        base = _base_trainer(params.pop("base", "logreg"), params.pop("base_params", {}))
        model = fit_elkanoto(train, base_trainer=base, rng_seed=rng_seed, **params)
        extras["label_freq"] = model.label_freq
    elif spec.kind == "upu":
        model = fit_upu(train, rng_seed=rng_seed, **params)
        extras["prior"] = model.prior
    else:
        raise ConfigurationError(f"unknown model kind {spec.kind!r}", key="models.kind")
    return model, extras


def _base_trainer(kind, params):
    factories = {
        "logreg": logreg_trainer,
        "linear_svm": linear_svm_trainer,
        "random_forest": random_forest_trainer,
    }
    if kind not in factories:
        raise ConfigurationError(f"unknown base trainer {kind!r}", key="models.base")
    return factories[kind](**params)


def _seed_frame(subnet, labels):
    rows = subnet.seeds
    parent = subnet.parent_nodes[rows]
    observed = labels.observed[parent].copy()
    truth = labels.truth[parent].copy() if labels.truth is not None else None
    return rows, observed, truth


def _bench_repeat(args):
    graph, labels, cfg, repeat = args
    subnet = sample_subnetwork(graph, labels, derive_seed(cfg.rng_seed, "subnet", repeat))
    seed_rows, observed, truth = _seed_frame(subnet, labels)
    embeddings = train_embeddings(subnet.graph, cfg.embeddings, derive_seed(cfg.rng_seed, "embed", repeat))

    base = PuDataset(np.zeros((len(seed_rows), 1)), observed, truth)
    if cfg.hide_count:
        base, _ = engineer_pu_dataset(base, cfg.hide_count, derive_seed(cfg.rng_seed, "hide", repeat))
    split_rng = derive_rng(cfg.rng_seed, "split", repeat)
    _, _, train_idx, test_idx = train_test_split(base, cfg.train_fraction, split_rng)

    records = []
    extras_log = {}
    for espec in cfg.embeddings:
        feats = embeddings[espec.tag].vectors[seed_rows]
        data = PuDataset(feats, base.observed, base.truth)
        train = data.subset(train_idx, "train")
        test = data.subset(test_idx, "test")
        for mspec in cfg.models:
            fit_seed = derive_seed(cfg.rng_seed, "fit", repeat, espec.tag, mspec.content_key())
            model, extras = fit_model(mspec, train, fit_seed)
            _, preds = predict(model, test.features)
            reports = [standard_metrics(preds, test.observed, "estimated")]
            if test.truth is not None:
                reports.append(standard_metrics(preds, test.truth, "defacto"))
            records.append((espec.tag, mspec.name, reports))
            if extras:
                extras_log[f"{espec.tag}/{mspec.name}"] = extras
    info = {
        "subnet_nodes": subnet.graph.node_count,
        "subnet_edges": subnet.graph.edge_count,
        "extras": extras_log,
    }
    return repeat, records, info


def _sweep_repeat(args):
    graph, labels, cfg, repeat = args
    subnet = sample_subnetwork(graph, labels, derive_seed(cfg.rng_seed, "subnet", repeat))
    seed_rows, observed, truth = _seed_frame(subnet, labels)
    embeddings = train_embeddings(subnet.graph, cfg.embeddings, derive_seed(cfg.rng_seed, "embed", repeat))
    feats = embeddings[cfg.embeddings[0].tag].vectors[seed_rows]
    base = PuDataset(feats, observed, truth)

    records = []
    for hide in cfg.hide_counts:
        data, _ = engineer_pu_dataset(base, hide, derive_seed(cfg.rng_seed, "hide", repeat))
        split_rng = derive_rng(cfg.rng_seed, "split", repeat, hide)
        train, test, _, _ = train_test_split(data, cfg.train_fraction, split_rng)
        for mspec in cfg.models:
            fit_seed = derive_seed(cfg.rng_seed, "fit", repeat, hide, mspec.content_key())
            model, _ = fit_model(mspec, train, fit_seed)
            _, preds = predict(model, test.features)
            estimated = standard_metrics(preds, test.observed, "estimated")
            defacto = standard_metrics(preds, test.truth, "defacto")
            records.append((hide, mspec.name, [estimated, defacto]))
    info = {"subnet_nodes": subnet.graph.node_count, "subnet_edges": subnet.graph.edge_count}
    return repeat, records, info


def _run_repeats(worker, graph, labels, cfg):
    tasks = [(graph, labels, cfg, r) for r in range(cfg.repeats)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            outputs = list(pool.map(worker, tasks))
    else:
        outputs = [worker(t) for t in tasks]
    outputs.sort(key=lambda item: item[0])
    return outputs


@dataclass
class RunResult:
    """Per-cell raw values over repeats plus run metadata."""

    axes: tuple
    raw: dict
    variants: list[str]
    metadata: dict

    def values(self, *cell):
        return self.raw[cell]

    def mean(self, *cell):
        return float(np.mean(self.raw[cell]))

    def sd(self, *cell):
        return float(np.std(self.raw[cell]))


def run_benchmark(cfg: ExperimentConfig, graph=None, labels: LabelStore | None = None) -> RunResult:
    """Embedding x model metric matrix, averaged over subnetwork repeats."""
    if not cfg.embeddings:
        raise ConfigurationError("benchmark needs at least one embedding", key="embeddings")
    if not cfg.models:
        raise ConfigurationError("benchmark needs at least one model", key="models")
    started = time.perf_counter()
    if graph is None or labels is None:
        graph, labels = cfg.dataset.load(cfg.rng_seed)

    outputs = _run_repeats(_bench_repeat, graph, labels, cfg)
    raw: dict = {}
    variants: list[str] = []
    infos = []
    for repeat, records, info in outputs:
        infos.append(info)
        for emb, model, reports in records:
            for report in reports:
                if report.variant not in variants:
                    variants.append(report.variant)
                for metric in METRICS:
                    raw.setdefault((emb, model, report.variant, metric), []).append(report.value(metric))
    raw = {cell: np.array(vals) for cell, vals in raw.items()}
    metadata = {
        "rng_seed": cfg.rng_seed,
        "repeats": cfg.repeats,
        "hide_count": cfg.hide_count,
        "subnet_seeds": [derive_seed(cfg.rng_seed, "subnet", r) for r in range(cfg.repeats)],
        "subnet_sizes": [(i["subnet_nodes"], i["subnet_edges"]) for i in infos],
        "estimates": _collect_estimates(infos),
        "elapsed_s": time.perf_counter() - started,
    }
    return RunResult(
        axes=([e.tag for e in cfg.embeddings], [m.name for m in cfg.models]),
        raw=raw,
        variants=variants,
        metadata=metadata,
    )


def _collect_estimates(infos):
    merged: dict = {}
    for info in infos:
        for key, extras in info.get("extras", {}).items():
            for name, value in extras.items():
                merged.setdefault(f"{key}:{name}", []).append(value)
    return merged


def run_hidden_positive_sweep(cfg: ExperimentConfig, graph=None, labels: LabelStore | None = None) -> RunResult:
    """Estimated vs. defacto metric curves against the number of hidden positives."""
    if not cfg.hide_counts:
        raise ConfigurationError("sweep needs a nonempty hide_counts list", key="hide_counts")
    if len(cfg.embeddings) != 1:
        raise ConfigurationError("sweep uses exactly one embedding spec", key="embeddings")
    kinds = {m.kind for m in cfg.models}
    if not {"logreg", "linear_svm"} <= kinds:
        raise ConfigurationError("sweep models must include logreg and linear_svm", key="models")
    started = time.perf_counter()
    if graph is None or labels is None:
        graph, labels = cfg.dataset.load(cfg.rng_seed)

    outputs = _run_repeats(_sweep_repeat, graph, labels, cfg)
    raw: dict = {}
    infos = []
    for repeat, records, info in outputs:
        infos.append(info)
        for hide, model, reports in records:
            for report in reports:
                for metric in METRICS:
                    raw.setdefault((hide, model, report.variant, metric), []).append(report.value(metric))
    raw = {cell: np.array(vals) for cell, vals in raw.items()}
    metadata = {
        "rng_seed": cfg.rng_seed,
        "repeats": cfg.repeats,
        "hide_counts": list(cfg.hide_counts),
        "subnet_sizes": [(i["subnet_nodes"], i["subnet_edges"]) for i in infos],
        "elapsed_s": time.perf_counter() - started,
    }
    return RunResult(
        axes=(list(cfg.hide_counts), [m.name for m in cfg.models]),
        raw=raw,
        variants=["estimated", "defacto"],
        metadata=metadata,
    )
