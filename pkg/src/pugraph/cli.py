"""Command-line front end: ingest | synth | embed | sweep | bench.

Each run reads one TOML or JSON config file; flags only override the seed,
output directory, parallelism, and verbosity.  Every command writes its
outputs plus a run manifest, and any failure exits nonzero with a single
machine-parseable reason line.
"""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys
import time

from . import __version__
from .embeddings import write_embedding_csv
from .errors import ConfigurationError, ToolkitError
from .graph import load_edge_list, load_labels, write_edge_list, write_labels
from .harness import (
    DatasetSource,
    EmbeddingSpec,
    ExperimentConfig,
    ModelSpec,
    default_sweep_models,
    run_benchmark,
    run_hidden_positive_sweep,
    train_embeddings,
)
from .reportio import write_atomic_json, write_markdown_matrix, write_matrix_csv, write_metadata_json, write_sweep_csv
from .synthetic import SyntheticSpec, generate_synthetic

OUT_DIR_ENV = "PUGRAPH_OUT"


def load_config_file(path):
    if path.endswith(".toml"):
        try:
            import tomllib
        except ModuleNotFoundError:  # Python 3.10
            import tomli as tomllib
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    if path.endswith(".json"):
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    raise ConfigurationError(f"config {path!r} must end in .toml or .json", key="config")


def _synthetic_spec_from_dict(payload, key_prefix):
    known = set(SyntheticSpec.__dataclass_fields__)
    for key in payload:
        if key not in known:
            raise ConfigurationError(f"unknown key {key_prefix}.{key}", key=f"{key_prefix}.{key}")
    return SyntheticSpec(**payload)


def _dataset_from_dict(raw):
    if "dataset" not in raw:
        raise ConfigurationError("missing required key", key="dataset")
    section = raw["dataset"]
    if "synthetic" in section:
        return DatasetSource(synthetic=_synthetic_spec_from_dict(section["synthetic"], "dataset.synthetic"))
    for key in ("edges", "labels"):
        if key not in section:
            raise ConfigurationError("missing required key", key=f"dataset.{key}")
    return DatasetSource(
        edges_path=section["edges"],
        labels_path=section["labels"],
        fmt=section.get("format", "csv"),
        directed=bool(section.get("directed", False)),
    )


def _embedding_specs_from_dict(raw):
    specs = []
    for item in raw.get("embeddings", []):
        item = dict(item)
        if "method" not in item:
            raise ConfigurationError("missing required key", key="embeddings.method")
        method = item.pop("method")
        parts = item.pop("parts", [])
        tag = item.pop("tag", "")
        specs.append(EmbeddingSpec(method, params=item, parts=list(parts), tag=tag))
    return specs


def _model_specs_from_dict(raw):
    specs = []
    for item in raw.get("models", []):
        item = dict(item)
        if "kind" not in item:
            raise ConfigurationError("missing required key", key="models.kind")
        kind = item.pop("kind")
        name = item.pop("name", "")
        specs.append(ModelSpec(kind, params=item, name=name))
    return specs


def experiment_config_from_dict(raw, seed, jobs, for_sweep=False):
    kwargs = {
        "dataset": _dataset_from_dict(raw),
        "rng_seed": seed,
        "jobs": jobs,
    }
    embeddings = _embedding_specs_from_dict(raw)
    models = _model_specs_from_dict(raw)
    if for_sweep:
        kwargs["embeddings"] = embeddings or [EmbeddingSpec("node2vec")]
        kwargs["models"] = models or default_sweep_models()
        sweep_section = raw.get("sweep", {})
        hide_counts = sweep_section.get("hide_counts", raw.get("hide_counts"))
        if not hide_counts:
            raise ConfigurationError("missing required key", key="sweep.hide_counts")
        kwargs["hide_counts"] = [int(h) for h in hide_counts]
    else:
        if embeddings:
            kwargs["embeddings"] = embeddings
        if models:
            kwargs["models"] = models
        bench_section = raw.get("bench", {})
        kwargs["hide_count"] = int(bench_section.get("hide_count", raw.get("hide_count", 0)))
    if "repeats" in raw:
        kwargs["repeats"] = int(raw["repeats"])
    if "train_fraction" in raw:
        kwargs["train_fraction"] = float(raw["train_fraction"])
    return ExperimentConfig(**kwargs)


def _resolve_seed(args, raw_config):
    if args.seed is not None:
        return int(args.seed)
    if raw_config is not None and "seed" in raw_config:
        return int(raw_config["seed"])
    return secrets.randbits(32)


def _out_dir(args):
    out = args.out or os.environ.get(OUT_DIR_ENV) or "."
    os.makedirs(out, exist_ok=True)
    return out


def _write_manifest(out_dir, command, config_path, seed, outputs, timings):
    manifest = {
        "command": command,
        "config": config_path,
        "seed": seed,
        "version": __version__,
        "out_dir": os.path.abspath(out_dir),
        "outputs": outputs,
        "timings": timings,
    }
    write_atomic_json(manifest, os.path.join(out_dir, "manifest.json"))


def cmd_ingest(args):
    started = time.perf_counter()
    out = _out_dir(args)
    graph = load_edge_list(args.edges, fmt=args.format, directed=args.directed)
    labels, warnings = load_labels(args.labels, graph)
    edges_out = os.path.join(out, "edges.csv")
    labels_out = os.path.join(out, "labels.csv")
    write_edge_list(graph, edges_out)
    write_labels(labels, graph, labels_out)
    write_atomic_json(
        {
            "nodes": graph.node_count,
            "edges": graph.edge_count,
            "labeled_positives": labels.positive_count,
            "unknown_label_ids": warnings,
        },
        os.path.join(out, "ingest_meta.json"),
    )
    seed = 0 if args.seed is None else int(args.seed)
    _write_manifest(out, "ingest", None, seed, ["edges.csv", "labels.csv", "ingest_meta.json"],
                    {"total_s": time.perf_counter() - started})
    print(f"ingested {graph.node_count} nodes, {graph.edge_count} edges, "
          f"{labels.positive_count} labeled positives ({len(warnings)} unknown label ids)")
    return 0


def cmd_synth(args):
    started = time.perf_counter()
    out = _out_dir(args)
    raw = load_config_file(args.config)
    seed = _resolve_seed(args, raw)
    section = raw.get("dataset", raw)
    if "synthetic" not in section:
        raise ConfigurationError("missing required key", key="dataset.synthetic")
    spec = _synthetic_spec_from_dict(section["synthetic"], "dataset.synthetic")
    graph, labels = generate_synthetic(spec, seed)
    write_edge_list(graph, os.path.join(out, "edges.csv"))
    write_labels(labels, graph, os.path.join(out, "labels.csv"), which="observed")
    write_labels(labels, graph, os.path.join(out, "truth.csv"), which="truth")
    _write_manifest(out, "synth", args.config, seed, ["edges.csv", "labels.csv", "truth.csv"],
                    {"total_s": time.perf_counter() - started})
    print(f"generated {graph.node_count} nodes, {graph.edge_count} edges, "
          f"{labels.positive_count} labeled of {int(labels.truth.sum())} illicit")
    return 0


def cmd_embed(args):
    started = time.perf_counter()
    out = _out_dir(args)
    raw = load_config_file(args.config)
    seed = _resolve_seed(args, raw)
    dataset = _dataset_from_dict(raw)
    specs = _embedding_specs_from_dict(raw) or [EmbeddingSpec("node2vec")]
    tags = [s.tag for s in specs]
    if len(set(tags)) != len(tags):
        raise ConfigurationError("embedding tags must be unique", key="embeddings")
    graph, _ = dataset.load(seed)
    trained = train_embeddings(graph, specs, seed)
    outputs = []
    for spec in specs:
        name = f"embedding_{spec.tag.replace('+', '_')}.csv"
        write_embedding_csv(trained[spec.tag], os.path.join(out, name))
        outputs += [name, name + ".meta.json"]
        if args.verbose:
            print(f"wrote {name} ({trained[spec.tag].dim} dims)")
    _write_manifest(out, "embed", args.config, seed, outputs, {"total_s": time.perf_counter() - started})
    print(f"embedded {graph.node_count} nodes with {len(specs)} method(s)")
    return 0


def cmd_sweep(args):
    started = time.perf_counter()
    out = _out_dir(args)
    raw = load_config_file(args.config)
    seed = _resolve_seed(args, raw)
    cfg = experiment_config_from_dict(raw, seed, args.jobs, for_sweep=True)
    result = run_hidden_positive_sweep(cfg)
    write_sweep_csv(result, os.path.join(out, "sweep.csv"))
    write_metadata_json(result.metadata, os.path.join(out, "metadata.json"))
    _write_manifest(out, "sweep", args.config, seed, ["sweep.csv", "metadata.json"],
                    {"total_s": time.perf_counter() - started})
    print(f"sweep over hide_counts={cfg.hide_counts} done in {result.metadata['elapsed_s']:.1f}s")
    return 0


def cmd_bench(args):
    started = time.perf_counter()
    out = _out_dir(args)
    raw = load_config_file(args.config)
    seed = _resolve_seed(args, raw)
    cfg = experiment_config_from_dict(raw, seed, args.jobs, for_sweep=False)
    result = run_benchmark(cfg)
    write_matrix_csv(result, os.path.join(out, "matrix.csv"))
    write_markdown_matrix(result, os.path.join(out, "matrix.md"))
    write_metadata_json(result.metadata, os.path.join(out, "metadata.json"))
    _write_manifest(out, "bench", args.config, seed, ["matrix.csv", "matrix.md", "metadata.json"],
                    {"total_s": time.perf_counter() - started})
    for key, values in sorted(result.metadata["estimates"].items()):
        mean = sum(values) / len(values)
        print(f"{key} mean over repeats: {mean:.4f}")
    print(f"benchmark matrix written in {result.metadata['elapsed_s']:.1f}s")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="pugraph", description=__doc__)
    parser.add_argument("--version", action="version", version=f"pugraph {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("config", help="TOML or JSON run configuration")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help=f"output directory (default ${OUT_DIR_ENV} or .)")
        p.add_argument("--jobs", type=int, default=1, help="parallel repeats (1 = bit-reproducible)")
        p.add_argument("-v", "--verbose", action="store_true")

    p_ingest = sub.add_parser("ingest", help="parse an edge list + label file and persist a snapshot")
    p_ingest.add_argument("edges")
    p_ingest.add_argument("labels")
    p_ingest.add_argument("--format", choices=("csv", "tsv"), default="csv")
    p_ingest.add_argument("--directed", action="store_true")
    common(p_ingest, config=False)
    p_ingest.set_defaults(func=cmd_ingest)

    p_synth = sub.add_parser("synth", help="generate a synthetic planted-partition dataset")
    common(p_synth)
    p_synth.set_defaults(func=cmd_synth)

    p_embed = sub.add_parser("embed", help="train embeddings on the full graph and export CSVs")
    common(p_embed)
    p_embed.set_defaults(func=cmd_embed)

    p_sweep = sub.add_parser("sweep", help="hidden-positive sweep (estimated vs defacto curves)")
    common(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_bench = sub.add_parser("bench", help="embedding x model benchmark matrix")
    common(p_bench)
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ToolkitError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
