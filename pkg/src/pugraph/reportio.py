"""Delimited and Markdown serialization of run results.

Float cells are formatted with a fixed six-decimal format so a repeated run
with the same seed produces byte-identical files.
"""

from __future__ import annotations

import csv
import json
import os

from .metrics import MetricsReport

METRICS = MetricsReport.METRIC_NAMES


def _fmt(value):
    return f"{value:.6f}"


def write_matrix_csv(result, path):
    """Long-format benchmark matrix: one row per (embedding, model, variant)."""
    embeddings, models = result.axes
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        header = ["embedding", "model", "variant"]
        for metric in METRICS:
            header += [f"{metric}_mean", f"{metric}_sd"]
        writer.writerow(header)
        for emb in embeddings:
            for model in models:
                for variant in result.variants:
                    row = [emb, model, variant]
                    for metric in METRICS:
                        row += [_fmt(result.mean(emb, model, variant, metric)), _fmt(result.sd(emb, model, variant, metric))]
                    writer.writerow(row)


def write_sweep_csv(result, path):
    """One row per (hide_count, model, metric, variant)."""
    hide_counts, models = result.axes
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["hide_count", "model", "metric", "variant", "value_mean", "value_sd"])
        for hide in hide_counts:
            for model in models:
                for metric in METRICS:
                    for variant in result.variants:
                        writer.writerow(
                            [
                                hide,
                                model,
                                metric,
                                variant,
                                _fmt(result.mean(hide, model, variant, metric)),
                                _fmt(result.sd(hide, model, variant, metric)),
                            ]
                        )


def write_markdown_matrix(result, path):
    """Aligned tables, one per (metric, variant): embeddings x models."""
    embeddings, models = result.axes
    lines = []
    for variant in result.variants:
        for metric in METRICS:
            lines.append(f"## {metric} ({variant})")
            lines.append("")
            header = ["embedding"] + list(models)
            rows = [
                [emb] + [_fmt(result.mean(emb, model, variant, metric)) for model in models]
                for emb in embeddings
            ]
            widths = [max(len(str(cells[i])) for cells in [header] + rows) for i in range(len(header))]
            lines.append("| " + " | ".join(str(h).ljust(w) for h, w in zip(header, widths)) + " |")
            lines.append("| " + " | ".join("-" * w for w in widths) + " |")
            for cells in rows:
                lines.append("| " + " | ".join(str(c).ljust(w) for c, w in zip(cells, widths)) + " |")
            lines.append("")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines))


def write_metadata_json(metadata, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(metadata, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")


def _jsonable(value):
    try:
        return value.item()
    except AttributeError:
        return str(value)


def write_atomic_json(payload, path):
    """Write JSON via a temp file plus rename, so readers never see partials."""
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")
    os.replace(tmp, path)
