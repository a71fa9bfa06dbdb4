import json
import os

import numpy as np
import pytest

from pugraph.cli import main
from pugraph.graph import load_edge_list


def run_cli(*args):
    return main([str(a) for a in args])


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


SMALL_SYNTH = """
seed = 99
[dataset.synthetic]
n_nodes = 300
n_illicit = 24
n_blocks = 3
p_in = 0.08
p_out = 0.006
illicit_bias = 2.0
label_frequency = 1.0
"""

SMALL_RUN = "repeats = 2\n" + SMALL_SYNTH + """
[[embeddings]]
method = "node2vec"
dim = 16
epochs = 3

[[models]]
kind = "logreg"
epochs = 30

[[models]]
kind = "linear_svm"
epochs = 20
"""


class TestIngest:
    def test_round_trip(self, tmp_path, capsys):
        edges = write(tmp_path, "edges.csv", "a,b,2\nb,c,1\nc,a,1\n")
        labels = write(tmp_path, "labels.csv", "a\n")
        out = tmp_path / "out"
        assert run_cli("ingest", edges, labels, "--out", out) == 0
        assert "3 nodes" in capsys.readouterr().out
        snapshot = load_edge_list(str(out / "edges.csv"))
        original = load_edge_list(str(edges))
        assert snapshot.node_count == original.node_count
        assert np.array_equal(np.sort(snapshot.und_w), np.sort(original.und_w))
        meta = json.loads((out / "ingest_meta.json").read_text())
        assert meta["labeled_positives"] == 1
        assert (out / "manifest.json").exists()
        # re-ingesting the snapshot reproduces it byte for byte
        out2 = tmp_path / "out2"
        assert run_cli("ingest", out / "edges.csv", out / "labels.csv", "--out", out2) == 0
        assert (out2 / "edges.csv").read_bytes() == (out / "edges.csv").read_bytes()
        assert (out2 / "labels.csv").read_bytes() == (out / "labels.csv").read_bytes()

    def test_empty_inputs(self, tmp_path):
        edges = write(tmp_path, "edges.csv", "")
        labels = write(tmp_path, "labels.csv", "")
        out = tmp_path / "out"
        assert run_cli("ingest", edges, labels, "--out", out) == 0
        meta = json.loads((out / "ingest_meta.json").read_text())
        assert meta["nodes"] == 0

    def test_parse_error_is_nonzero_single_line(self, tmp_path, capsys):
        edges = write(tmp_path, "edges.csv", "a,b\nbroken\n")
        labels = write(tmp_path, "labels.csv", "")
        code = run_cli("ingest", edges, labels, "--out", tmp_path / "out")
        assert code != 0
        err = capsys.readouterr().err.strip()
        assert err.startswith("error: parse:")
        assert len(err.splitlines()) == 1


class TestSynth:
    def test_files_and_counts(self, tmp_path):
        cfg = write(tmp_path, "synth.toml", SMALL_SYNTH)
        out = tmp_path / "out"
        assert run_cli("synth", cfg, "--out", out) == 0
        g = load_edge_list(str(out / "edges.csv"))
        assert g.node_count > 200
        observed_ids = (out / "labels.csv").read_text().strip().splitlines()
        truth_ids = (out / "truth.csv").read_text().strip().splitlines()
        assert len(observed_ids) == 24
        assert len(truth_ids) == 24

    def test_missing_section_names_key(self, tmp_path, capsys):
        cfg = write(tmp_path, "synth.toml", "seed = 1\n[dataset]\nedges='x'\nlabels='y'\n")
        assert run_cli("synth", cfg, "--out", tmp_path / "o") == 2
        assert "dataset.synthetic" in capsys.readouterr().err


class TestEmbed:
    def test_writes_embedding_csvs(self, tmp_path):
        cfg = write(
            tmp_path,
            "embed.toml",
            SMALL_SYNTH
            + """
[[embeddings]]
method = "node2vec"
dim = 8
epochs = 2

[[embeddings]]
method = "poincare"
dim = 8
epochs = 3
""",
        )
        out = tmp_path / "out"
        assert run_cli("embed", cfg, "--out", out) == 0
        for name in ("embedding_node2vec.csv", "embedding_poincare.csv"):
            assert (out / name).exists()
            meta = json.loads((out / (name + ".meta.json")).read_text())
            assert meta["dim"] == 8


class TestSweep:
    def test_schema_one_row_per_cell(self, tmp_path):
        cfg = write(tmp_path, "sweep.toml", SMALL_RUN + "\n[sweep]\nhide_counts = [0, 5]\n")
        out = tmp_path / "out"
        assert run_cli("sweep", cfg, "--out", out) == 0
        lines = (out / "sweep.csv").read_text().strip().splitlines()
        assert lines[0] == "hide_count,model,metric,variant,value_mean,value_sd"
        # 2 hide_counts x 2 models x 4 metrics x 2 variants
        assert len(lines) - 1 == 2 * 2 * 4 * 2
        seen = {tuple(ln.split(",")[:4]) for ln in lines[1:]}
        assert len(seen) == len(lines) - 1
        assert (out / "metadata.json").exists()

    def test_missing_hide_counts_named(self, tmp_path, capsys):
        cfg = write(tmp_path, "sweep.toml", SMALL_RUN)
        assert run_cli("sweep", cfg, "--out", tmp_path / "o") == 2
        assert "sweep.hide_counts" in capsys.readouterr().err


class TestBench:
    def test_outputs_and_metadata(self, tmp_path):
        cfg = write(tmp_path, "bench.toml", SMALL_RUN)
        out = tmp_path / "out"
        assert run_cli("bench", cfg, "--out", out) == 0
        matrix = (out / "matrix.csv").read_text().strip().splitlines()
        header = matrix[0].split(",")
        assert header[:3] == ["embedding", "model", "variant"]
        assert "f1_mean" in header
        assert (out / "matrix.md").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "bench"
        assert manifest["seed"] == 99

    def test_byte_identical_reruns(self, tmp_path):
        cfg = write(tmp_path, "bench.toml", SMALL_RUN)
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        assert run_cli("bench", cfg, "--jobs", 1, "--out", out1) == 0
        assert run_cli("bench", cfg, "--jobs", 1, "--out", out2) == 0
        assert (out1 / "matrix.csv").read_bytes() == (out2 / "matrix.csv").read_bytes()

    def test_seed_flag_overrides_config(self, tmp_path):
        cfg = write(tmp_path, "bench.toml", SMALL_RUN)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert run_cli("bench", cfg, "--seed", 7, "--out", out1) == 0
        assert run_cli("bench", cfg, "--seed", 7, "--out", out2) == 0
        m1 = json.loads((out1 / "manifest.json").read_text())
        assert m1["seed"] == 7
        assert (out1 / "matrix.csv").read_bytes() == (out2 / "matrix.csv").read_bytes()

    def test_random_seed_recorded_when_absent(self, tmp_path):
        cfg = write(tmp_path, "bench.toml", SMALL_RUN.replace("seed = 99\n", ""))
        out = tmp_path / "out"
        assert run_cli("bench", cfg, "--out", out) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert isinstance(manifest["seed"], int)

    def test_estimates_surfaced(self, tmp_path, capsys):
        cfg = write(
            tmp_path,
            "bench.toml",
            """
repeats = 2
seed = 99

[dataset.synthetic]
n_nodes = 600
n_illicit = 60
n_blocks = 3
p_in = 0.05
p_out = 0.004
illicit_bias = 2.0
label_frequency = 1.0

[[embeddings]]
method = "node2vec"
dim = 16
epochs = 3

[[models]]
kind = "elkanoto"

[[models]]
kind = "upu"
""",
        )
        out = tmp_path / "out"
        assert run_cli("bench", cfg, "--out", out) == 0
        stdout = capsys.readouterr().out
        assert "label_freq" in stdout
        assert "prior" in stdout
        metadata = json.loads((out / "metadata.json").read_text())
        assert any("label_freq" in k for k in metadata["estimates"])

    def test_unknown_model_kind_named(self, tmp_path, capsys):
        cfg = write(tmp_path, "bench.toml", SMALL_SYNTH + "\n[[models]]\nkind = 'nope'\n")
        assert run_cli("bench", cfg, "--out", tmp_path / "o") == 2
        assert "models.kind" in capsys.readouterr().err


class TestShippedConfigs:
    @pytest.mark.slow
    def test_shipped_bench_fixture_under_five_minutes(self, tmp_path):
        import time

        config = os.path.join(os.path.dirname(__file__), "..", "configs", "bench_synthetic.toml")
        started = time.perf_counter()
        assert run_cli("bench", config, "--jobs", 1, "--out", tmp_path / "out") == 0
        elapsed = time.perf_counter() - started
        assert elapsed < 300.0, f"shipped bench took {elapsed:.0f}s"
        lines = (tmp_path / "out" / "matrix.csv").read_text().strip().splitlines()
        # 6 embeddings x 6 models x 2 variants
        assert len(lines) - 1 == 6 * 6 * 2
        names = {tuple(ln.split(",")[:2]) for ln in lines[1:]}
        assert ("node2vec+mnmf", "BA") in names

    @pytest.mark.slow
    def test_shipped_sweep_fixture_under_three_minutes(self, tmp_path):
        import time

        config = os.path.join(os.path.dirname(__file__), "..", "configs", "sweep_synthetic.toml")
        started = time.perf_counter()
        assert run_cli("sweep", config, "--jobs", 1, "--out", tmp_path / "out") == 0
        elapsed = time.perf_counter() - started
        assert elapsed < 180.0, f"shipped sweep took {elapsed:.0f}s"
        lines = (tmp_path / "out" / "sweep.csv").read_text().strip().splitlines()
        assert len(lines) - 1 == 6 * 2 * 4 * 2


class TestConfigHandling:
    def test_json_config_supported(self, tmp_path):
        payload = {
            "seed": 5,
            "repeats": 2,
            "dataset": {
                "synthetic": {
                    "n_nodes": 300,
                    "n_illicit": 24,
                    "n_blocks": 3,
                    "p_in": 0.08,
                    "p_out": 0.006,
                    "illicit_bias": 2.0,
                    "label_frequency": 1.0,
                }
            },
            "embeddings": [{"method": "node2vec", "dim": 8, "epochs": 2}],
            "models": [{"kind": "logreg", "epochs": 20}, {"kind": "linear_svm", "epochs": 20}],
        }
        cfg = write(tmp_path, "run.json", json.dumps(payload))
        assert run_cli("bench", cfg, "--out", tmp_path / "out") == 0

    def test_unknown_extension_rejected(self, tmp_path, capsys):
        cfg = write(tmp_path, "run.yaml", "a: 1")
        assert run_cli("bench", cfg, "--out", tmp_path / "o") == 2
        assert "config" in capsys.readouterr().err

    def test_out_dir_env_var(self, tmp_path, monkeypatch):
        monkeypatch.setenv("PUGRAPH_OUT", str(tmp_path / "envout"))
        cfg = write(tmp_path, "synth.toml", SMALL_SYNTH)
        assert run_cli("synth", cfg) == 0
        assert (tmp_path / "envout" / "edges.csv").exists()
