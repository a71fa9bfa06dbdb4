import numpy as np
import pytest
from scipy.stats import chisquare

from helpers import graph_from_edges, star_graph
from pugraph.errors import EdgeListParseError, SamplingError
from pugraph.graph import (
    LabelStore,
    load_edge_list,
    load_labels,
    sample_subnetwork,
    write_edge_list,
    write_subnetwork,
)


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestLoadEdgeList:
    def test_empty_file(self, tmp_path):
        g = load_edge_list(write(tmp_path, "e.csv", ""))
        assert g.node_count == 0
        assert g.edge_count == 0

    def test_triangle(self, tmp_path):
        g = load_edge_list(write(tmp_path, "e.csv", "a,b\nb,c\na,c\n"))
        assert g.node_count == 3
        assert g.edge_count == 3
        assert g.degree(g.dense_id("b")) == 2
        nbrs, _ = g.neighbors(g.dense_id("a"))
        assert sorted(g.external_ids[v] for v in nbrs) == ["b", "c"]

    def test_header_skipped(self, tmp_path):
        g = load_edge_list(write(tmp_path, "e.csv", "src,dst,weight\na,b,2.0\n"))
        assert g.node_count == 2
        assert g.und_w[0] == 2.0

    def test_weights_merge_on_duplicates(self, tmp_path):
        g = load_edge_list(write(tmp_path, "e.csv", "a,b,1.5\nb,a,2.5\na,b\n"))
        assert g.edge_count == 1
        assert g.und_w[0] == pytest.approx(5.0)

    def test_directed_storage_keeps_directions(self, tmp_path):
        g = load_edge_list(write(tmp_path, "e.csv", "a,b,1.0\nb,a,2.0\n"), directed=True)
        assert len(g.edges_src) == 2
        assert g.edge_count == 1  # undirected view is merged
        assert g.und_w[0] == pytest.approx(3.0)

    def test_tsv(self, tmp_path):
        g = load_edge_list(write(tmp_path, "e.tsv", "a\tb\nb\tc\n"), fmt="tsv")
        assert g.node_count == 3

    def test_malformed_row_reports_line(self, tmp_path):
        with pytest.raises(EdgeListParseError) as err:
            load_edge_list(write(tmp_path, "e.csv", "a,b\nc\n"))
        assert err.value.line_no == 2

    def test_bad_weight_reports_line(self, tmp_path):
        with pytest.raises(EdgeListParseError) as err:
            load_edge_list(write(tmp_path, "e.csv", "a,b,1\na,c,oops\n"))
        assert err.value.line_no == 2

    def test_negative_weight_rejected(self, tmp_path):
        with pytest.raises(EdgeListParseError):
            load_edge_list(write(tmp_path, "e.csv", "a,b,-1\n"))

    def test_adjacency_symmetry(self, tmp_path):
        g = load_edge_list(write(tmp_path, "e.csv", "a,b\nb,c\nc,d\na,d\nb,d\n"))
        for u in range(g.node_count):
            for v, _ in zip(*g.neighbors(u)):
                assert g.has_edge(int(v), u)


class TestLoadLabels:
    def test_empty_label_file(self, tmp_path):
        g = load_edge_list(write(tmp_path, "e.csv", "a,b\n"))
        labels, warnings = load_labels(write(tmp_path, "l.csv", ""), g)
        assert labels.positive_count == 0
        assert warnings == []

    def test_labels_and_unknown_id_warning(self, tmp_path):
        g = load_edge_list(write(tmp_path, "e.csv", "a,b\nb,c\n"))
        labels, warnings = load_labels(write(tmp_path, "l.csv", "a\nzzz\n"), g)
        assert labels.positive_count == 1
        assert warnings == ["zzz"]
        assert labels.observed[g.dense_id("a")] == 1

    def test_duplicates_deduplicated(self, tmp_path):
        g = load_edge_list(write(tmp_path, "e.csv", "a,b\n"))
        labels, _ = load_labels(write(tmp_path, "l.csv", "a\na\na\n"), g)
        assert labels.positive_count == 1

    def test_second_column_ignored(self, tmp_path):
        g = load_edge_list(write(tmp_path, "e.csv", "a,b\n"))
        labels, _ = load_labels(write(tmp_path, "l.csv", "a,phish\n"), g)
        assert labels.positive_count == 1


class TestLabelStore:
    def test_observed_implies_truth(self):
        with pytest.raises(ValueError):
            LabelStore(observed=np.array([1, 0]), truth=np.array([0, 0]))

    def test_counts_consistent(self):
        store = LabelStore(observed=np.array([1, 0, 0]), truth=np.array([1, 1, 0]))
        assert store.positive_count == 1
        assert int(store.truth.sum()) >= store.positive_count


class TestSampleSubnetwork:
    def star_fixture(self):
        g = star_graph(leaves=5)
        observed = np.zeros(6, dtype=np.int8)
        observed[0] = 1  # the hub is the sole positive
        return g, LabelStore(observed=observed)

    def test_star_covers_whole_graph(self):
        g, labels = self.star_fixture()
        sample = sample_subnetwork(g, labels, rng_seed=1)
        assert sample.graph.node_count == 6
        assert sample.graph.edge_count == 5
        assert len(sample.seed_positives) == 1
        assert len(sample.seed_negatives) == 1

    def test_hand_graph_closure(self):
        # 0-1, 1-2, 2-3, 4-5; positive = 1; negative forced among {3,4,5}
        g = graph_from_edges([(0, 1), (1, 2), (2, 3), (4, 5)], n_nodes=6)
        observed = np.zeros(6, dtype=np.int8)
        observed[1] = 1
        sample = sample_subnetwork(g, LabelStore(observed=observed), rng_seed=0)
        parents = set(sample.parent_nodes.tolist())
        # hand oracle: seeds + their first-order neighbors
        neg_parent = sample.parent_nodes[sample.seed_negatives[0]]
        expected = {0, 1, 2}
        for nbr in g.neighbors(int(neg_parent))[0]:
            expected.add(int(nbr))
        expected.add(int(neg_parent))
        assert parents == expected

    def test_edges_exist_in_parent_with_equal_weight(self):
        g = graph_from_edges([(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)], weights=[1, 2, 3, 4, 5])
        observed = np.zeros(5, dtype=np.int8)
        observed[0] = 1
        sample = sample_subnetwork(g, LabelStore(observed=observed), rng_seed=3)
        sg = sample.graph
        for u, v, w in zip(sg.und_u, sg.und_v, sg.und_w):
            pu, pv = int(sample.parent_nodes[u]), int(sample.parent_nodes[v])
            ids, weights = g.neighbors(pu)
            pos = np.searchsorted(ids, pv)
            assert ids[pos] == pv
            assert weights[pos] == w

    def test_determinism(self):
        g, labels = self.star_fixture()
        a = sample_subnetwork(g, labels, rng_seed=42)
        b = sample_subnetwork(g, labels, rng_seed=42)
        assert np.array_equal(a.parent_nodes, b.parent_nodes)
        assert np.array_equal(a.seed_negatives, b.seed_negatives)

    def test_no_positives_error(self):
        g = star_graph()
        with pytest.raises(SamplingError):
            sample_subnetwork(g, LabelStore(observed=np.zeros(7, dtype=np.int8)), rng_seed=0)

    def test_not_enough_unlabeled_error(self):
        g = graph_from_edges([(0, 1)], n_nodes=2)
        observed = np.ones(2, dtype=np.int8)
        with pytest.raises(SamplingError):
            sample_subnetwork(g, LabelStore(observed=observed), rng_seed=0)

    def test_negative_sampling_uniform(self):
        # 100-node fixture: 2 positives, 98 unlabeled; chi-square over 10k draws
        edges = [(i, (i + 1) % 100) for i in range(100)]
        g = graph_from_edges(edges, n_nodes=100)
        observed = np.zeros(100, dtype=np.int8)
        observed[[0, 50]] = 1
        labels = LabelStore(observed=observed)
        counts = np.zeros(100)
        draws = 10_000
        for seed in range(draws):
            sample = sample_subnetwork(g, labels, rng_seed=seed)
            for v in sample.parent_nodes[sample.seed_negatives]:
                counts[v] += 1
        unlabeled = np.flatnonzero(observed == 0)
        result = chisquare(counts[unlabeled])
        assert result.pvalue > 0.001


class TestExports:
    def test_edge_list_round_trip(self, tmp_path):
        g = load_edge_list(write(tmp_path, "e.csv", "a,b,1.5\nb,c,2\n"))
        out = tmp_path / "out.csv"
        write_edge_list(g, out)
        g2 = load_edge_list(str(out))
        assert g2.node_count == g.node_count
        assert np.array_equal(g2.und_w, g.und_w)

    def test_subnetwork_export(self, tmp_path):
        g = star_graph(leaves=4)
        observed = np.zeros(5, dtype=np.int8)
        observed[0] = 1
        sample = sample_subnetwork(g, LabelStore(observed=observed), rng_seed=0)
        edges_path = tmp_path / "sub_edges.csv"
        seeds_path = tmp_path / "sub_seeds.csv"
        write_subnetwork(sample, edges_path, seeds_path)
        lines = seeds_path.read_text().strip().splitlines()
        assert lines[0] == "id,role"
        roles = [ln.split(",")[1] for ln in lines[1:]]
        assert roles.count("pos") == 1
        assert roles.count("neg") == 1
