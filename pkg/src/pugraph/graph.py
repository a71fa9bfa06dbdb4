"""Transaction-graph storage, ingestion, and subnetwork sampling.

External node ids are arbitrary strings (hex addresses); everything numeric
works on dense integer ids.  Direction is preserved in edge storage, but the
adjacency used by walks, factorization, and sampling is an undirected,
weight-merged view.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import EdgeListParseError, SamplingError
from .seeding import derive_rng

_HEADER_PAIRS = {
    ("src", "dst"),
    ("source", "target"),
    ("from", "to"),
    ("u", "v"),
    ("node1", "node2"),
}


class TransactionGraph:
    """Immutable graph with dense ids and an undirected adjacency index.

    Parameters
    ----------
    src, dst : int arrays
        Directed endpoints as read from the source (already deduplicated).
    weight : float array
        Nonnegative edge weights; multi-edges are merged by summing.
    external_ids : list of str
        Dense id -> external id. ``node_count`` is ``len(external_ids)``.
    directed : bool
        Whether the source declared direction. Storage keeps it either way;
        the adjacency is always the undirected merge.
    """

    def __init__(self, src, dst, weight, external_ids, directed=False, tag=""):
        self.edges_src = np.asarray(src, dtype=np.int64)
        self.edges_dst = np.asarray(dst, dtype=np.int64)
        self.edges_weight = np.asarray(weight, dtype=np.float64)
        self.external_ids = list(external_ids)
        self.node_count = len(self.external_ids)
        self.directed = bool(directed)
        self.tag = tag
        self.id_map = {ext: i for i, ext in enumerate(self.external_ids)}
        self._build_undirected()

    def _build_undirected(self):
        n = self.node_count
        if len(self.edges_src) == 0:
            self.und_u = np.empty(0, dtype=np.int64)
            self.und_v = np.empty(0, dtype=np.int64)
            self.und_w = np.empty(0, dtype=np.float64)
            self.adj_indptr = np.zeros(n + 1, dtype=np.int64)
            self.adj_ids = np.empty(0, dtype=np.int64)
            self.adj_weights = np.empty(0, dtype=np.float64)
            return
        lo = np.minimum(self.edges_src, self.edges_dst)
        hi = np.maximum(self.edges_src, self.edges_dst)
        key = lo * np.int64(n) + hi
        uniq, inverse = np.unique(key, return_inverse=True)
        merged_w = np.zeros(len(uniq), dtype=np.float64)
        np.add.at(merged_w, inverse, self.edges_weight)
        self.und_u = (uniq // n).astype(np.int64)
        self.und_v = (uniq % n).astype(np.int64)
        self.und_w = merged_w

        loops = self.und_u == self.und_v
        heads = np.concatenate([self.und_u, self.und_v[~loops]])
        tails = np.concatenate([self.und_v, self.und_u[~loops]])
        ws = np.concatenate([self.und_w, self.und_w[~loops]])
        order = np.lexsort((tails, heads))
        heads, tails, ws = heads[order], tails[order], ws[order]
        counts = np.bincount(heads, minlength=n)
        self.adj_indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        self.adj_ids = tails
        self.adj_weights = ws

    @property
    def edge_count(self):
        """Number of undirected merged edges."""
        return len(self.und_u)

    def neighbors(self, node):
        """Sorted neighbor ids and matching merged weights."""
        a, b = self.adj_indptr[node], self.adj_indptr[node + 1]
        return self.adj_ids[a:b], self.adj_weights[a:b]

    def degree(self, node):
        return int(self.adj_indptr[node + 1] - self.adj_indptr[node])

    def has_edge(self, u, v):
        ids, _ = self.neighbors(u)
        pos = np.searchsorted(ids, v)
        return bool(pos < len(ids) and ids[pos] == v)

    def dense_id(self, external_id):
        return self.id_map[external_id]


@dataclass
class LabelStore:
    """Observed label flags and, for engineered datasets, the true labels.

    ``observed[i] = 1`` marks node i as a labeled positive; everything else is
    unlabeled.  ``truth`` is only present when ground truth is known, and a
    labeled node must then be a true positive.
    """

    observed: np.ndarray
    truth: np.ndarray | None = None

    def __post_init__(self):
        self.observed = np.asarray(self.observed, dtype=np.int8)
        if self.truth is not None:
            self.truth = np.asarray(self.truth, dtype=np.int8)
            if len(self.truth) != len(self.observed):
                raise ValueError("observed and truth label lengths differ")
            if np.any((self.observed == 1) & (self.truth != 1)):
                raise ValueError("labeled node with truth != 1 violates the label mechanism")

    @property
    def positive_count(self):
        return int(np.sum(self.observed == 1))


@dataclass
class SubnetworkSample:
    """Induced subgraph around labeled positives plus sampled negatives.

    Node ids are dense ids of ``graph`` (the subgraph); ``parent_nodes`` maps
    them back to the parent graph for label/feature lookup.
    """

    graph: TransactionGraph
    seed_positives: np.ndarray
    seed_negatives: np.ndarray
    parent_nodes: np.ndarray
    provenance: dict = field(default_factory=dict)

    @property
    def seeds(self):
        return np.concatenate([self.seed_positives, self.seed_negatives])


def _open_rows(path, fmt):
    delimiter = {"csv": ",", "tsv": "\t"}.get(fmt)
    if delimiter is None:
        raise EdgeListParseError(path, 0, f"unknown format {fmt!r} (use csv or tsv)")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        yield from csv.reader(fh, delimiter=delimiter)


def load_edge_list(path, fmt="csv", directed=False):
    """Parse ``src,dst[,weight]`` rows into a TransactionGraph.

    A leading header row is skipped when its first two fields are a known
    header pair (src/dst, source/target, from/to, u/v, node1/node2).  An empty
    file yields an empty graph; a malformed row raises with its line number.
    """
    id_map: dict[str, int] = {}
    external_ids: list[str] = []
    agg: dict[tuple[int, int], float] = {}

    def dense(ext):
        idx = id_map.get(ext)
        if idx is None:
            idx = len(external_ids)
            id_map[ext] = idx
            external_ids.append(ext)
        return idx

    for line_no, row in enumerate(_open_rows(path, fmt), start=1):
        if not row or all(not f.strip() for f in row):
            continue
        fields = [f.strip() for f in row]
        if line_no == 1 and len(fields) >= 2 and (fields[0].lower(), fields[1].lower()) in _HEADER_PAIRS:
            continue
        if len(fields) < 2 or len(fields) > 3:
            raise EdgeListParseError(path, line_no, f"expected src,dst[,weight], got {len(fields)} fields")
        if not fields[0] or not fields[1]:
            raise EdgeListParseError(path, line_no, "empty node id")
        w = 1.0
        if len(fields) == 3 and fields[2]:
            try:
                w = float(fields[2])
            except ValueError:
                raise EdgeListParseError(path, line_no, f"weight {fields[2]!r} is not a number") from None
            if not np.isfinite(w) or w < 0:
                raise EdgeListParseError(path, line_no, f"weight must be a finite nonnegative number, got {w}")
        u, v = dense(fields[0]), dense(fields[1])
        key = (u, v) if directed else (min(u, v), max(u, v))
        agg[key] = agg.get(key, 0.0) + w

    if agg:
        src, dst = (np.array(col, dtype=np.int64) for col in zip(*agg.keys()))
        weight = np.array(list(agg.values()), dtype=np.float64)
    else:
        src = dst = np.empty(0, dtype=np.int64)
        weight = np.empty(0, dtype=np.float64)
    return TransactionGraph(src, dst, weight, external_ids, directed=directed, tag=str(path))


def load_labels(path, graph):
    """Read one external id per line (optional second column ignored).

    Returns ``(LabelStore, warnings)`` where warnings lists ids absent from
    the graph. Duplicates are deduplicated silently.
    """
    observed = np.zeros(graph.node_count, dtype=np.int8)
    warnings: list[str] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.reader(fh):
            if not row or not row[0].strip():
                continue
            ext = row[0].strip()
            if ext in seen:
                continue
            seen.add(ext)
            idx = graph.id_map.get(ext)
            if idx is None:
                warnings.append(ext)
            else:
                observed[idx] = 1
    return LabelStore(observed=observed), warnings


def induced_subgraph(graph, nodes):
    """Induce the subgraph on ``nodes`` (parent dense ids, any order).

    Returns ``(subgraph, parent_nodes)`` with ``parent_nodes[i]`` the parent
    id of subgraph node ``i``. Edges keep their merged undirected weights.
    """
    parent_nodes = np.asarray(sorted(int(v) for v in set(np.asarray(nodes).tolist())), dtype=np.int64)
    remap = np.full(graph.node_count, -1, dtype=np.int64)
    remap[parent_nodes] = np.arange(len(parent_nodes))
    keep = (remap[graph.und_u] >= 0) & (remap[graph.und_v] >= 0)
    sub = TransactionGraph(
        remap[graph.und_u[keep]],
        remap[graph.und_v[keep]],
        graph.und_w[keep],
        [graph.external_ids[p] for p in parent_nodes],
        directed=False,
        tag=f"{graph.tag}#induced",
    )
    return sub, parent_nodes


def sample_subnetwork(graph, labels, rng_seed):
    """Build one working subnetwork around the labeled positives.

    Seeds are all labeled positives plus an equal-size uniform sample of
    unlabeled nodes; the subgraph adds every first-order neighbor of a seed
    and all edges among included nodes.
    """
    observed = labels.observed
    positives = np.flatnonzero(observed == 1)
    if len(positives) == 0:
        raise SamplingError("no labeled positives to seed the subnetwork")
    unlabeled = np.flatnonzero(observed == 0)
    if len(unlabeled) < len(positives):
        raise SamplingError(
            f"need at least {len(positives)} unlabeled nodes to match the positives, have {len(unlabeled)}"
        )
    rng = derive_rng(rng_seed, "subnetwork-negatives")
    negatives = np.sort(rng.choice(unlabeled, size=len(positives), replace=False))

    seeds = np.concatenate([positives, negatives])
    members = set(seeds.tolist())
    for v in seeds:
        ids, _ = graph.neighbors(int(v))
        members.update(ids.tolist())
    sub, parent_nodes = induced_subgraph(graph, np.fromiter(members, dtype=np.int64))
    remap = {int(p): i for i, p in enumerate(parent_nodes)}
    return SubnetworkSample(
        graph=sub,
        seed_positives=np.array([remap[int(v)] for v in positives], dtype=np.int64),
        seed_negatives=np.array([remap[int(v)] for v in negatives], dtype=np.int64),
        parent_nodes=parent_nodes,
        provenance={"rng_seed": int(rng_seed), "parent": graph.tag},
    )


def write_edge_list(graph, path):
    """Persist the undirected merged edge view as ``src,dst,weight`` CSV."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["src", "dst", "weight"])
        for u, v, w in zip(graph.und_u, graph.und_v, graph.und_w):
            writer.writerow([graph.external_ids[u], graph.external_ids[v], repr(float(w))])


def write_labels(labels, graph, path, which="observed"):
    """Persist labeled ids (one per line) for ``observed`` or ``truth``."""
    flags = labels.observed if which == "observed" else labels.truth
    if flags is None:
        raise ValueError("label store has no truth labels")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for idx in np.flatnonzero(flags == 1):
            fh.write(graph.external_ids[idx] + "\n")


def write_subnetwork(sample, edges_path, seeds_path):
    """Export a sampled subnetwork: edge-list CSV plus a seeds CSV (id, role)."""
    write_edge_list(sample.graph, edges_path)
    ext = sample.graph.external_ids
    with open(seeds_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "role"])
        for v in sample.seed_positives:
            writer.writerow([ext[v], "pos"])
        for v in sample.seed_negatives:
            writer.writerow([ext[v], "neg"])
