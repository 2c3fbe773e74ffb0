"""File ingestion. Three edge formats plus the node-attribute format, all
optionally gzip-compressed (detected by magic bytes)."""
import gzip
import io

import numpy as np

from ..errors import (CompletenessError, NodeTypeError, ParseError,
                      SchemaError)
from .core import AttributeTable, Graph

FORMATS = ("tsv-triple", "movielens-rating", "bipartite-edge")


def _open_text(path):
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic == b"\x1f\x8b":
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8")
    return open(path, "r", encoding="utf-8")


def _lines(path):
    with _open_text(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield lineno, line


class _Vocab:
    """Dense ids in first-appearance order, nodes keyed by (type, name)."""

    def __init__(self, type_names):
        self.type_names = list(type_names)
        self.names = []
        self.types = []
        self._ids = {}

    def add(self, type_name, name):
        key = (type_name, name)
        if key not in self._ids:
            self._ids[key] = len(self.names)
            self.names.append(name)
            self.types.append(self.type_names.index(type_name))
        return self._ids[key]


def _dedupe(edges):
    if not edges:
        return np.zeros((0, 3), dtype=np.int64)
    arr = np.asarray(edges, dtype=np.int64)
    _, first = np.unique(arr, axis=0, return_index=True)
    return arr[np.sort(first)]


def _parse_tsv_triple(path, vocab, relations, rel_ids):
    edges = []
    for lineno, line in _lines(path):
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(path, lineno,
                             f"expected head<TAB>relation<TAB>tail, got {len(parts)} fields")
        h, r, t = parts
        if r not in rel_ids:
            rel_ids[r] = len(relations)
            relations.append(r)
        edges.append((vocab.add("entity", h), rel_ids[r],
                      vocab.add("entity", t)))
    return edges


def _parse_movielens(path, vocab):
    raw = []
    for lineno, line in _lines(path):
        parts = line.split("::")
        if len(parts) != 4:
            raise ParseError(path, lineno,
                             "expected user::item::rating::timestamp")
        u, m, r, _ts = parts
        try:
            rating = int(r)
        except ValueError:
            raise SchemaError(
                f"{path}:{lineno}: rating {r!r} is not an integer") from None
        raw.append((vocab.add("user", u), rating, vocab.add("item", m)))
    return raw


def _parse_bipartite(path, vocab):
    edges = []
    for lineno, line in _lines(path):
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError(path, lineno, "expected user<TAB>item")
        u, m = parts
        edges.append((vocab.add("user", u), 0, vocab.add("item", m)))
    return edges


def _load_files(paths, format):
    """Shared-vocabulary parse of one or more edge files of the same format.

    Returns (Graph over the union, per-file deduplicated edge arrays).
    """
    if format not in FORMATS:
        raise SchemaError(f"unknown edge format {format!r}")
    if format == "tsv-triple":
        vocab = _Vocab(["entity"])
        relations, rel_ids = [], {}
        per_file = [_parse_tsv_triple(p, vocab, relations, rel_ids)
                    for p in paths]
    elif format == "movielens-rating":
        vocab = _Vocab(["user", "item"])
        raws = [_parse_movielens(p, vocab) for p in paths]
        # one relation per rating value, ordered ascending so the relation id
        # doubles as the rating rank
        rating_order = sorted({r for raw in raws for _, r, _ in raw})
        rel_of = {v: i for i, v in enumerate(rating_order)}
        relations = [str(v) for v in rating_order]
        per_file = [[(u, rel_of[r], m) for u, r, m in raw] for raw in raws]
    else:
        vocab = _Vocab(["user", "item"])
        relations = ["interacts"]
        per_file = [_parse_bipartite(p, vocab) for p in paths]

    arrays = [_dedupe(e) for e in per_file]
    if len(arrays) > 1:
        seen = set(map(tuple, arrays[0].tolist()))
        for arr, path in zip(arrays[1:], paths[1:]):
            overlap = [e for e in map(tuple, arr.tolist()) if e in seen]
            if overlap:
                raise SchemaError(
                    f"{path}: {len(overlap)} triples overlap an earlier file")
            seen.update(map(tuple, arr.tolist()))
    all_edges = (np.concatenate(arrays) if arrays
                 else np.zeros((0, 3), dtype=np.int64))
    graph = Graph(vocab.names, np.array(vocab.types, dtype=np.int64),
                  vocab.type_names, relations, all_edges)
    return graph, arrays


def load_triples(path, format):
    """Parse an edge file into a Graph. Vocabulary is inferred, not declared."""
    return _load_files([path], format)[0]


def load_split_files(train_path, test_path, format):
    """Pass-through loader for datasets shipping their own train/test split;
    the vocabulary covers both files."""
    from .core import EdgeSplit
    graph, (train, test) = _load_files([train_path, test_path], format)
    return graph, EdgeSplit(train, test, seed=-1, ratio=float("nan"))


def load_attributes(path, graph, ignore_unknown=False, node_type=None):
    """Parse node<TAB>attr_name<TAB>value lines into an AttributeTable.

    The sensitive type T* is inferred from the referenced nodes (they must
    all share one type); pass node_type to disambiguate when user and item
    names collide (e.g. both numbered from 1). Attributes must be total on
    T*; attribute order and per-attribute category indices follow first
    appearance.
    """
    attr_names, attr_idx = [], {}
    value_maps = []
    per_node = {}
    tstar = graph.type_id(node_type) if node_type else None
    name_lookup = {}
    for i, (name, t) in enumerate(zip(graph.node_names, graph.node_types)):
        if tstar is not None and int(t) != tstar:
            continue
        name_lookup.setdefault(name, []).append((int(t), i))

    for lineno, line in _lines(path):
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(path, lineno, "expected node<TAB>attr_name<TAB>value")
        node_name, attr, value = parts
        hits = name_lookup.get(node_name)
        if hits is None:
            if ignore_unknown:
                continue
            raise ParseError(path, lineno, f"unknown node {node_name!r}")
        if len(hits) > 1:
            raise NodeTypeError(
                f"{path}:{lineno}: node name {node_name!r} is ambiguous across types")
        node_type, node_id = hits[0]
        if tstar is None:
            tstar = node_type
        elif node_type != tstar:
            raise NodeTypeError(
                f"{path}:{lineno}: node {node_name!r} has type "
                f"{graph.type_names[node_type]!r}, expected {graph.type_names[tstar]!r}")
        if attr not in attr_idx:
            attr_idx[attr] = len(attr_names)
            attr_names.append(attr)
            value_maps.append({})
        k = attr_idx[attr]
        vm = value_maps[k]
        if value not in vm:
            vm[value] = len(vm)
        per_node.setdefault(node_id, {})[k] = vm[value]

    if tstar is None:
        raise SchemaError(f"{path}: attribute file is empty")
    tstar_ids = np.flatnonzero(graph.node_types == tstar)
    values = np.zeros((len(tstar_ids), len(attr_names)), dtype=np.int64)
    for row, node_id in enumerate(tstar_ids):
        got = per_node.get(int(node_id))
        if got is None or len(got) != len(attr_names):
            raise CompletenessError(
                f"node {graph.node_names[node_id]!r} is missing attribute values")
        for k, v in got.items():
            values[row, k] = v
    return AttributeTable(graph.type_names[tstar], attr_names,
                          [len(vm) for vm in value_maps], tstar_ids, values)


def derive_edge_attributes(graph, sensitive_nodes):
    """Binary attributes from edge existence to chosen sensitive nodes.

    Attribute k of node u is 1 iff any edge links u and sensitive_nodes[k]
    in either direction. The table is built on the opposite node type.
    """
    sens = np.asarray(sensitive_nodes, dtype=np.int64)
    if sens.size < 1:
        raise ValueError("need at least one sensitive node (K >= 1)")
    if sens.size and (sens.min() < 0 or sens.max() >= graph.num_nodes):
        raise IndexError("sensitive node id out of range")
    stypes = set(int(t) for t in graph.node_types[sens])
    if len(stypes) != 1:
        raise NodeTypeError("sensitive nodes must share one type")
    stype = stypes.pop()
    other = [i for i in range(len(graph.type_names)) if i != stype]
    if len(other) != 1:
        raise NodeTypeError("edge-derived attributes need exactly two node types")
    tstar = other[0]
    tstar_ids = np.flatnonzero(graph.node_types == tstar)
    row_of = np.full(graph.num_nodes, -1, dtype=np.int64)
    row_of[tstar_ids] = np.arange(len(tstar_ids))

    values = np.zeros((len(tstar_ids), sens.size), dtype=np.int64)
    col_of = {int(s): k for k, s in enumerate(sens)}
    for a, b in graph.edges[:, [0, 2]]:
        for u, s in ((a, b), (b, a)):
            k = col_of.get(int(s))
            if k is not None and row_of[u] >= 0:
                values[row_of[u], k] = 1
    return AttributeTable(graph.type_names[tstar],
                          [graph.node_names[s] for s in sens],
                          [2] * sens.size, tstar_ids, values)


def sample_sensitive_nodes(graph, type_name, count, top=100, exclude_top=5,
                           seed=0):
    """Pick sensitive nodes uniformly from the top-`top` of a type by degree,
    excluding the `exclude_top` highest-degree outliers."""
    ids = graph.nodes_of_type(type_name)
    deg = graph.degrees()[ids]
    order = ids[np.lexsort((ids, -deg))]
    pool = order[exclude_top:top]
    if len(pool) < count:
        raise ValueError(f"pool of {len(pool)} nodes cannot supply {count}")
    rng = np.random.default_rng(seed)
    pick = rng.choice(len(pool), size=count, replace=False)
    return pool[np.sort(pick)]
