"""Materialized dataset directories: vocabularies, splits, attributes.

Everything written here is a deterministic function of the resolved config,
so re-running prepare produces byte-identical files.
"""
import json
import os

import numpy as np

from ..errors import DataError
from ..graph.core import AttributeTable, Graph

META = "meta.json"


def save_dataset(out_dir, graph, attrs, split, extra_meta=None):
    os.makedirs(out_dir, exist_ok=True)
    meta = {
        "format_version": 1,
        "num_nodes": graph.num_nodes,
        "num_relations": graph.num_relations,
        "num_edges": graph.num_edges,
        "type_names": list(graph.type_names),
        "relation_names": list(graph.relation_names),
        "train_edges": len(split.train_edges),
        "test_edges": len(split.test_edges),
        "split_seed": split.seed,
        "split_ratio": split.ratio,
        "has_attributes": attrs is not None,
    }
    if attrs is not None:
        meta["attr_names"] = list(attrs.attr_names)
        meta["cardinalities"] = [int(c) for c in attrs.cardinalities]
        meta["attr_node_type"] = attrs.node_type
    meta.update(extra_meta or {})
    with open(os.path.join(out_dir, META), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(os.path.join(out_dir, "nodes.tsv"), "w") as fh:
        for i, (name, t) in enumerate(zip(graph.node_names, graph.node_types)):
            fh.write(f"{i}\t{name}\t{graph.type_names[t]}\n")
    with open(os.path.join(out_dir, "relations.tsv"), "w") as fh:
        for i, name in enumerate(graph.relation_names):
            fh.write(f"{i}\t{name}\n")
    np.save(os.path.join(out_dir, "train_edges.npy"), split.train_edges)
    np.save(os.path.join(out_dir, "test_edges.npy"), split.test_edges)
    if attrs is not None:
        np.save(os.path.join(out_dir, "attr_node_ids.npy"), attrs.node_ids)
        np.save(os.path.join(out_dir, "attr_values.npy"), attrs.values)
    return meta


def load_dataset(data_dir):
    """Rebuild (graph, attrs-or-None, split) from a prepared directory."""
    meta_path = os.path.join(data_dir, META)
    if not os.path.exists(meta_path):
        raise DataError(
            f"no prepared dataset at {data_dir} (run `prepare` first)")
    with open(meta_path) as fh:
        meta = json.load(fh)
    if meta.get("format_version") != 1:
        raise DataError(f"{data_dir}: unsupported dataset format version")
    names, types = [], []
    type_of = {t: i for i, t in enumerate(meta["type_names"])}
    with open(os.path.join(data_dir, "nodes.tsv")) as fh:
        for line in fh:
            _i, name, tname = line.rstrip("\n").split("\t")
            names.append(name)
            types.append(type_of[tname])
    train = np.load(os.path.join(data_dir, "train_edges.npy"))
    test = np.load(os.path.join(data_dir, "test_edges.npy"))
    graph = Graph(names, np.array(types), meta["type_names"],
                  meta["relation_names"],
                  np.concatenate([train, test]) if len(test) else train)
    attrs = None
    if meta["has_attributes"]:
        attrs = AttributeTable(
            meta["attr_node_type"], meta["attr_names"],
            meta["cardinalities"],
            np.load(os.path.join(data_dir, "attr_node_ids.npy")),
            np.load(os.path.join(data_dir, "attr_values.npy")))
    from ..graph.core import EdgeSplit
    split = EdgeSplit(train, test, meta["split_seed"], meta["split_ratio"])
    return graph, attrs, split
