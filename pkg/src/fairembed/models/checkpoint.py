"""Checkpoint archive: one .npz holding metadata JSON, vocabularies, and
every parameter table (plus filter/discriminator sections when trained with
an adversary). Versioned; loaders reject mismatched versions and datasets."""
import hashlib
import json

import numpy as np

from ..errors import CompatibilityError
from ..fairness.banks import DiscriminatorBank, FilterBank, NetSpec
from . import build_model

FORMAT = "fairembed-checkpoint"
VERSION = 1


def vocab_hash(graph):
    payload = json.dumps([list(graph.node_names),
                          [int(t) for t in graph.node_types],
                          list(graph.type_names),
                          list(graph.relation_names)])
    return hashlib.sha256(payload.encode()).hexdigest()


def _spec_dict(spec):
    return {"layers": spec.layers, "hidden": spec.hidden,
            "dropout": spec.dropout}


def save_checkpoint(path, graph, model, filters=None, discriminators=None,
                    filter_spec=None, disc_spec=None, extra_meta=None):
    meta = {
        "format": FORMAT,
        "version": VERSION,
        "family": model.family,
        "dim": model.dim,
        "dtype": str(model.dtype),
        "vocab_hash": vocab_hash(graph),
        "node_names": list(graph.node_names),
        "node_types": [int(t) for t in graph.node_types],
        "type_names": list(graph.type_names),
        "relation_names": list(graph.relation_names),
        "use_batchnorm": bool(getattr(model, "use_batchnorm", False)),
        "has_adversary": filters is not None,
    }
    if filters is not None:
        meta["num_filters"] = filters.num_attrs
        meta["cardinalities"] = discriminators.cardinalities
        meta["filter_spec"] = _spec_dict(filter_spec or NetSpec())
        meta["disc_spec"] = _spec_dict(disc_spec or NetSpec())
    meta.update(extra_meta or {})

    arrays = {}
    for name, arr in zip(model.param_names(), model.params()):
        arrays[f"model.{name}"] = arr
    for name, arr in zip(model.state_names(), model.state_arrays()):
        arrays[f"state.{name}"] = arr
    if filters is not None:
        for k, net in enumerate(filters.nets):
            for i, p in enumerate(net.params()):
                arrays[f"filters.{k}.{i}"] = p
        for k, net in enumerate(discriminators.nets):
            for i, p in enumerate(net.params()):
                arrays[f"discs.{k}.{i}"] = p
    np.savez(path, meta=np.array(json.dumps(meta)), **arrays)
    return meta


def load_checkpoint(path, graph):
    """Restore (model, filters, discriminators, meta) against a dataset's
    graph; vocabulary and version mismatches are compatibility errors."""
    try:
        with np.load(path, allow_pickle=False) as data:
            if "meta" not in data:
                raise CompatibilityError(f"{path}: not a checkpoint archive")
            meta = json.loads(str(data["meta"]))
            arrays = {k: data[k] for k in data.files if k != "meta"}
    except (ValueError, OSError) as exc:
        raise CompatibilityError(f"{path}: unreadable checkpoint ({exc})") from None
    if meta.get("format") != FORMAT:
        raise CompatibilityError(f"{path}: unknown archive format")
    if meta.get("version") != VERSION:
        raise CompatibilityError(
            f"{path}: checkpoint version {meta.get('version')} "
            f"!= supported {VERSION}")
    if meta["vocab_hash"] != vocab_hash(graph):
        raise CompatibilityError(
            "checkpoint vocabulary does not match the dataset directory")

    kw = {}
    if meta["family"] == "rating":
        kw["use_batchnorm"] = meta["use_batchnorm"]
    model = build_model(meta["family"], graph, meta["dim"], None,
                        dtype=np.dtype(meta["dtype"]), **kw)
    for name, param in zip(model.param_names(), model.params()):
        param[:] = arrays[f"model.{name}"]
    for name, state in zip(model.state_names(), model.state_arrays()):
        state[:] = arrays[f"state.{name}"]

    filters = discs = None
    if meta.get("has_adversary"):
        fspec = NetSpec(**meta["filter_spec"])
        dspec = NetSpec(**meta["disc_spec"])
        filters = FilterBank(meta["num_filters"], meta["dim"], rng=None,
                             spec=fspec, dtype=np.dtype(meta["dtype"]))
        discs = DiscriminatorBank(meta["cardinalities"], meta["dim"],
                                  rng=None, spec=dspec,
                                  dtype=np.dtype(meta["dtype"]))
        for k, net in enumerate(filters.nets):
            for i, p in enumerate(net.params()):
                p[:] = arrays[f"filters.{k}.{i}"]
        for k, net in enumerate(discs.nets):
            for i, p in enumerate(net.params()):
                p[:] = arrays[f"discs.{k}.{i}"]
    return model, filters, discs, meta
