"""Command-line front end: prepare, train, evaluate, sweep.

Every command takes --config plus targeted overrides and is fully
reproducible: (config, seed) determines all outputs. Run directories are
named by a content hash of the resolved config, so repeated experiments
deduplicate.
"""
import argparse
import json
import os
import sys

import numpy as np

from .. import rngs
from ..errors import (CompatibilityError, ConfigError, DataError,
                      FairembedError, NumericError)
from ..evaluation import (ProbeConfig, edge_auc, filtered_embeddings,
                          heldout_combination_eval, majority_baseline,
                          mean_rank, prediction_bias, probe_leakage,
                          random_baseline, rating_rmse, validate_lambdas,
                          write_curves)
from ..evaluation.report import MetricsReport
from ..fairness import (AdversarialConfig, DiscriminatorBank, FilterBank,
                        MaskDistribution, NetSpec,
                        choose_heldout_combinations, train,
                        train_noncompositional)
from ..graph import (NegativeSampler, NegativeSamplerConfig,
                     derive_edge_attributes, k_core, load_attributes,
                     load_split_files, load_triples, sample_sensitive_nodes,
                     split_edges)
from ..models import build_model
from ..models.checkpoint import load_checkpoint, save_checkpoint
from .config import load_config, resolve_path, schema_help
from .store import load_dataset, save_dataset

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4
EXIT_COMPAT = 5


# ----------------------------------------------------------------- prepare

def _resolve_sensitive(graph, cfg):
    names_raw = cfg.get("dataset", "sensitive_nodes").strip()
    sample_n = cfg.get("dataset", "sensitive_sample")
    if names_raw:
        by_name = {}
        for i, name in enumerate(graph.node_names):
            by_name.setdefault(name, []).append(i)
        ids = []
        for name in [n.strip() for n in names_raw.split(",") if n.strip()]:
            hits = by_name.get(name)
            if not hits:
                raise DataError(f"sensitive node {name!r} not in the graph")
            if len(hits) > 1:
                raise DataError(f"sensitive node name {name!r} is ambiguous")
            ids.append(hits[0])
        return np.array(ids)
    if sample_n > 0:
        return sample_sensitive_nodes(
            graph, "item", sample_n, top=cfg.get("dataset", "sensitive_top"),
            exclude_top=cfg.get("dataset", "sensitive_exclude_top"),
            seed=cfg.get("dataset", "sensitive_seed"))
    return None


def cmd_prepare(cfg, force=False):
    edges_path = resolve_path(cfg.get("dataset", "edges"))
    if not os.path.exists(edges_path):
        raise DataError(f"edge file not found: {edges_path}")
    fmt = cfg.get("dataset", "format")
    test_path = resolve_path(cfg.get("dataset", "test_edges"))
    if test_path:
        if not os.path.exists(test_path):
            raise DataError(f"test edge file not found: {test_path}")
        graph, split = load_split_files(edges_path, test_path, fmt)
    else:
        graph = load_triples(edges_path, fmt)
        split = None

    k = cfg.get("dataset", "kcore")
    if k > 0:
        if split is not None:
            raise ConfigError("kcore cannot be combined with a provided split")
        graph = k_core(graph, k)
        if graph.num_nodes == 0:
            raise DataError(f"{k}-core of the graph is empty")
    if split is None:
        split = split_edges(graph, cfg.get("dataset", "split_ratio"),
                            cfg.get("dataset", "split_seed"))

    attrs = None
    attr_path = resolve_path(cfg.get("dataset", "attributes"))
    if attr_path:
        if not os.path.exists(attr_path):
            raise DataError(f"attribute file not found: {attr_path}")
        tstar_hint = "user" if fmt != "tsv-triple" else None
        attrs = load_attributes(attr_path, graph, ignore_unknown=k > 0,
                                node_type=tstar_hint)
    else:
        sens = _resolve_sensitive(graph, cfg)
        if sens is not None:
            attrs = derive_edge_attributes(graph, sens)

    out_dir = cfg.data_dir()
    save_dataset(out_dir, graph, attrs, split,
                 extra_meta={"source_format": fmt, "kcore": k})
    print(f"prepared dataset at {out_dir}: {graph.num_nodes} nodes, "
          f"{graph.num_edges} edges, "
          f"{attrs.num_attrs if attrs else 0} attributes")
    return out_dir


# ------------------------------------------------------------------- train

def _net_specs(cfg):
    fspec = NetSpec(cfg.get("fairness", "filter_layers"),
                    cfg.get("fairness", "filter_hidden"),
                    cfg.get("fairness", "filter_dropout"))
    dspec = NetSpec(cfg.get("fairness", "disc_layers"),
                    cfg.get("fairness", "disc_hidden"),
                    cfg.get("fairness", "disc_dropout"))
    return fspec, dspec


def _neg_config(cfg):
    return NegativeSamplerConfig(
        num_negatives=cfg.get("training", "negatives"),
        mode=cfg.get("training", "corruption"),
        filtered=cfg.get("training", "filtered_negatives"),
        type_constrained=cfg.get("training", "type_constrained"))


def _adv_config(cfg):
    return AdversarialConfig(
        lam=cfg.get("fairness", "lambda"),
        encoder_steps=cfg.get("fairness", "encoder_steps"),
        disc_steps=cfg.get("fairness", "disc_steps"),
        epochs=cfg.get("training", "epochs"),
        batch_size=cfg.get("training", "batch_size"),
        seed=cfg.get("training", "seed"),
        learning_rate=cfg.get("training", "learning_rate"))


def _model_kwargs(cfg):
    if cfg.get("model", "family") in ("dot", "rating"):
        return {"use_batchnorm": cfg.get("model", "batchnorm")}
    return {}


def _write_log(path, log):
    with open(path, "w") as fh:
        for rec in log:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def cmd_train(cfg, force=False):
    graph, attrs, split = load_dataset(cfg.data_dir())
    run_dir = cfg.out_dir()
    ckpt = os.path.join(run_dir, "checkpoint.npz")
    if os.path.exists(ckpt) and not force:
        print(f"run {cfg.run_name()} already has a checkpoint; skipping "
              "(use --force to retrain)")
        return run_dir
    os.makedirs(run_dir, exist_ok=True)

    lam = cfg.get("fairness", "lambda")
    seed = cfg.get("training", "seed")
    family = cfg.get("model", "family")
    dim = cfg.get("model", "dim")
    adv_cfg = _adv_config(cfg)
    neg_cfg = _neg_config(cfg)
    fspec, dspec = _net_specs(cfg)

    extra = {"lambda": lam, "seed": seed,
             "mask_p": cfg.get("fairness", "mask_p"),
             "config_hash": cfg.content_hash()}

    if lam > 0 and attrs is None:
        raise ConfigError("lambda > 0 needs a dataset with attributes")

    if lam > 0 and cfg.get("fairness", "noncompositional"):
        results = train_noncompositional(
            graph, attrs,
            model_factory=lambda s: build_model(
                family, graph, dim, rngs.stream(s, "model-init"),
                **_model_kwargs(cfg)),
            config=adv_cfg,
            filter_factory=lambda s, k: FilterBank(
                k, dim, rngs.stream(s, "filter-init"), spec=fspec),
            disc_factory=lambda s, cards: DiscriminatorBank(
                cards, dim, rngs.stream(s, "disc-init"), spec=dspec),
            train_edges=split.train_edges, neg_config=neg_cfg)
        for k, res in enumerate(results):
            save_checkpoint(
                os.path.join(run_dir, f"checkpoint_attr{k}.npz"), graph,
                res.model, res.filters, res.discriminators, fspec, dspec,
                extra_meta=dict(extra, adversary_attr=k))
            _write_log(os.path.join(run_dir, f"train_log_attr{k}.jsonl"),
                       res.log)
    else:
        model = build_model(family, graph, dim,
                            rngs.stream(seed, "model-init"),
                            **_model_kwargs(cfg))
        filters = discs = mask_dist = heldout = None
        if lam > 0:
            fraction = cfg.get("fairness", "heldout_fraction")
            if fraction > 0:
                heldout = choose_heldout_combinations(
                    attrs.num_attrs, fraction,
                    cfg.get("fairness", "heldout_seed"))
            mask_dist = MaskDistribution(attrs.num_attrs,
                                         cfg.get("fairness", "mask_p"))
            filters = FilterBank(attrs.num_attrs, dim,
                                 rngs.stream(seed, "filter-init"), spec=fspec)
            discs = DiscriminatorBank(attrs.cardinalities, dim,
                                      rngs.stream(seed, "disc-init"),
                                      spec=dspec)
        result = train(graph, attrs, model, adv_cfg, mask_dist=mask_dist,
                       filters=filters, discriminators=discs,
                       train_edges=split.train_edges, neg_config=neg_cfg,
                       heldout_combinations=heldout)
        if heldout is not None:
            extra["heldout"] = sorted(list(m) for m in heldout)
        save_checkpoint(ckpt, graph, result.model, result.filters,
                        result.discriminators, fspec, dspec, extra_meta=extra)
        _write_log(os.path.join(run_dir, "train_log.jsonl"), result.log)

    with open(os.path.join(run_dir, "config.resolved.ini"), "w") as fh:
        fh.write(cfg.to_ini())
    print(f"trained {cfg.run_name()} -> {run_dir}")
    return run_dir


# ---------------------------------------------------------------- evaluate

def _probe_config(cfg):
    _, dspec = _net_specs(cfg)
    return ProbeConfig(layers=dspec.layers, hidden=dspec.hidden,
                       dropout=dspec.dropout,
                       epochs=cfg.get("evaluation", "probe_epochs"),
                       batch_size=cfg.get("evaluation", "probe_batch"))


def _task_metric(cfg, graph, split, model, reprs):
    family = model.family
    seed = cfg.get("evaluation", "probe_seed")
    if family == "rating":
        return {"name": "rmse",
                "value": rating_rmse(model, reprs, split.test_edges),
                "split": "test-edges", "n": len(split.test_edges)}
    if family == "transd":
        return {"name": "mean_rank",
                "value": mean_rank(model, reprs, split.test_edges),
                "split": "test-edges", "n": len(split.test_edges)}
    sampler = NegativeSampler(graph, split.train_edges, _neg_config(cfg))
    return {"name": "edge_auc",
            "value": edge_auc(model, reprs, split.test_edges, sampler,
                              rngs.stream(seed, "eval")),
            "split": "test-edges", "n": len(split.test_edges)}


def _evaluate_one(cfg, graph, attrs, split, model, filters, discs, meta):
    probe_cfg = _probe_config(cfg)
    seed = cfg.get("evaluation", "probe_seed")
    num_attrs = attrs.num_attrs if attrs else 0
    if filters is not None:
        # compositional checkpoints are probed under the full mask; a
        # non-compositional sub-model has exactly one filter
        mask = np.ones(filters.num_attrs, dtype=bool)
        reprs = filtered_embeddings(model, attrs.node_ids, filters, mask)
    else:
        reprs = filtered_embeddings(model)

    leakage, baselines = {}, {}
    if attrs is not None:
        emb = reprs[attrs.node_ids]
        for k in range(num_attrs):
            name = attrs.attr_names[k]
            card = attrs.cardinalities[k]
            score = probe_leakage(emb, attrs, k, split_seed=seed + k,
                                  probe=probe_cfg)
            n_test = len(attrs.node_ids) - int(
                round(probe_cfg.train_fraction * len(attrs.node_ids)))
            leakage[name] = {"metric": "auc" if card == 2 else "micro_f1",
                             "score": score, "split": "probe-heldout-nodes",
                             "n_test": n_test}
            baselines[name] = {
                "majority": majority_baseline(attrs, k, split_seed=seed + k),
                "random": random_baseline(attrs, k)}

    task = _task_metric(cfg, graph, split, model, reprs)

    bias = {}
    bias_mode = cfg.get("evaluation", "bias")
    if model.family == "rating" and bias_mode != "off" and attrs is not None:
        users = attrs.node_ids
        items = np.flatnonzero(np.asarray(graph.node_types)
                               == graph.type_id("item"))
        for k in range(num_attrs):
            bias[attrs.attr_names[k]] = prediction_bias(
                model, reprs, users, items, attrs, k)

    heldout = {}
    if meta.get("heldout") and filters is not None:
        heldout = heldout_combination_eval(
            model, filters, attrs, [tuple(m) for m in meta["heldout"]],
            split_seed=seed, probe=probe_cfg,
            seen_limit=cfg.get("evaluation", "heldout_seen_limit"))
        heldout = {"heldout_mean": heldout["heldout_mean"],
                   "seen_mean": heldout["seen_mean"],
                   "gap": heldout["gap"],
                   "combinations": heldout["heldout"]}

    return MetricsReport(
        metadata={"seed": meta.get("seed"), "lambda": meta.get("lambda", 0.0),
                  "mask_p": meta.get("mask_p"), "family": model.family,
                  "adversary": filters is not None},
        leakage=leakage, baselines=baselines, task=task, bias=bias,
        heldout=heldout)


def cmd_evaluate(cfg, checkpoint=None):
    graph, attrs, split = load_dataset(cfg.data_dir())
    run_dir = cfg.out_dir()
    reports = []
    if checkpoint:
        paths = [checkpoint]
    else:
        single = os.path.join(run_dir, "checkpoint.npz")
        if os.path.exists(single):
            paths = [single]
        else:
            paths = sorted(
                os.path.join(run_dir, f) for f in os.listdir(run_dir)
                if f.startswith("checkpoint_attr")) if os.path.isdir(run_dir) else []
        if not paths:
            raise DataError(f"no checkpoint found under {run_dir}")
    for path in paths:
        model, filters, discs, meta = load_checkpoint(path, graph)
        report = _evaluate_one(cfg, graph, attrs, split, model, filters,
                               discs, meta)
        stem = os.path.splitext(os.path.basename(path))[0]
        suffix = "" if stem == "checkpoint" else stem.replace("checkpoint", "")
        with open(os.path.join(run_dir, f"metrics{suffix}.json"), "w") as fh:
            fh.write(report.to_json() + "\n")
        with open(os.path.join(run_dir, f"metrics{suffix}.txt"), "w") as fh:
            fh.write(report.to_text())
        print(report.to_text())
        reports.append(report)
    return reports


# ------------------------------------------------------------------- sweep

def cmd_sweep(cfg, lambdas, force=False):
    lams = validate_lambdas(lambdas)
    rows = []
    for lam in lams:
        sub = load_config(cfg.source_path,
                          overrides=dict(cfg.overrides,
                                         **{"fairness.lambda": lam}))
        cmd_train(sub, force=force)
        report = cmd_evaluate(sub)[0]
        rows.append({"lambda": lam, "metric": report.task["name"],
                     "value": report.task["value"]})
        for attr, rec in report.leakage.items():
            rows.append({"lambda": lam, "metric": f"leakage_{attr}",
                         "value": rec["score"]})
    out = os.path.join(cfg.get("run", "out"),
                       f"sweep-{cfg.content_hash()[:12]}")
    paths = write_curves(rows, out)
    print(f"sweep curves written to {out}:")
    for p in paths:
        print(f"  {p}")
    return rows


# -------------------------------------------------------------------- main

def _parser():
    p = argparse.ArgumentParser(
        prog="fairembed",
        description="Graph embeddings with compositional adversarial "
                    "fairness filters.",
        epilog=schema_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="run config file")
    common.add_argument("--lambda", dest="lam", type=float, default=None,
                        help="override fairness.lambda")
    common.add_argument("--seed", type=int, default=None,
                        help="override training.seed")
    common.add_argument("--epochs", type=int, default=None,
                        help="override training.epochs")
    common.add_argument("--out", default=None, help="override run.out")
    for name, help_text in (
            ("prepare", "materialize the dataset (k-core, attributes, splits)"),
            ("train", "train a model per the config"),
            ("evaluate", "leakage probes, task metric, bias, held-out table"),
            ("sweep", "train/evaluate across a lambda list")):
        sp = sub.add_parser(name, parents=[common], help=help_text,
                            epilog=schema_help(),
                            formatter_class=argparse.RawDescriptionHelpFormatter)
        if name in ("prepare", "train", "sweep"):
            sp.add_argument("--force", action="store_true",
                            help="redo work even if outputs exist")
        if name == "evaluate":
            sp.add_argument("--checkpoint", default=None,
                            help="explicit checkpoint path")
        if name == "sweep":
            sp.add_argument("--lambdas", required=True,
                            help="comma-separated ascending lambda values")
    return p


def _overrides(args):
    out = {}
    if args.lam is not None:
        out["fairness.lambda"] = args.lam
    if args.seed is not None:
        out["training.seed"] = args.seed
    if args.epochs is not None:
        out["training.epochs"] = args.epochs
    if args.out is not None:
        out["run.out"] = args.out
    return out


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        overrides = _overrides(args)
        cfg = load_config(args.config, overrides)
        cfg.source_path = args.config
        cfg.overrides = overrides
        if args.command == "prepare":
            cmd_prepare(cfg, force=args.force)
        elif args.command == "train":
            cmd_prepare_if_needed(cfg)
            cmd_train(cfg, force=args.force)
        elif args.command == "evaluate":
            cmd_evaluate(cfg, checkpoint=args.checkpoint)
        elif args.command == "sweep":
            lams = [float(x) for x in args.lambdas.split(",") if x.strip()]
            cmd_prepare_if_needed(cfg)
            cmd_sweep(cfg, lams, force=args.force)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except CompatibilityError as exc:
        print(f"compatibility error: {exc}", file=sys.stderr)
        return EXIT_COMPAT
    except FairembedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def cmd_prepare_if_needed(cfg):
    if not os.path.exists(os.path.join(cfg.data_dir(), "meta.json")):
        cmd_prepare(cfg)


if __name__ == "__main__":
    sys.exit(main())
