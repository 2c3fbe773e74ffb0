"""Lambda tradeoff sweeps and held-out mask-combination evaluation."""
import numpy as np

from ..errors import ConfigError
from ..fairness.masks import mask_key
from .probes import probe_leakage
from .tasks import filtered_embeddings


def validate_lambdas(lambdas):
    lams = [float(x) for x in lambdas]
    if any(x < 0 for x in lams):
        raise ConfigError("lambda values must be non-negative")
    if len(set(lams)) != len(lams):
        raise ConfigError("duplicate lambda entries")
    if lams != sorted(lams):
        raise ConfigError("lambda values must be ascending")
    return lams


def tradeoff_sweep(lambdas, run_point):
    """Train/evaluate one model per lambda (shared seed) and tabulate.

    run_point(lam) -> dict of metric name -> value. Returns flat rows
    suitable for write_curves.
    """
    rows = []
    for lam in validate_lambdas(lambdas):
        metrics = run_point(lam)
        for name, value in metrics.items():
            rows.append({"lambda": lam, "metric": name, "value": float(value)})
    return rows


def heldout_combination_eval(model, filters, attrs, heldout_masks,
                             split_seed, probe=None, seen_limit=64):
    """Leakage on held-out mask combinations versus combinations seen in
    training.

    For each held-out mask S, embeddings are filtered under S and every
    k in S is probed; the seen-side mean uses the non-held-out non-empty
    masks (all of them when the mask space is small, otherwise a matched
    random sample). Returns a dict with per-combination scores and the
    held-out/seen means.
    """
    k_attrs = attrs.num_attrs
    heldout = sorted(tuple(int(b) for b in m) for m in heldout_masks)
    all_masks = [tuple((code >> k) & 1 for k in range(k_attrs))
                 for code in range(1, 2 ** k_attrs)]
    seen = [m for m in all_masks if m not in set(heldout)]
    if len(seen) > seen_limit:
        rng = np.random.default_rng(split_seed)
        pick = rng.choice(len(seen), size=max(len(heldout), 1), replace=False)
        seen = [seen[i] for i in sorted(pick)]

    def probe_masks(masks):
        table = {}
        scores = []
        for m in masks:
            mask = np.array(m, dtype=bool)
            reprs = filtered_embeddings(model, attrs.node_ids, filters, mask)
            emb = reprs[attrs.node_ids]
            per_attr = {}
            for k in np.flatnonzero(mask):
                score = probe_leakage(emb, attrs, int(k), split_seed, probe)
                per_attr[attrs.attr_names[k]] = score
                scores.append(score)
            table["".join(map(str, mask_key(mask)))] = per_attr
        return table, (float(np.mean(scores)) if scores else float("nan"))

    heldout_table, heldout_mean = probe_masks(heldout)
    seen_table, seen_mean = probe_masks(seen)
    return {
        "heldout": heldout_table,
        "seen": seen_table,
        "heldout_mean": heldout_mean,
        "seen_mean": seen_mean,
        "gap": (heldout_mean - seen_mean
                if np.isfinite(heldout_mean) and np.isfinite(seen_mean)
                else float("nan")),
    }
