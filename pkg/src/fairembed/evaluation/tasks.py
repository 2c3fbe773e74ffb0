"""Task-level metrics: link-prediction mean rank, edge AUC, rating RMSE,
and group prediction bias."""
import numpy as np

from ..errors import DegenerateInputError
from .metrics import auc, rmse


def filtered_embeddings(model, tstar_ids=None, filters=None, mask=None):
    """Deployed (V, d) representation matrix: eval-mode base encodings with
    the sensitive-type rows passed through the compositional filters."""
    base = np.array(model.base_all("eval"), copy=True)
    if filters is not None and mask is not None and np.any(mask):
        rows = (np.arange(len(base)) if tstar_ids is None
                else np.asarray(tstar_ids))
        base[rows] = filters.compose(base[rows], mask)
    return base


def mean_rank(model, reprs_all, test_edges, sides=("head", "tail"),
              pools=None):
    """Average rank of the true entity among all candidate corruptions of
    each side, rank 1 best, ties getting mid-rank credit. Raw ranking: no
    filtering of corruptions that happen to be real edges."""
    test_edges = np.asarray(test_edges).reshape(-1, 3)
    total, n = 0.0, 0
    for edge in test_edges:
        for slot in sides:
            col = 0 if slot == "head" else 2
            true_id = int(edge[col])
            if pools is not None:
                cands = pools[(int(edge[1]), slot)]
                if true_id not in cands:
                    cands = np.append(cands, true_id)
            else:
                cands = np.arange(len(reprs_all))
            scores = model.score_all_candidates(edge, slot, reprs_all, cands)
            s_true = scores[np.flatnonzero(cands == true_id)[0]]
            better = int((scores > s_true).sum())
            ties = int((scores == s_true).sum()) - 1
            total += 1.0 + better + 0.5 * ties
            n += 1
    return total / n


def edge_auc(model, reprs_all, test_edges, sampler, rng):
    """AUC of true test edges against one sampled negative per edge."""
    test_edges = np.asarray(test_edges).reshape(-1, 3)
    negs, _ = sampler.sample(test_edges, rng)
    s_pos = model.score_edges(test_edges, reprs_all)
    s_neg = model.score_edges(negs.reshape(-1, 3), reprs_all)
    scores = np.concatenate([s_pos, s_neg])
    labels = np.concatenate([np.ones(len(s_pos)), np.zeros(len(s_neg))])
    return auc(scores, labels)


def rating_rmse(model, reprs_all, test_edges, prediction="expected"):
    """RMSE of predicted ratings against the true numeric values.

    Predictions are the expectation of the rating distribution by default;
    prediction="argmax" uses the modal rating instead.
    """
    test_edges = np.asarray(test_edges).reshape(-1, 3)
    if prediction == "expected":
        preds = model.expected_ratings(test_edges, reprs_all)
    elif prediction == "argmax":
        logits = model.logits_for_edges(test_edges, reprs_all)
        preds = model.rating_values[logits.argmax(axis=1)]
    else:
        raise ValueError(f"prediction must be expected or argmax, got "
                         f"{prediction!r}")
    truths = model.rating_values[test_edges[:, 1]]
    return rmse(preds, truths)


def prediction_bias(model, reprs_all, user_ids, item_ids, attrs, k,
                    chunk=128):
    """Mean absolute difference between group-average predicted ratings.

    Per item, predictions are averaged within each value-group of attribute
    k and the absolute differences over all unordered group pairs are
    averaged; the result is the mean over items. Globally empty groups are
    skipped; fewer than two non-empty groups is an error.
    """
    user_ids = np.asarray(user_ids, dtype=np.int64)
    item_ids = np.asarray(item_ids, dtype=np.int64)
    vals = attrs.values_for(user_ids)[:, k]
    groups = [np.flatnonzero(vals == c) for c in range(attrs.cardinalities[k])]
    groups = [g for g in groups if len(g)]
    if len(groups) < 2:
        raise DegenerateInputError(
            f"attribute {attrs.attr_names[k]!r} has fewer than 2 non-empty groups")
    total = 0.0
    for lo in range(0, len(item_ids), chunk):
        items = item_ids[lo:lo + chunk]
        uu = np.repeat(user_ids, len(items))
        vv = np.tile(items, len(user_ids))
        edges = np.column_stack([uu, np.zeros(len(uu), dtype=np.int64), vv])
        preds = model.expected_ratings(edges, reprs_all).reshape(
            len(user_ids), len(items))
        means = np.stack([preds[g].mean(axis=0) for g in groups])  # (G, items)
        diffs = 0.0
        pairs = 0
        for a in range(len(groups)):
            for b in range(a + 1, len(groups)):
                diffs += np.abs(means[a] - means[b])
                pairs += 1
        total += float((diffs / pairs).sum())
    return total / len(item_ids)
