"""Scalar metrics: AUC via rank statistics, micro-F1, RMSE."""
import numpy as np

from ..errors import DegenerateInputError, ShapeError


def _average_ranks(scores):
    """1-based ranks with ties sharing their mid-rank."""
    scores = np.asarray(scores, dtype=np.float64)
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores))
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def auc(scores, labels):
    """Probability a random positive outscores a random negative, ties
    counting half (Mann-Whitney)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(bool)
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateInputError("AUC needs both classes present")
    ranks = _average_ranks(scores)
    return float((ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0)
                 / (n_pos * n_neg))


def micro_f1(predictions, labels):
    """Micro-averaged F1 from global TP/FP/FN counts. For single-label
    multiclass input this equals accuracy."""
    predictions = np.asarray(predictions)
    labels = np.asarray(labels)
    if predictions.shape != labels.shape:
        raise ShapeError("predictions/labels length mismatch")
    classes = np.union1d(predictions, labels)
    tp = fp = fn = 0
    for c in classes:
        tp += int(((predictions == c) & (labels == c)).sum())
        fp += int(((predictions == c) & (labels != c)).sum())
        fn += int(((predictions != c) & (labels == c)).sum())
    if tp == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return float(2 * precision * recall / (precision + recall))


def rmse(predictions, truths):
    predictions = np.asarray(predictions, dtype=np.float64)
    truths = np.asarray(truths, dtype=np.float64)
    return float(np.sqrt(((predictions - truths) ** 2).mean()))
