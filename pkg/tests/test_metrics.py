import numpy as np
import pytest

from fairembed.errors import DegenerateInputError
from fairembed.evaluation import auc, micro_f1, rmse


def pairwise_auc_oracle(scores, labels):
    """O(n^2) concordance count, ties worth half."""
    pos = [s for s, y in zip(scores, labels) if y]
    neg = [s for s, y in zip(scores, labels) if not y]
    total = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                total += 1.0
            elif p == n:
                total += 0.5
    return total / (len(pos) * len(neg))


def test_auc_perfect():
    assert auc([0.9, 0.1], [1, 0]) == 1.0


def test_auc_all_ties_is_half():
    assert auc([0.3, 0.3, 0.3, 0.3], [1, 0, 1, 0]) == 0.5


def test_auc_one_class_rejected():
    with pytest.raises(DegenerateInputError):
        auc([0.1, 0.2], [1, 1])


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_auc_matches_pairwise_oracle(seed):
    rng = np.random.default_rng(seed)
    n = 50
    scores = np.round(rng.normal(size=n), 1)  # rounding creates ties
    labels = rng.integers(0, 2, size=n)
    if labels.sum() in (0, n):
        labels[0] = 1 - labels[0]
    assert auc(scores, labels) == pytest.approx(
        pairwise_auc_oracle(scores, labels), abs=1e-12)


def test_auc_large_instance_against_oracle():
    rng = np.random.default_rng(9)
    scores = rng.normal(size=1000)
    labels = rng.integers(0, 2, size=1000)
    assert auc(scores, labels) == pytest.approx(
        pairwise_auc_oracle(scores, labels), abs=1e-12)


def test_micro_f1_equals_accuracy_for_single_label():
    rng = np.random.default_rng(3)
    preds = rng.integers(0, 4, size=200)
    labels = rng.integers(0, 4, size=200)
    assert micro_f1(preds, labels) == pytest.approx(
        float((preds == labels).mean()))


def test_micro_f1_bounds():
    assert micro_f1([1, 1, 1], [1, 1, 1]) == 1.0
    assert micro_f1([0, 0, 0], [1, 1, 1]) == 0.0


def test_rmse():
    assert rmse([1.0, 5.0], [1.0, 5.0]) == 0.0
    assert rmse([3.0, 3.0], [1.0, 5.0]) == pytest.approx(2.0)
