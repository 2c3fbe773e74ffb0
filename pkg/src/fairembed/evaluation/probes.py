"""Post-hoc leakage probes: freshly trained classifiers, discriminator-sized,
measuring how much sensitive information survives in frozen embeddings."""
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateSplitError
from ..graph.sampling import batch_iter
from ..nn.adam import AdamOptimizer
from ..nn.dense import DenseNet
from ..nn.heads import softmax_xent
from .metrics import auc, micro_f1

_RESEED_TRIES = 20


@dataclass
class ProbeConfig:
    layers: int = 2
    hidden: int = 0              # 0 means 2 * embedding dim
    dropout: float = 0.0
    epochs: int = 50
    batch_size: int = 256
    learning_rate: float = 1e-3
    train_fraction: float = 0.9


def _split_rows(n, labels, seed, fraction=0.9):
    """Train/test row split whose test part has more than one class,
    reseeding on degenerate draws."""
    for attempt in range(_RESEED_TRIES):
        rng = np.random.default_rng([seed, attempt])
        perm = rng.permutation(n)
        cut = int(round(fraction * n))
        train, test = perm[:cut], perm[cut:]
        if len(test) and len(np.unique(labels[test])) >= 2:
            return train, test
    raise DegenerateSplitError(
        "could not draw a probe test split with more than one class")


def train_probe(embeddings, labels, num_classes, seed, probe=None):
    """Train a fresh classifier on frozen embeddings; returns (net, train
    rows, test rows)."""
    probe = probe or ProbeConfig()
    embeddings = np.asarray(embeddings)
    labels = np.asarray(labels)
    train_rows, test_rows = _split_rows(len(embeddings), labels, seed,
                                        probe.train_fraction)
    dim = embeddings.shape[1]
    hidden = probe.hidden or 2 * dim
    widths = [dim] + [hidden] * (probe.layers - 1) + [num_classes]
    rng = np.random.default_rng([seed, 7001])
    net = DenseNet(widths, rng=rng, dropout=probe.dropout,
                   final_activation=False, dtype=embeddings.dtype)
    opt = AdamOptimizer(net.params(), learning_rate=probe.learning_rate)
    shuffle_rng = np.random.default_rng([seed, 7002])
    dropout_rng = np.random.default_rng([seed, 7003])
    idx = np.arange(len(train_rows))
    for _ in range(probe.epochs):
        for batch in batch_iter(idx, probe.batch_size, shuffle_rng):
            rows = train_rows[batch]
            x = embeddings[rows]
            logits = net.forward(x, mode="train", rng=dropout_rng)
            _, _, dlogits = softmax_xent(logits.astype(np.float64),
                                         labels[rows])
            _, layer_grads = net.backward(
                (dlogits / len(rows)).astype(x.dtype))
            opt.step(net.flat_grads(layer_grads))
    return net, train_rows, test_rows


def probe_leakage(embeddings, attrs, k, split_seed, probe=None):
    """Leakage score of attribute k from the given (already filtered)
    embeddings: AUC for binary attributes, micro-F1 for multiclass.

    embeddings rows must align with attrs.node_ids. Deterministic in
    split_seed.
    """
    labels = attrs.values[:, k]
    card = attrs.cardinalities[k]
    net, _, test_rows = train_probe(embeddings, labels, card, split_seed,
                                    probe)
    logits = net.forward(embeddings[test_rows], mode="eval")
    if card == 2:
        z = logits.astype(np.float64)
        z -= z.max(axis=1, keepdims=True)
        e = np.exp(z)
        p1 = e[:, 1] / e.sum(axis=1)
        return auc(p1, labels[test_rows])
    return micro_f1(logits.argmax(axis=1), labels[test_rows])


def majority_baseline(attrs, k, split_seed):
    """Score of always predicting the most frequent training class, under
    the probe's metric and split."""
    labels = attrs.values[:, k]
    train_rows, test_rows = _split_rows(len(labels), labels, split_seed)
    counts = np.bincount(labels[train_rows], minlength=attrs.cardinalities[k])
    top = int(counts.argmax())
    if attrs.cardinalities[k] == 2:
        return auc(np.zeros(len(test_rows)), labels[test_rows])  # all ties
    return micro_f1(np.full(len(test_rows), top), labels[test_rows])


def random_baseline(attrs, k):
    """Expected score of uniformly random predictions: 0.5 AUC for binary,
    1/|A_k| micro-F1 for multiclass (exact expectation, not a sample)."""
    card = attrs.cardinalities[k]
    return 0.5 if card == 2 else 1.0 / card
