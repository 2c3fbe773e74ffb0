"""Softmax classification head used by discriminators and leakage probes."""
import numpy as np


def softmax(logits, axis=-1):
    z = logits - logits.max(axis=axis, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=axis, keepdims=True)


def softmax_xent(logits, labels):
    """Batched cross-entropy on true classes.

    logits (n, C), labels (n,) int. Returns (losses (n,), probs (n, C),
    dlogits (n, C)) where dlogits is the gradient of the summed loss.
    """
    logits = np.atleast_2d(logits)
    labels = np.asarray(labels)
    n, c = logits.shape
    if c < 2:
        raise ValueError("need at least 2 classes")
    if labels.min() < 0 or labels.max() >= c:
        raise IndexError(f"label out of range for {c} classes")
    probs = softmax(logits, axis=1)
    eps = np.finfo(probs.dtype).tiny
    losses = -np.log(np.maximum(probs[np.arange(n), labels], eps))
    dlogits = probs.copy()
    dlogits[np.arange(n), labels] -= 1
    return losses, probs, dlogits.astype(logits.dtype)


def classification_head(logits, label):
    """Loss and class probabilities for a single example.

    Returns (-log p[label], softmax probabilities). The binary case is the
    usual complementary sigmoid pair.
    """
    logits = np.asarray(logits, dtype=np.float64)
    if logits.ndim != 1:
        raise ValueError("classification_head takes a single logit vector")
    losses, probs, _ = softmax_xent(logits[None, :], [int(label)])
    return float(losses[0]), probs[0]
