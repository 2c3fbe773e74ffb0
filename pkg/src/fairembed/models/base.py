"""Shared pieces of the three encoder/score families.

Training contract used by the fairness trainer:

  ctx = model.begin_batch(pos, negs, mode, rng)   # gathers base encodings
  loss, d_repr = model.edge_loss(ctx, reprs)      # reprs = (possibly
                                                  #   filtered) ctx.base
  grads = model.param_grads(ctx, d_base)          # d_base = d_repr pushed
                                                  #   back through filters

ctx.base rows are unique nodes of the batch; ctx.rows maps each triple slot
to its row. Only rows whose node type is sensitive get filtered by the
caller, everything else passes through unchanged.
"""
from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeError


@dataclass
class BatchCtx:
    nodes: np.ndarray
    base: np.ndarray
    pos: np.ndarray
    negs: np.ndarray = None
    rows: dict = field(default_factory=dict)
    stash: dict = field(default_factory=dict)


def unique_rows(*id_arrays):
    """Unique node ids over all arrays plus each array mapped to row indices."""
    flat = [np.asarray(a).reshape(-1) for a in id_arrays]
    nodes, inverse = np.unique(np.concatenate(flat), return_inverse=True)
    out, lo = [], 0
    for a in id_arrays:
        size = np.asarray(a).size
        out.append(inverse[lo:lo + size].reshape(np.asarray(a).shape))
        lo += size
    return nodes, out


def margin_loss(s_pos, s_negs):
    """Max-margin loss with margin 1, averaged over the negatives."""
    s_negs = np.atleast_1d(np.asarray(s_negs, dtype=np.float64))
    if s_negs.size == 0:
        raise ValueError("margin_loss needs at least one negative score")
    return float(np.maximum(0.0, 1.0 - s_pos + s_negs).mean())


def margin_loss_batch(s_pos, s_neg):
    """Batched hinge with gradients. s_pos (B,), s_neg (B, m).

    Loss is the batch mean of the per-positive mean over negatives;
    gradients are w.r.t. the scores.
    """
    if s_neg.ndim != 2 or s_neg.shape[0] != s_pos.shape[0]:
        raise ShapeError("negative scores must be (batch, m)")
    b, m = s_neg.shape
    viol = 1.0 - s_pos[:, None] + s_neg
    active = viol > 0
    loss = float(np.maximum(viol, 0.0).mean(axis=1).mean())
    dneg = active.astype(s_neg.dtype) / (b * m)
    dpos = -dneg.sum(axis=1)
    return loss, dpos, dneg


def init_embeddings(rng, n, dim, dtype):
    """Zero-mean normal, std 1/sqrt(dim), so row norms start near 1. A None
    rng gives zeros (checkpoint restore overwrites them)."""
    if rng is None:
        return np.zeros((n, dim), dtype=dtype)
    return (rng.normal(size=(n, dim)) / np.sqrt(dim)).astype(dtype)
