"""Bilinear multi-relation rating model with log-likelihood loss.

Each rating value is a relation r scored by the bilinear form z_u^T Q_r z_v
with Q_r = a_{r,1} P_1 + a_{r,2} P_2 over two shared basis matrices. The
per-edge score is the log-softmax of these forms over the rating vocabulary
and the loss is its negation (the literal unexponentiated log-sum is
undefined for negative bilinear forms, so the softmax reading is used).
"""
from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..errors import StateError
from ..nn.dense import BatchNorm
from ..nn.heads import softmax, softmax_xent
from .base import BatchCtx, init_embeddings


@dataclass
class RatingScoreParams:
    basis1: np.ndarray     # (d, d)
    basis2: np.ndarray     # (d, d)
    coef: np.ndarray       # (|R|, 2)


def rating_distribution(enc_u, enc_v, params):
    b1 = float(enc_u @ params.basis1 @ enc_v)
    b2 = float(enc_u @ params.basis2 @ enc_v)
    logits = params.coef[:, 0] * b1 + params.coef[:, 1] * b2
    return softmax(logits.astype(np.float64))


def rating_loss(distribution, rating):
    distribution = np.asarray(distribution)
    rating = int(rating)
    if not 0 <= rating < len(distribution):
        raise IndexError(f"rating index {rating} out of range")
    return float(-np.log(np.maximum(distribution[rating],
                                    np.finfo(np.float64).tiny)))


def expected_rating(distribution, values):
    distribution = np.asarray(distribution, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    return float(distribution @ values)


class RatingModel:
    family = "rating"

    def __init__(self, graph, dim, rng, dtype=np.float32, use_batchnorm=True):
        self.dim = dim
        self.dtype = np.dtype(dtype)
        self.num_nodes = graph.num_nodes
        self.num_relations = graph.num_relations
        self.use_batchnorm = use_batchnorm
        self.user_type = graph.type_id("user")
        self.is_user = np.asarray(graph.node_types) == self.user_type
        self.rating_values = np.array([float(x) for x in graph.relation_names])
        self.emb = init_embeddings(rng, graph.num_nodes, dim, self.dtype)
        bound = 1.0 / np.sqrt(dim)
        if rng is None:
            self.basis1 = np.zeros((dim, dim), dtype=self.dtype)
            self.basis2 = np.zeros((dim, dim), dtype=self.dtype)
            self.coef = np.zeros((graph.num_relations, 2), dtype=self.dtype)
        else:
            self.basis1 = rng.uniform(-bound, bound, (dim, dim)).astype(self.dtype)
            self.basis2 = rng.uniform(-bound, bound, (dim, dim)).astype(self.dtype)
            self.coef = rng.uniform(-1.0, 1.0,
                                    (graph.num_relations, 2)).astype(self.dtype)
        self.bn_user = BatchNorm(dim, dtype=self.dtype) if use_batchnorm else None
        self.bn_item = BatchNorm(dim, dtype=self.dtype) if use_batchnorm else None

    def as_params(self):
        return RatingScoreParams(self.basis1, self.basis2, self.coef)

    def params(self):
        out = [self.emb, self.basis1, self.basis2, self.coef]
        if self.use_batchnorm:
            out += self.bn_user.params() + self.bn_item.params()
        return out

    def param_names(self):
        out = ["emb", "basis1", "basis2", "coef"]
        if self.use_batchnorm:
            out += ["bn_user.gamma", "bn_user.beta", "bn_item.gamma",
                    "bn_item.beta"]
        return out

    def state_names(self):
        if not self.use_batchnorm:
            return []
        return ["bn_user.running_mean", "bn_user.running_var",
                "bn_item.running_mean", "bn_item.running_var"]

    def state_arrays(self):
        if not self.use_batchnorm:
            return []
        return self.bn_user.state_arrays() + self.bn_item.state_arrays()

    def base_encode(self, node_ids, mode="eval"):
        if mode != "eval":
            raise StateError("train-mode encodings only exist inside a batch")
        node_ids = np.asarray(node_ids, dtype=np.int64)
        rows = self.emb[node_ids]
        if not self.use_batchnorm:
            return rows
        out = np.empty_like(rows)
        for bn, want_user in ((self.bn_user, True), (self.bn_item, False)):
            mask = self.is_user[node_ids] == want_user
            if mask.any():
                out[mask] = bn.forward(rows[mask], "eval")
        return out

    def base_all(self, mode="eval"):
        return self.base_encode(np.arange(self.num_nodes), mode)

    def begin_batch(self, pos, negs=None, mode="train", rng=None):
        users, u_rows = np.unique(pos[:, 0], return_inverse=True)
        items, v_rows = np.unique(pos[:, 2], return_inverse=True)
        eu = self.emb[users]
        ev = self.emb[items]
        if self.use_batchnorm:
            eu = self.bn_user.forward(eu, mode)
            ev = self.bn_item.forward(ev, mode)
        base = np.concatenate([eu, ev], axis=0)
        nodes = np.concatenate([users, items])
        return BatchCtx(nodes=nodes, base=base, pos=pos, negs=None,
                        rows={"pos_head": u_rows,
                              "pos_tail": len(users) + v_rows},
                        stash={"n_users": len(users), "mode": mode})

    def edge_loss(self, ctx, reprs):
        zu = reprs[ctx.rows["pos_head"]]
        zv = reprs[ctx.rows["pos_tail"]]
        labels = ctx.pos[:, 1]
        n = len(labels)
        b1 = ((zu @ self.basis1) * zv).sum(axis=1)
        b2 = ((zu @ self.basis2) * zv).sum(axis=1)
        logits = np.outer(b1, self.coef[:, 0]) + np.outer(b2, self.coef[:, 1])
        losses, _, dlogits = softmax_xent(logits.astype(np.float64), labels)
        loss = float(losses.mean())
        dlogits = (dlogits / n).astype(reprs.dtype)

        dcoef = np.stack([dlogits.T @ b1, dlogits.T @ b2], axis=1)
        db1 = dlogits @ self.coef[:, 0]
        db2 = dlogits @ self.coef[:, 1]
        dbasis1 = (zu * db1[:, None]).T @ zv
        dbasis2 = (zu * db2[:, None]).T @ zv
        dzu = db1[:, None] * (zv @ self.basis1.T) + db2[:, None] * (zv @ self.basis2.T)
        dzv = db1[:, None] * (zu @ self.basis1) + db2[:, None] * (zu @ self.basis2)

        dreprs = np.zeros_like(reprs)
        _kernels.scatter_add(dreprs, ctx.rows["pos_head"], dzu)
        _kernels.scatter_add(dreprs, ctx.rows["pos_tail"], dzv)
        ctx.stash["grads"] = (dbasis1, dbasis2, dcoef)
        return loss, dreprs

    def param_grads(self, ctx, d_base):
        nu = ctx.stash["n_users"]
        dbasis1, dbasis2, dcoef = ctx.stash["grads"]
        demb = np.zeros_like(self.emb)
        if self.use_batchnorm:
            du, dgu, dbu = self.bn_user.backward(d_base[:nu])
            dv, dgi, dbi = self.bn_item.backward(d_base[nu:])
            _kernels.scatter_add(demb, ctx.nodes[:nu], du)
            _kernels.scatter_add(demb, ctx.nodes[nu:], dv)
            return [demb, dbasis1, dbasis2, dcoef, dgu, dbu, dgi, dbi]
        _kernels.scatter_add(demb, ctx.nodes, d_base)
        return [demb, dbasis1, dbasis2, dcoef]

    def logits_for_edges(self, edges, reprs_all):
        e = np.asarray(edges).reshape(-1, 3)
        zu, zv = reprs_all[e[:, 0]], reprs_all[e[:, 2]]
        b1 = ((zu @ self.basis1) * zv).sum(axis=1)
        b2 = ((zu @ self.basis2) * zv).sum(axis=1)
        return np.outer(b1, self.coef[:, 0]) + np.outer(b2, self.coef[:, 1])

    def score_edges(self, edges, reprs_all):
        """log p(observed rating | u, v) under the softmax over ratings."""
        e = np.asarray(edges).reshape(-1, 3)
        logits = self.logits_for_edges(e, reprs_all).astype(np.float64)
        logz = np.log(np.exp(logits - logits.max(1, keepdims=True)).sum(1))
        centered = logits - logits.max(1, keepdims=True)
        return centered[np.arange(len(e)), e[:, 1]] - logz

    def expected_ratings(self, edges, reprs_all):
        logits = self.logits_for_edges(edges, reprs_all).astype(np.float64)
        return softmax(logits, axis=1) @ self.rating_values

    def score_all_candidates(self, edge, slot, reprs_all, candidates):
        h, r, t = edge
        cands = np.asarray(candidates)
        if slot == "head":
            e = np.column_stack([cands, np.full(len(cands), r),
                                 np.full(len(cands), t)])
        else:
            e = np.column_stack([np.full(len(cands), h),
                                 np.full(len(cands), r), cands])
        return self.score_edges(e, reprs_all)
