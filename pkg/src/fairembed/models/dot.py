"""Lookup encoder with dot-product scoring and max-margin loss."""
import numpy as np

from .. import _kernels
from ..errors import ShapeError, StateError
from ..nn.dense import BatchNorm
from .base import BatchCtx, init_embeddings, margin_loss_batch, unique_rows


def dot_score(enc_u, enc_v):
    enc_u = np.asarray(enc_u)
    enc_v = np.asarray(enc_v)
    if enc_u.shape != enc_v.shape:
        raise ShapeError(f"dimension mismatch {enc_u.shape} vs {enc_v.shape}")
    return float(np.dot(enc_u, enc_v))


class DotModel:
    family = "dot"

    def __init__(self, graph, dim, rng, dtype=np.float32, use_batchnorm=False):
        self.dim = dim
        self.dtype = np.dtype(dtype)
        self.num_nodes = graph.num_nodes
        self.use_batchnorm = use_batchnorm
        self.emb = init_embeddings(rng, graph.num_nodes, dim, self.dtype)
        if use_batchnorm:
            # one normalizer per node type (user side, item side)
            self.is_user = np.asarray(graph.node_types) == 0
            self.bn_user = BatchNorm(dim, dtype=self.dtype)
            self.bn_item = BatchNorm(dim, dtype=self.dtype)

    def params(self):
        out = [self.emb]
        if self.use_batchnorm:
            out += self.bn_user.params() + self.bn_item.params()
        return out

    def param_names(self):
        out = ["emb"]
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

    def _bn_encode(self, node_ids, mode):
        rows = self.emb[node_ids]
        out = np.empty_like(rows)
        u_sel = self.is_user[node_ids]
        for bn, sel in ((self.bn_user, u_sel), (self.bn_item, ~u_sel)):
            if sel.any():
                out[sel] = bn.forward(rows[sel], mode)
            else:
                bn._cache = None
        return out, u_sel

    def base_encode(self, node_ids, mode="eval"):
        node_ids = np.asarray(node_ids, dtype=np.int64)
        if not self.use_batchnorm:
            return self.emb[node_ids]
        if mode != "eval":
            raise StateError("train-mode encodings only exist inside a batch")
        return self._bn_encode(node_ids, "eval")[0]

    def base_all(self, mode="eval"):
        return self.base_encode(np.arange(self.num_nodes), mode)

    def begin_batch(self, pos, negs, mode="train", rng=None):
        nodes, (ph, pt, nh, nt) = unique_rows(pos[:, 0], pos[:, 2],
                                              negs[:, :, 0], negs[:, :, 2])
        if self.use_batchnorm:
            base, u_sel = self._bn_encode(nodes, mode)
            stash = {"u_sel": u_sel}
        else:
            base, stash = self.emb[nodes], {}
        return BatchCtx(nodes=nodes, base=base, pos=pos, negs=negs,
                        rows={"pos_head": ph, "pos_tail": pt,
                              "neg_head": nh, "neg_tail": nt}, stash=stash)

    def edge_loss(self, ctx, reprs):
        r = ctx.rows
        s_pos = (reprs[r["pos_head"]] * reprs[r["pos_tail"]]).sum(axis=1)
        s_neg = (reprs[r["neg_head"]] * reprs[r["neg_tail"]]).sum(axis=2)
        loss, dpos, dneg = margin_loss_batch(s_pos.astype(np.float64),
                                             s_neg.astype(np.float64))
        dreprs = np.zeros_like(reprs)
        dpos = dpos.astype(reprs.dtype)
        dneg = dneg.astype(reprs.dtype)
        _kernels.scatter_add(dreprs, r["pos_head"],
                             dpos[:, None] * reprs[r["pos_tail"]])
        _kernels.scatter_add(dreprs, r["pos_tail"],
                             dpos[:, None] * reprs[r["pos_head"]])
        flat_nh = r["neg_head"].reshape(-1)
        flat_nt = r["neg_tail"].reshape(-1)
        dneg_flat = dneg.reshape(-1, 1)
        _kernels.scatter_add(dreprs, flat_nh, dneg_flat * reprs[flat_nt])
        _kernels.scatter_add(dreprs, flat_nt, dneg_flat * reprs[flat_nh])
        return loss, dreprs

    def param_grads(self, ctx, d_base):
        demb = np.zeros_like(self.emb)
        if not self.use_batchnorm:
            _kernels.scatter_add(demb, ctx.nodes, d_base)
            return [demb]
        u_sel = ctx.stash["u_sel"]
        grads = {"bn_user": (np.zeros_like(self.bn_user.gamma),) * 2,
                 "bn_item": (np.zeros_like(self.bn_item.gamma),) * 2}
        for name, bn, sel in (("bn_user", self.bn_user, u_sel),
                              ("bn_item", self.bn_item, ~u_sel)):
            if sel.any():
                dx, dgamma, dbeta = bn.backward(d_base[sel])
                _kernels.scatter_add(demb, ctx.nodes[sel], dx)
                grads[name] = (dgamma, dbeta)
        return [demb, *grads["bn_user"], *grads["bn_item"]]

    def score_edges(self, edges, reprs_all):
        """Scores from a full (V, d) representation matrix."""
        e = np.asarray(edges).reshape(-1, 3)
        return (reprs_all[e[:, 0]] * reprs_all[e[:, 2]]).sum(axis=1)

    def score_all_candidates(self, edge, slot, reprs_all, candidates):
        h, r, t = edge
        fixed = reprs_all[t] if slot == "head" else reprs_all[h]
        return reprs_all[candidates] @ fixed
