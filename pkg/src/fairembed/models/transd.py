"""TransD encoder/score with max-margin loss.

Node encodings are role- and relation-dependent:

    enc(u | r) = u + (u_p . u) r_p

which is the projected form (r_p u_p^T + I) u expanded with the rank-one
identity. When the sensitive filters are active they transform the node
embedding u before the projection is applied.
"""
from dataclasses import dataclass

import numpy as np

from .. import _kernels
from .base import BatchCtx, init_embeddings, margin_loss_batch, unique_rows

_NORM_FLOOR = 1e-12


@dataclass
class TransDParams:
    node_emb: np.ndarray   # (|V|, d)
    node_proj: np.ndarray  # (|V|, d)
    rel_emb: np.ndarray    # (|R|, d)
    rel_proj: np.ndarray   # (|R|, d)


def transd_project(vec, proj, rel_proj):
    """(rel_proj proj^T + I) vec for one vector or a batch of rows."""
    vec = np.asarray(vec)
    alpha = (proj * vec).sum(axis=-1, keepdims=True)
    return vec + alpha * rel_proj


def transd_encode(params, node, triple, role):
    h, r, t = triple
    if (role == "head" and node != h) or (role == "tail" and node != t):
        raise ValueError(f"node {node} is not the {role} of {tuple(triple)}")
    if role not in ("head", "tail"):
        raise ValueError(f"role must be head or tail, got {role!r}")
    return transd_project(params.node_emb[node], params.node_proj[node],
                          params.rel_proj[r])


def transd_score(params, triple):
    h, r, t = triple
    enc_h = transd_encode(params, h, triple, "head")
    enc_t = transd_encode(params, t, triple, "tail")
    return -float(np.linalg.norm(enc_h + params.rel_emb[r] - enc_t))


class TransDModel:
    family = "transd"

    def __init__(self, graph, dim, rng, dtype=np.float32):
        self.dim = dim
        self.dtype = np.dtype(dtype)
        self.num_nodes = graph.num_nodes
        self.num_relations = graph.num_relations
        self.node_emb = init_embeddings(rng, graph.num_nodes, dim, self.dtype)
        self.node_proj = init_embeddings(rng, graph.num_nodes, dim, self.dtype)
        self.rel_emb = init_embeddings(rng, graph.num_relations, dim, self.dtype)
        self.rel_proj = init_embeddings(rng, graph.num_relations, dim, self.dtype)

    def as_params(self):
        return TransDParams(self.node_emb, self.node_proj, self.rel_emb,
                            self.rel_proj)

    def params(self):
        return [self.node_emb, self.node_proj, self.rel_emb, self.rel_proj]

    def param_names(self):
        return ["node_emb", "node_proj", "rel_emb", "rel_proj"]

    def state_names(self):
        return []

    def state_arrays(self):
        return []

    def base_encode(self, node_ids, mode="eval"):
        return self.node_emb[np.asarray(node_ids, dtype=np.int64)]

    def base_all(self, mode="eval"):
        return self.node_emb

    def begin_batch(self, pos, negs, mode="train", rng=None):
        nodes, (ph, pt, nh, nt) = unique_rows(pos[:, 0], pos[:, 2],
                                              negs[:, :, 0], negs[:, :, 2])
        return BatchCtx(nodes=nodes, base=self.base_encode(nodes, mode),
                        pos=pos, negs=negs,
                        rows={"pos_head": ph, "pos_tail": pt,
                              "neg_head": nh, "neg_tail": nt})

    def _stack_instances(self, ctx):
        """All triple instances (positives then negatives) as flat arrays."""
        b, m = ctx.negs.shape[:2]
        h_rows = np.concatenate([ctx.rows["pos_head"],
                                 ctx.rows["neg_head"].reshape(-1)])
        t_rows = np.concatenate([ctx.rows["pos_tail"],
                                 ctx.rows["neg_tail"].reshape(-1)])
        h_nodes = np.concatenate([ctx.pos[:, 0], ctx.negs[:, :, 0].reshape(-1)])
        t_nodes = np.concatenate([ctx.pos[:, 2], ctx.negs[:, :, 2].reshape(-1)])
        rels = np.concatenate([ctx.pos[:, 1], ctx.negs[:, :, 1].reshape(-1)])
        return b, m, h_rows, t_rows, h_nodes, t_nodes, rels

    def edge_loss(self, ctx, reprs):
        b, m, h_rows, t_rows, h_nodes, t_nodes, rels = self._stack_instances(ctx)
        c_h, c_t = reprs[h_rows], reprs[t_rows]
        p_h, p_t = self.node_proj[h_nodes], self.node_proj[t_nodes]
        rp, rvec = self.rel_proj[rels], self.rel_emb[rels]

        alpha_h = (p_h * c_h).sum(axis=1, keepdims=True)
        alpha_t = (p_t * c_t).sum(axis=1, keepdims=True)
        enc_h = c_h + alpha_h * rp
        enc_t = c_t + alpha_t * rp
        delta = enc_h + rvec - enc_t
        nrm = np.sqrt((delta.astype(np.float64) ** 2).sum(axis=1))
        scores = -nrm
        loss, dpos, dneg = margin_loss_batch(scores[:b], scores[b:].reshape(b, m))
        ds = np.concatenate([dpos, dneg.reshape(-1)])

        ddelta = ((-ds / np.maximum(nrm, _NORM_FLOOR))[:, None]
                  * delta).astype(reprs.dtype)
        g_h, g_t = ddelta, -ddelta
        beta_h = (rp * g_h).sum(axis=1, keepdims=True)
        beta_t = (rp * g_t).sum(axis=1, keepdims=True)

        dreprs = np.zeros_like(reprs)
        _kernels.scatter_add(dreprs, h_rows, g_h + beta_h * p_h)
        _kernels.scatter_add(dreprs, t_rows, g_t + beta_t * p_t)

        dproj = np.zeros_like(self.node_proj)
        _kernels.scatter_add(dproj, h_nodes, beta_h * c_h)
        _kernels.scatter_add(dproj, t_nodes, beta_t * c_t)
        drel_emb = np.zeros_like(self.rel_emb)
        _kernels.scatter_add(drel_emb, rels, ddelta)
        drel_proj = np.zeros_like(self.rel_proj)
        _kernels.scatter_add(drel_proj, rels, alpha_h * g_h + alpha_t * g_t)
        ctx.stash["grads"] = (dproj, drel_emb, drel_proj)
        return loss, dreprs

    def param_grads(self, ctx, d_base):
        demb = np.zeros_like(self.node_emb)
        _kernels.scatter_add(demb, ctx.nodes, d_base)
        dproj, drel_emb, drel_proj = ctx.stash["grads"]
        return [demb, dproj, drel_emb, drel_proj]

    def score_edges(self, edges, reprs_all):
        e = np.asarray(edges).reshape(-1, 3)
        rp = self.rel_proj[e[:, 1]]
        enc_h = reprs_all[e[:, 0]] + (self.node_proj[e[:, 0]]
                                      * reprs_all[e[:, 0]]).sum(1, keepdims=True) * rp
        enc_t = reprs_all[e[:, 2]] + (self.node_proj[e[:, 2]]
                                      * reprs_all[e[:, 2]]).sum(1, keepdims=True) * rp
        delta = enc_h + self.rel_emb[e[:, 1]] - enc_t
        return -np.sqrt((delta.astype(np.float64) ** 2).sum(axis=1))

    def score_all_candidates(self, edge, slot, reprs_all, candidates):
        h, r, t = edge
        rp, rvec = self.rel_proj[r], self.rel_emb[r]
        cand = transd_project(reprs_all[candidates],
                              self.node_proj[candidates], rp)
        if slot == "head":
            fixed = transd_project(reprs_all[t], self.node_proj[t], rp)
            delta = cand + rvec - fixed
        else:
            fixed = transd_project(reprs_all[h], self.node_proj[h], rp)
            delta = fixed + rvec - cand
        return -np.sqrt((delta.astype(np.float64) ** 2).sum(axis=1))
