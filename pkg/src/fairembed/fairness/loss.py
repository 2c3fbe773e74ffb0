"""Diagnostic forms of the adversarially regularized loss: a single-edge
scalar and a batched variant exposing every analytic gradient (used for
finite-difference verification of the whole objective)."""
import numpy as np

from .. import _kernels
from .banks import adversarial_term


def combined_loss(graph, attrs, edge, negatives, model, filters,
                  discriminators, mask, lam):
    """Eq-style per-edge loss: edge loss plus lambda times the sum of true-
    class log-probabilities over the masked attributes of the edge's
    sensitive-type endpoints. Deterministic (eval mode)."""
    edge = np.asarray(edge, dtype=np.int64).reshape(3)
    negs = None
    if negatives is not None and len(np.atleast_2d(negatives)):
        negs = np.asarray(negatives, dtype=np.int64).reshape(1, -1, 3)
    ctx = model.begin_batch(edge[None, :], negs, mode="eval")
    use_filters = filters is not None and mask is not None and np.any(mask)
    if use_filters:
        trows = np.asarray(graph.node_types)[ctx.nodes] \
            == graph.type_id(attrs.node_type)
        reprs = ctx.base.copy()
        if trows.any():
            reprs[trows] = filters.compose(ctx.base[trows], mask)
    else:
        reprs = ctx.base
    edge_loss, _ = model.edge_loss(ctx, reprs)
    if lam == 0 or not use_filters:
        return float(edge_loss)
    tstar = graph.type_id(attrs.node_type)
    adv = 0.0
    for key, col in (("pos_head", 0), ("pos_tail", 2)):
        if key not in ctx.rows:
            continue
        node = int(edge[col])
        if graph.node_types[node] != tstar:
            continue
        row = int(np.asarray(ctx.rows[key]).reshape(-1)[0])
        adv += adversarial_term(reprs[row], attrs.values_for([node])[0],
                                discriminators, mask)
    return float(edge_loss + lam * adv)


def combined_loss_with_grads(graph, attrs, model, filters, discriminators,
                             mask, lam, pos, negs):
    """Batched combined loss plus analytic gradients for every trainable
    component (model, filters, discriminators), in that parameter order.

    Mirrors the trainer's encoder-step math exactly but also keeps the
    discriminator parameter gradients, so the full objective can be
    finite-difference checked in one pass. Nets must be dropout-free.
    """
    tstar = graph.type_id(attrs.node_type)
    tstar_node = np.asarray(graph.node_types) == tstar
    attr_matrix = np.full((graph.num_nodes, attrs.num_attrs), -1,
                          dtype=np.int64)
    attr_matrix[attrs.node_ids] = attrs.values

    ctx = model.begin_batch(pos, negs, mode="train")
    trows = tstar_node[ctx.nodes]
    reprs = ctx.base.copy()
    if trows.any() and np.any(mask):
        reprs[trows] = filters.compose(ctx.base[trows], mask, mode="train")
    edge_loss, d_reprs = model.edge_loss(ctx, reprs)

    inst_rows, inst_nodes = [], []
    for key, col in (("pos_head", 0), ("pos_tail", 2)):
        if key not in ctx.rows:
            continue
        n = pos[:, col]
        sel = tstar_node[n]
        inst_rows.append(np.asarray(ctx.rows[key])[sel])
        inst_nodes.append(n[sel])
    inst_rows = np.concatenate(inst_rows)
    inst_nodes = np.concatenate(inst_nodes)

    adv = 0.0
    disc_grads = []
    if len(inst_rows) and np.any(mask):
        z = reprs[inst_rows]
        labels = attr_matrix[inst_nodes]
        dz = np.zeros_like(z)
        for k in range(discriminators.num_attrs):
            if not mask[k]:
                disc_grads.extend(np.zeros_like(p)
                                  for p in discriminators.nets[k].params())
                continue
            log_p, _, dz_k, pgrads = discriminators.log_prob_true(
                k, z, labels[:, k], mode="train")
            adv += float(log_p.mean())
            dz += dz_k
            disc_grads.extend(lam * g for g in pgrads)
        _kernels.scatter_add(d_reprs, inst_rows,
                             (lam * dz).astype(d_reprs.dtype))
    else:
        for net in discriminators.nets:
            disc_grads.extend(np.zeros_like(p) for p in net.params())

    filter_grads = []
    if trows.any() and np.any(mask):
        d_base_rows, fgrads = filters.compose_backward(d_reprs[trows], mask)
        d_reprs[trows] = d_base_rows
        for k, net in enumerate(filters.nets):
            if k in fgrads:
                filter_grads.extend(fgrads[k])
            else:
                filter_grads.extend(np.zeros_like(p) for p in net.params())
    else:
        for net in filters.nets:
            filter_grads.extend(np.zeros_like(p) for p in net.params())

    model_grads = model.param_grads(ctx, d_reprs)
    loss = float(edge_loss + lam * adv)
    return loss, model_grads + filter_grads + disc_grads


def combined_loss_params(model, filters, discriminators):
    """Parameter list aligned with combined_loss_with_grads' gradients."""
    params = list(model.params())
    for net in filters.nets:
        params.extend(net.params())
    for net in discriminators.nets:
        params.extend(net.params())
    return params
