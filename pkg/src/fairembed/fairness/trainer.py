"""Adversarially regularized embedding training.

The per-edge objective is

    L(e) = L_edge(s(e), s(e-_1), ..., s(e-_m))
           + lambda * sum_{k in S} log D_k(filtered(u), a^k_u)

minimized over the encoder and filters with the discriminators frozen, while
the discriminators minimize the negated adversarial part (i.e. ordinary
cross-entropy on the true attribute classes) with the encoder frozen. Each
round alternates T encoder minibatch updates with T' discriminator
minibatch updates; a fresh attribute mask is sampled per encoder batch and
the round's discriminator updates reuse the last one. Only nodes of the
sensitive type are filtered and penalized. At lambda = 0 the adversarial
machinery is bypassed entirely, which makes the run identical to plain
no-adversary training under the same seed.
"""
from dataclasses import dataclass, replace

import numpy as np

from .. import _kernels, rngs
from ..errors import ConfigError, NumericError
from ..graph.core import AttributeTable
from ..graph.sampling import NegativeSampler, NegativeSamplerConfig, batch_iter
from ..nn.adam import AdamOptimizer
from ..nn.heads import softmax_xent
from .masks import MaskDistribution, mask_key, sample_training_mask


@dataclass
class AdversarialConfig:
    lam: float = 0.0
    encoder_steps: int = 1       # T
    disc_steps: int = 5          # T'
    epochs: int = 10
    batch_size: int = 512
    seed: int = 0
    learning_rate: float = 1e-3

    def __post_init__(self):
        if self.lam < 0:
            raise ConfigError("lambda must be >= 0")
        if self.encoder_steps < 1 or self.disc_steps < 1:
            raise ConfigError("T and T' must be >= 1")


@dataclass
class TrainResult:
    model: object
    filters: object
    discriminators: object
    log: list
    heldout: object
    config: AdversarialConfig


def _cycle(edges, batch_size, rng):
    while True:
        yield from batch_iter(edges, batch_size, rng)


class _Trainer:
    def __init__(self, graph, attrs, model, config, mask_dist, filters,
                 discriminators, train_edges, neg_config, heldout):
        self.graph = graph
        self.attrs = attrs
        self.model = model
        self.config = config
        self.mask_dist = mask_dist
        self.filters = filters
        self.discs = discriminators
        self.train_edges = train_edges
        self.heldout = heldout
        self.adversarial = config.lam > 0
        if self.adversarial:
            if attrs is None or mask_dist is None or filters is None \
                    or discriminators is None:
                raise ConfigError("lambda > 0 needs attrs, a mask "
                                  "distribution, filters and discriminators")

        seed = config.seed
        self.shuffle_rng = rngs.stream(seed, "shuffle")
        self.disc_shuffle_rng = rngs.stream(seed, "disc-shuffle")
        self.neg_rng = rngs.stream(seed, "negatives")
        self.mask_rng = rngs.stream(seed, "mask")
        self.dropout_rng = rngs.stream(seed, "dropout")
        self.disc_dropout_rng = rngs.stream(seed, "disc-dropout")

        self.needs_negs = model.family != "rating"
        self.sampler = (NegativeSampler(graph, train_edges,
                                        neg_config or NegativeSamplerConfig())
                        if self.needs_negs else None)

        lr = config.learning_rate
        self.model_opt = AdamOptimizer(model.params(), learning_rate=lr)
        self.filter_opts = []
        self.disc_opts = []
        if self.adversarial:
            self.filter_opts = [AdamOptimizer(n.params(), learning_rate=lr)
                                for n in filters.nets]
            self.disc_opts = [AdamOptimizer(n.params(), learning_rate=lr)
                              for n in discriminators.nets]

        if attrs is not None:
            tstar = graph.type_id(attrs.node_type)
            self.tstar_node = np.asarray(graph.node_types) == tstar
            self.attr_matrix = np.full((graph.num_nodes, attrs.num_attrs),
                                       -1, dtype=np.int64)
            self.attr_matrix[attrs.node_ids] = attrs.values
        else:
            self.tstar_node = np.zeros(graph.num_nodes, dtype=bool)
            self.attr_matrix = None

    # ------------------------------------------------------------- steps

    def _adv_instances(self, ctx):
        rows, nodes = [], []
        for key, col in (("pos_head", 0), ("pos_tail", 2)):
            if key not in ctx.rows:
                continue
            n = ctx.pos[:, col]
            sel = self.tstar_node[n]
            rows.append(np.asarray(ctx.rows[key])[sel])
            nodes.append(n[sel])
        rows = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
        nodes = np.concatenate(nodes) if nodes else np.zeros(0, dtype=np.int64)
        return rows, self.attr_matrix[nodes] if len(nodes) else None

    def encoder_step(self, batch, mask, epoch, batch_idx):
        negs = (self.sampler.sample(batch, self.neg_rng)[0]
                if self.needs_negs else None)
        ctx = self.model.begin_batch(batch, negs, mode="train")
        filtering = (self.adversarial and mask is not None and mask.any())
        trows = None
        if filtering:
            trows = self.tstar_node[ctx.nodes]
            filtering = bool(trows.any())
        if filtering:
            reprs = ctx.base.copy()
            reprs[trows] = self.filters.compose(ctx.base[trows], mask,
                                                mode="train",
                                                rng=self.dropout_rng)
        else:
            reprs = ctx.base

        edge_loss, d_reprs = self.model.edge_loss(ctx, reprs)
        adv_value = 0.0
        if filtering:
            inst_rows, labels = self._adv_instances(ctx)
            if len(inst_rows):
                z = reprs[inst_rows]
                dz = np.zeros_like(z)
                for k in np.flatnonzero(mask):
                    log_p, _, dz_k, _ = self.discs.log_prob_true(
                        k, z, labels[:, k], mode="train",
                        rng=self.disc_dropout_rng)
                    adv_value += float(log_p.mean())
                    dz += dz_k
                _kernels.scatter_add(
                    d_reprs, inst_rows,
                    (self.config.lam * dz).astype(d_reprs.dtype))

        total = edge_loss + self.config.lam * adv_value
        if not np.isfinite(total):
            raise NumericError(
                f"non-finite loss at epoch {epoch} batch {batch_idx} "
                f"(lambda={self.config.lam})")

        if filtering:
            d_base_rows, filter_grads = self.filters.compose_backward(
                d_reprs[trows], mask)
            d_reprs[trows] = d_base_rows
            for k, g in filter_grads.items():
                self.filter_opts[k].step(g)
        self.model_opt.step(self.model.param_grads(ctx, d_reprs))
        return edge_loss

    def disc_step(self, batch, mask, hits, counts):
        heads, tails = batch[:, 0], batch[:, 2]
        nodes = np.concatenate([heads[self.tstar_node[heads]],
                                tails[self.tstar_node[tails]]])
        if not len(nodes):
            return
        uniq, inv = np.unique(nodes, return_inverse=True)
        base = self.model.base_encode(uniq, "eval")
        z = self.filters.compose(base, mask, mode="eval")[inv]
        labels = self.attr_matrix[nodes]
        for k in np.flatnonzero(mask):
            net = self.discs.nets[k]
            logits = net.forward(z, mode="train", rng=self.disc_dropout_rng)
            losses, probs, dlogits = softmax_xent(
                logits.astype(np.float64), labels[:, k])
            _, layer_grads = net.backward(
                (dlogits / len(z)).astype(z.dtype))
            self.disc_opts[k].step(net.flat_grads(layer_grads))
            hits[k] += int((probs.argmax(axis=1) == labels[:, k]).sum())
            counts[k] += len(z)

    # -------------------------------------------------------------- loop

    def run(self, phase_hook=None):
        log = []
        disc_batches = (_cycle(self.train_edges, self.config.batch_size,
                               self.disc_shuffle_rng)
                        if self.adversarial else None)
        for epoch in range(self.config.epochs):
            losses = []
            mask_counts = {}
            k_count = self.mask_dist.num_attrs if self.adversarial else 0
            hits = np.zeros(k_count, dtype=np.int64)
            counts = np.zeros(k_count, dtype=np.int64)
            mask = None
            enc_since_round = 0
            for i, batch in enumerate(batch_iter(self.train_edges,
                                                 self.config.batch_size,
                                                 self.shuffle_rng)):
                if self.adversarial:
                    mask = sample_training_mask(self.mask_dist, self.mask_rng,
                                                self.heldout)
                    key = "".join(str(b) for b in mask_key(mask))
                    mask_counts[key] = mask_counts.get(key, 0) + 1
                losses.append(self.encoder_step(batch, mask, epoch, i))
                enc_since_round += 1
                if self.adversarial \
                        and enc_since_round == self.config.encoder_steps:
                    enc_since_round = 0
                    if phase_hook:
                        phase_hook("encoder-phase", epoch)
                    if mask.any():
                        for _ in range(self.config.disc_steps):
                            self.disc_step(next(disc_batches), mask, hits,
                                           counts)
                    if phase_hook:
                        phase_hook("disc-phase", epoch)
            record = {"epoch": epoch,
                      "edge_loss": float(np.mean(losses)) if losses else 0.0}
            if self.adversarial:
                record["disc_accuracy"] = {
                    self.attrs.attr_names[k]:
                        (float(hits[k] / counts[k]) if counts[k] else None)
                    for k in range(k_count)}
                record["masks"] = mask_counts
            log.append(record)
        return log


def train(graph, attrs, model, config, mask_dist=None, filters=None,
          discriminators=None, train_edges=None, neg_config=None,
          heldout_combinations=None, phase_hook=None):
    """Train a model, optionally against compositional adversaries.

    Fully deterministic in config.seed. Returns a TrainResult whose log has
    one record per epoch (edge loss, per-attribute discriminator accuracy,
    mask usage counts).
    """
    train_edges = graph.edges if train_edges is None else train_edges
    t = _Trainer(graph, attrs, model, config, mask_dist, filters,
                 discriminators, train_edges, neg_config,
                 heldout_combinations)
    log = t.run(phase_hook)
    return TrainResult(model, filters if t.adversarial else None,
                       discriminators if t.adversarial else None, log,
                       heldout_combinations, config)


def train_noncompositional(graph, attrs, model_factory, config,
                           filter_factory, disc_factory, train_edges=None,
                           neg_config=None):
    """K independent single-attribute adversarial runs (the non-compositional
    baseline): run k trains with the mask fixed to {k} and per-run seeds
    config.seed + k."""
    results = []
    for k in range(attrs.num_attrs):
        sub = replace(config, seed=config.seed + k)
        attrs_k = AttributeTable(attrs.node_type, [attrs.attr_names[k]],
                                 [attrs.cardinalities[k]], attrs.node_ids,
                                 attrs.values[:, [k]])
        model = model_factory(sub.seed)
        filters = filter_factory(sub.seed, 1)
        discs = disc_factory(sub.seed, [attrs.cardinalities[k]])
        results.append(train(graph, attrs_k, model, sub,
                             mask_dist=MaskDistribution(1, 1.0),
                             filters=filters, discriminators=discs,
                             train_edges=train_edges, neg_config=neg_config))
    return results
