"""Filter and discriminator banks: one small MLP per sensitive attribute."""
from dataclasses import dataclass

import numpy as np

from ..nn.dense import DenseNet
from ..nn.heads import softmax_xent


@dataclass
class NetSpec:
    layers: int = 2
    hidden: int = 0          # 0 means 2 * dim
    dropout: float = 0.0

    def widths(self, in_dim, out_dim):
        hidden = self.hidden or 2 * in_dim
        return [in_dim] + [hidden] * (self.layers - 1) + [out_dim]


class FilterBank:
    """K filter networks mapping the encoder space to itself."""

    def __init__(self, num_attrs, dim, rng, spec=None, dtype=np.float32):
        spec = spec or NetSpec()
        self.dim = dim
        self.nets = [DenseNet(spec.widths(dim, dim), rng=rng,
                              dropout=spec.dropout, final_activation=False,
                              dtype=dtype)
                     for _ in range(num_attrs)]

    @property
    def num_attrs(self):
        return len(self.nets)

    def compose(self, base, mask, mode="eval", rng=None):
        """Mean of the active filters' outputs; base itself for an empty mask."""
        active = np.flatnonzero(mask)
        if len(active) == 0:
            return base
        acc = None
        for k in active:
            out = self.nets[k].forward(base, mode=mode, rng=rng)
            acc = out if acc is None else acc + out
        return acc / base.dtype.type(len(active))

    def compose_backward(self, d_out, mask):
        """Push d_out back through the active filters.

        Returns (d_base, {k: flat param grads}). Must follow a compose()
        call with the same mask (empty masks never reach here).
        """
        active = np.flatnonzero(mask)
        scale = d_out.dtype.type(1.0 / len(active))
        d_base = None
        grads = {}
        for k in active:
            dx, layer_grads = self.nets[k].backward(d_out * scale)
            grads[int(k)] = self.nets[k].flat_grads(layer_grads)
            d_base = dx if d_base is None else d_base + dx
        return d_base, grads


def compose(base_embedding, filters, mask):
    """Deterministic (eval-mode) compositional encoding of one vector or a
    batch of rows."""
    base = np.asarray(base_embedding)
    squeeze = base.ndim == 1
    out = filters.compose(base[None, :] if squeeze else base, mask)
    return out[0] if squeeze else out


class DiscriminatorBank:
    """K classifiers, one per attribute, over the filtered embedding space."""

    def __init__(self, cardinalities, dim, rng, spec=None, dtype=np.float32):
        spec = spec or NetSpec()
        self.dim = dim
        self.cardinalities = list(cardinalities)
        self.nets = [DenseNet(spec.widths(dim, card), rng=rng,
                              dropout=spec.dropout, final_activation=False,
                              dtype=dtype)
                     for card in cardinalities]

    @property
    def num_attrs(self):
        return len(self.nets)

    def log_prob_true(self, k, z, labels, mode="eval", rng=None):
        """Per-example log probability of the true class under D_k, plus the
        gradients of their MEAN w.r.t. z and w.r.t. D_k's own parameters."""
        z2 = np.atleast_2d(z)
        net = self.nets[k]
        logits = net.forward(z2, mode=mode, rng=rng)
        losses, probs, dlogits = softmax_xent(logits.astype(np.float64),
                                              np.atleast_1d(labels))
        # d mean(log p_true)/d logits = -dlogits / n
        dz, layer_grads = net.backward((-dlogits / len(z2)).astype(z2.dtype))
        return -losses, probs, dz, net.flat_grads(layer_grads)


def adversarial_term(z, attr_values, discriminators, mask):
    """Sum over the masked attributes of log D_k(z)[true class] for a single
    filtered embedding; 0 for the empty mask."""
    attr_values = np.asarray(attr_values).reshape(-1)
    active = np.flatnonzero(mask)
    total = 0.0
    for k in active:
        a = int(attr_values[k])
        if not 0 <= a < discriminators.cardinalities[k]:
            raise IndexError(f"attribute {k} value {a} out of range")
        log_p = discriminators.log_prob_true(k, z, [a])[0]
        total += float(log_p[0])
    return total
