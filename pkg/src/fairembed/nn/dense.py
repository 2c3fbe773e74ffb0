"""Minimal dense-network substrate with hand-written backward passes.

A DenseNet is a plain MLP: affine -> [batchnorm] -> leaky ReLU -> [dropout]
for every layer, with the activation on the final layer controllable
(filters and discriminators end in a plain affine map). Forward caches the
intermediates needed by backward; backward consumes and clears the cache.
"""
import numpy as np

from .. import _kernels
from ..errors import NumericError, ShapeError, StateError

LEAKY_SLOPE = 0.01
BN_MOMENTUM = 0.1
BN_EPS = 1e-5


class BatchNorm:
    """1-d batch normalization with running statistics for eval mode."""

    def __init__(self, dim, dtype=np.float32, momentum=BN_MOMENTUM):
        self.dim = dim
        self.momentum = momentum
        self.gamma = np.ones(dim, dtype=dtype)
        self.beta = np.zeros(dim, dtype=dtype)
        self.running_mean = np.zeros(dim, dtype=dtype)
        self.running_var = np.ones(dim, dtype=dtype)
        self._cache = None

    def forward(self, x, mode):
        if mode == "train":
            mu = x.mean(axis=0)
            var = x.var(axis=0)
            inv = 1.0 / np.sqrt(var + BN_EPS)
            xhat = (x - mu) * inv
            m = self.momentum
            self.running_mean *= 1 - m
            self.running_mean += (m * mu).astype(self.running_mean.dtype)
            self.running_var *= 1 - m
            self.running_var += (m * var).astype(self.running_var.dtype)
            self._cache = (xhat, inv.astype(x.dtype), mode)
        else:
            inv = 1.0 / np.sqrt(self.running_var + BN_EPS)
            xhat = (x - self.running_mean) * inv
            self._cache = (xhat, inv.astype(x.dtype), mode)
        return (self.gamma * xhat + self.beta).astype(x.dtype)

    def backward(self, dout):
        if self._cache is None:
            raise StateError("BatchNorm.backward without a forward pass")
        xhat, inv, mode = self._cache
        self._cache = None
        dgamma = (dout * xhat).sum(axis=0)
        dbeta = dout.sum(axis=0)
        dxhat = dout * self.gamma
        if mode == "train":
            n = xhat.shape[0]
            dx = (inv / n) * (n * dxhat - dxhat.sum(axis=0)
                              - xhat * (dxhat * xhat).sum(axis=0))
        else:
            dx = dxhat * inv
        return dx.astype(dout.dtype), dgamma.astype(dout.dtype), dbeta.astype(dout.dtype)

    def params(self):
        return [self.gamma, self.beta]

    def state_arrays(self):
        return [self.running_mean, self.running_var]


class DenseNet:
    """MLP with leaky-ReLU activations.

    widths is the full chain input -> hidden... -> output. Weight matrix i
    has shape (widths[i+1], widths[i]). Dropout and batchnorm act on hidden
    activations in train mode only.
    """

    def __init__(self, widths, rng=None, slope=LEAKY_SLOPE, dropout=0.0,
                 batchnorm=False, final_activation=True, dtype=np.float32):
        if len(widths) < 2 or any(w < 1 for w in widths):
            raise ShapeError(f"bad widths {widths}")
        if not 0.0 <= dropout < 1.0:
            raise ValueError(f"dropout must be in [0,1), got {dropout}")
        self.widths = list(widths)
        self.slope = slope
        self.dropout = dropout
        self.final_activation = final_activation
        self.dtype = np.dtype(dtype)
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(widths[:-1], widths[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            if rng is None:
                w = np.zeros((fan_out, fan_in))
                b = np.zeros(fan_out)
            else:
                w = rng.uniform(-bound, bound, size=(fan_out, fan_in))
                b = rng.uniform(-bound, bound, size=fan_out)
            self.weights.append(w.astype(self.dtype))
            self.biases.append(b.astype(self.dtype))
        # batchnorm on hidden layers only, like dropout
        self.bns = [BatchNorm(w, dtype=self.dtype)
                    if batchnorm and i < len(widths) - 2 else None
                    for i, w in enumerate(widths[1:])]
        self._cache = None

    @property
    def layer_count(self):
        return len(self.weights)

    @property
    def in_dim(self):
        return self.widths[0]

    @property
    def out_dim(self):
        return self.widths[-1]

    @classmethod
    def identity(cls, dim, dtype=np.float32):
        """Single-layer net computing the identity map exactly."""
        net = cls([dim, dim], rng=None, final_activation=False, dtype=dtype)
        net.weights[0][:] = np.eye(dim, dtype=dtype)
        return net

    def _activate(self, i):
        return self.final_activation or i < self.layer_count - 1

    def forward(self, x, mode="eval", rng=None):
        x = np.asarray(x, dtype=self.dtype)
        squeeze = x.ndim == 1
        if squeeze:
            x = x[None, :]
        if x.shape[1] != self.in_dim:
            raise ShapeError(f"input width {x.shape[1]} != {self.in_dim}")
        if not np.isfinite(x).all():
            raise NumericError("non-finite input to dense forward")
        if mode not in ("train", "eval"):
            raise ValueError(f"mode must be train or eval, got {mode!r}")
        dropping = mode == "train" and self.dropout > 0.0
        if dropping and rng is None:
            raise ValueError("rng is required when dropout is active")

        steps = []
        h = x
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            rec = {"x": h}
            h = h @ w.T + b
            if self.bns[i] is not None:
                h = self.bns[i].forward(h, mode)
            if self._activate(i):
                rec["pre"] = h
                h = _kernels.leaky_relu(h, self.slope)
                if dropping and i < self.layer_count - 1:
                    keep = (rng.random(h.shape, dtype=np.float32)
                            >= self.dropout)
                    h = h * (keep / self.dtype.type(1.0 - self.dropout))
                    rec["keep"] = keep
            steps.append(rec)
        self._cache = (steps, mode)
        return h[0] if squeeze else h

    def backward(self, upstream):
        """Returns (input gradient, [per-layer (dW, db[, dgamma, dbeta])])."""
        if self._cache is None:
            raise StateError("backward called without a matching forward")
        steps, mode = self._cache
        self._cache = None
        g = np.asarray(upstream, dtype=self.dtype)
        squeeze = g.ndim == 1
        if squeeze:
            g = g[None, :]
        if g.shape[1] != self.out_dim:
            raise ShapeError(f"upstream width {g.shape[1]} != {self.out_dim}")
        layer_grads = [None] * self.layer_count
        for i in range(self.layer_count - 1, -1, -1):
            rec = steps[i]
            if self._activate(i):
                if "keep" in rec:
                    g = g * rec["keep"] / self.dtype.type(1.0 - self.dropout)
                g = _kernels.leaky_relu_grad(rec["pre"], g, self.slope)
            extra = ()
            if self.bns[i] is not None:
                g, dgamma, dbeta = self.bns[i].backward(g)
                extra = (dgamma, dbeta)
            xin = rec["x"]
            dw = g.T @ xin
            db = g.sum(axis=0)
            layer_grads[i] = (dw.astype(self.dtype), db.astype(self.dtype)) + extra
            g = g @ self.weights[i]
        return (g[0] if squeeze else g), layer_grads

    def params(self):
        out = []
        for i in range(self.layer_count):
            out.append(self.weights[i])
            out.append(self.biases[i])
            if self.bns[i] is not None:
                out.extend(self.bns[i].params())
        return out

    def flat_grads(self, layer_grads):
        """Flatten backward()'s per-layer grads to align with params()."""
        out = []
        for g in layer_grads:
            out.extend(g)
        return out
