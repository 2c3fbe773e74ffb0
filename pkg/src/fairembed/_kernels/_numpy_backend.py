"""Pure-numpy kernel implementations (fallback backend)."""
import numpy as np

NAME = "numpy"


def leaky_relu(x, slope):
    return np.where(x > 0, x, x * x.dtype.type(slope))


def leaky_relu_grad(x, g, slope):
    return np.where(x > 0, g, g * g.dtype.type(slope))


def adam_update(param, grad, m, v, t, lr, beta1, beta2, eps):
    """One fused in-place Adam update with bias correction. t is the step
    count *after* incrementing (1 on the first update)."""
    dt = param.dtype.type
    b1, b2 = dt(beta1), dt(beta2)
    m *= b1
    m += (dt(1) - b1) * grad
    v *= b2
    v += (dt(1) - b2) * grad * grad
    mhat = m / dt(1.0 - beta1 ** t)
    vhat = v / dt(1.0 - beta2 ** t)
    param -= dt(lr) * mhat / (np.sqrt(vhat) + dt(eps))


def scatter_add(out, idx, rows):
    """out[idx[i], :] += rows[i, :] with duplicate indices accumulating."""
    np.add.at(out, idx, rows)
