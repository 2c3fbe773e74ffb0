"""Central finite-difference verification of analytic gradients."""
from dataclasses import dataclass

import numpy as np

from ..errors import GradCheckError


@dataclass
class GradCheckReport:
    max_relative_error: float
    per_param: dict
    tolerance: float

    @property
    def passed(self):
        return self.max_relative_error <= self.tolerance


def grad_check(fn, params, tolerance=1e-4, step=1e-6, abs_floor=1e-8,
               names=None):
    """Compare fn's analytic gradients to central finite differences.

    fn() -> (loss, grads) evaluated at the current values of `params`
    (a list of float64 arrays that the checker perturbs in place). fn must
    be deterministic: re-seed any rng it uses on every call.
    """
    loss0, grads = fn()
    loss1, _ = fn()
    if loss0 != loss1:
        raise GradCheckError(
            f"function is not deterministic under a fixed seed "
            f"({loss0!r} != {loss1!r})")
    if len(grads) != len(params):
        raise ValueError("fn returned a gradient list of the wrong length")

    names = names or [f"param{i}" for i in range(len(params))]
    per_param = {}
    worst = 0.0
    for p, g, name in zip(params, grads, names):
        g = np.asarray(g)
        num = np.zeros_like(p, dtype=np.float64)
        it = np.nditer(p, flags=["multi_index"])
        while not it.finished:
            ix = it.multi_index
            orig = p[ix]
            p[ix] = orig + step
            up, _ = fn()
            p[ix] = orig - step
            down, _ = fn()
            p[ix] = orig
            num[ix] = (up - down) / (2.0 * step)
            it.iternext()
        # relative error, degrading to absolute (scaled by abs_floor) for
        # gradients too small to resolve against finite-difference noise
        denom = np.maximum(np.maximum(np.abs(g), np.abs(num)), abs_floor)
        err = np.abs(g - num) / denom
        per_param[name] = float(err.max()) if err.size else 0.0
        worst = max(worst, per_param[name])
    return GradCheckReport(worst, per_param, tolerance)
