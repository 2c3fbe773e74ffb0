"""Adam optimizer (the only optimizer used anywhere in the package)."""
from dataclasses import dataclass, field

import numpy as np

from .. import _kernels
from ..errors import ShapeError


@dataclass
class AdamState:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step_count: int = 0
    first_moment: list = field(default_factory=list)
    second_moment: list = field(default_factory=list)

    @classmethod
    def for_params(cls, params, learning_rate=1e-3, beta1=0.9, beta2=0.999,
                   epsilon=1e-8):
        return cls(learning_rate, beta1, beta2, epsilon, 0,
                   [np.zeros_like(p) for p in params],
                   [np.zeros_like(p) for p in params])


def adam_step(state: AdamState, params, grads):
    """In-place bias-corrected Adam update of every param from its grad."""
    if len(params) != len(grads) or len(params) != len(state.first_moment):
        raise ShapeError("params/grads/state length mismatch")
    state.step_count += 1
    for p, g, m, v in zip(params, grads, state.first_moment,
                          state.second_moment):
        if p.shape != g.shape:
            raise ShapeError(f"param shape {p.shape} != grad shape {g.shape}")
        _kernels.adam_update(p, g, m, v, state.step_count,
                             state.learning_rate, state.beta1, state.beta2,
                             state.epsilon)
    return params, state


class AdamOptimizer:
    """Binds an AdamState to a fixed parameter list."""

    def __init__(self, params, learning_rate=1e-3, **kw):
        self.params = list(params)
        self.state = AdamState.for_params(self.params,
                                          learning_rate=learning_rate, **kw)

    def step(self, grads):
        adam_step(self.state, self.params, grads)
