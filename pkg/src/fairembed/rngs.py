"""Deterministic per-purpose random streams.

Every randomized component owns one stream keyed by (seed, purpose), so
skipping a component (e.g. no adversary at lambda=0) does not shift the
streams of the others.
"""
import numpy as np

_PURPOSES = (
    "model-init", "filter-init", "disc-init", "shuffle", "disc-shuffle",
    "negatives", "mask", "dropout", "disc-dropout", "probe", "eval",
)


def stream(seed: int, purpose: str, extra: int = 0) -> np.random.Generator:
    if purpose not in _PURPOSES:
        raise ValueError(f"unknown rng purpose {purpose!r}")
    return np.random.default_rng([seed, _PURPOSES.index(purpose), extra])
