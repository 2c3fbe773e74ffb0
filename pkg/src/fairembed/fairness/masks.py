"""Attribute-subset masks: per-batch Bernoulli sampling and held-out
combination handling."""
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError

REJECTION_LIMIT = 1000


@dataclass
class MaskDistribution:
    num_attrs: int
    p: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError(f"mask probability must be in [0,1], got {self.p}")
        if self.num_attrs < 1:
            raise ConfigError("mask distribution needs K >= 1")


def sample_mask(dist, rng):
    """K independent Bernoulli(p) draws; the empty subset is a valid draw."""
    return rng.random(dist.num_attrs) < dist.p


def mask_key(mask):
    return tuple(int(b) for b in mask)


def choose_heldout_combinations(num_attrs, fraction, seed):
    """Uniform sample of non-empty masks covering `fraction` of the 2^K
    combination space."""
    if not 0.0 < fraction < 1.0:
        raise ConfigError(f"held-out fraction must be in (0,1), got {fraction}")
    total = 2 ** num_attrs
    count = max(1, int(round(fraction * total)))
    if count >= total - 1:
        raise ConfigError("held-out fraction leaves no training masks")
    rng = np.random.default_rng(seed)
    nonempty = np.arange(1, total)
    pick = rng.choice(len(nonempty), size=count, replace=False)
    out = set()
    for code in nonempty[np.sort(pick)]:
        out.add(tuple((int(code) >> k) & 1 for k in range(num_attrs)))
    return out


def sample_training_mask(dist, rng, heldout=None):
    """Sample a mask, rejecting held-out combinations. Aborts after 1000
    consecutive rejections (a sign the held-out set is unsatisfiable)."""
    for _ in range(REJECTION_LIMIT):
        mask = sample_mask(dist, rng)
        if not heldout or mask_key(mask) not in heldout:
            return mask
    raise ConfigError(
        f"could not draw a training mask in {REJECTION_LIMIT} tries; "
        "held-out combinations exclude (nearly) all of the mask space")
