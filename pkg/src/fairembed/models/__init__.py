import numpy as np

from .base import margin_loss
from .dot import DotModel, dot_score
from .rating import (RatingModel, RatingScoreParams, expected_rating,
                     rating_distribution, rating_loss)
from .transd import TransDModel, TransDParams, transd_encode, transd_score

FAMILIES = {"dot": DotModel, "rating": RatingModel, "transd": TransDModel}


def build_model(family, graph, dim, seed_rng, dtype=np.float32, **kw):
    if family not in FAMILIES:
        raise ValueError(f"unknown model family {family!r}")
    return FAMILIES[family](graph, dim, seed_rng, dtype=dtype, **kw)


__all__ = [
    "margin_loss", "DotModel", "dot_score", "RatingModel",
    "RatingScoreParams", "expected_rating", "rating_distribution",
    "rating_loss", "TransDModel", "TransDParams", "transd_encode",
    "transd_score", "FAMILIES", "build_model",
]
