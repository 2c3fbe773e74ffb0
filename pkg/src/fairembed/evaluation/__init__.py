from .metrics import auc, micro_f1, rmse
from .probes import (ProbeConfig, majority_baseline, probe_leakage,
                     random_baseline, train_probe)
from .report import MetricsReport, write_curves
from .sweep import heldout_combination_eval, tradeoff_sweep, validate_lambdas
from .tasks import (edge_auc, filtered_embeddings, mean_rank, prediction_bias,
                    rating_rmse)

__all__ = [
    "auc", "micro_f1", "rmse", "ProbeConfig", "majority_baseline",
    "probe_leakage", "random_baseline", "train_probe", "MetricsReport",
    "write_curves", "heldout_combination_eval", "tradeoff_sweep",
    "validate_lambdas", "edge_auc", "filtered_embeddings", "mean_rank",
    "prediction_bias", "rating_rmse",
]
