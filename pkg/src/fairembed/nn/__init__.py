from .adam import AdamOptimizer, AdamState, adam_step
from .dense import BatchNorm, DenseNet, LEAKY_SLOPE
from .gradcheck import GradCheckReport, grad_check
from .heads import classification_head, softmax, softmax_xent

__all__ = [
    "AdamOptimizer", "AdamState", "adam_step", "BatchNorm", "DenseNet",
    "LEAKY_SLOPE", "GradCheckReport", "grad_check", "classification_head",
    "softmax", "softmax_xent",
]
