from .banks import (DiscriminatorBank, FilterBank, NetSpec, adversarial_term,
                    compose)
from .loss import (combined_loss, combined_loss_params,
                   combined_loss_with_grads)
from .masks import (MaskDistribution, choose_heldout_combinations, mask_key,
                    sample_mask, sample_training_mask)
from .trainer import (AdversarialConfig, TrainResult, train,
                      train_noncompositional)

__all__ = [
    "DiscriminatorBank", "FilterBank", "NetSpec", "adversarial_term",
    "compose", "combined_loss", "combined_loss_params",
    "combined_loss_with_grads", "MaskDistribution",
    "choose_heldout_combinations", "mask_key", "sample_mask",
    "sample_training_mask", "AdversarialConfig", "TrainResult", "train",
    "train_noncompositional",
]
