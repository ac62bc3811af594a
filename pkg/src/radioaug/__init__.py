"""radioaug: I/Q frame synthesis, label-preserving augmentation, and a
from-scratch two-layer LSTM modulation classifier."""

__version__ = "0.1.0"

from .augment import (Policy, Transform, apply_transform, augment_dataset,
                      builtin_policy, identity_policy, noise_policy)
from .errors import DataError
from .experiments import (ExperimentConfig, Metrics, evaluate, fuse_probs,
                          run_experiment, split_dataset, subsample, tta_predict)
from .frames import (Dataset, dataset_features, frame_features, halve_dataset,
                     halve_frame, normalize_frame, to_features)
from .lstm import (NetworkParams, backward, count_params, cross_entropy,
                   forward, init_params, loss_and_grads)
from .modelio import load_model, save_model
from .modem import (ChannelConfig, GenConfig, generate_dataset, impair,
                    modulate)
from .optim import AdamState, adam_init, adam_step, lr_schedule
from .rsig import read_rsig, write_rsig
from .train import TrainConfig, train

__all__ = [
    "__version__",
    "DataError",
    "Dataset", "dataset_features", "frame_features", "halve_dataset",
    "halve_frame", "normalize_frame", "to_features",
    "Transform", "Policy", "apply_transform", "augment_dataset",
    "builtin_policy", "identity_policy", "noise_policy",
    "ChannelConfig", "GenConfig", "generate_dataset", "impair", "modulate",
    "NetworkParams", "backward", "count_params", "cross_entropy", "forward",
    "init_params", "loss_and_grads",
    "AdamState", "adam_init", "adam_step", "lr_schedule",
    "TrainConfig", "train",
    "ExperimentConfig", "Metrics", "evaluate", "fuse_probs", "run_experiment",
    "split_dataset", "subsample", "tta_predict",
    "load_model", "save_model",
    "read_rsig", "write_rsig",
]
