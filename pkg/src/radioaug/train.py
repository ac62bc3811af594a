"""Minibatch training loop: seeded shuffling, dropout, Adam, LR plateau."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lstm import NetworkParams, dropout_masks, loss_and_grads
from .optim import adam_init, adam_step, lr_schedule

__all__ = ["TrainConfig", "EpochStats", "train"]


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 80
    batch_size: int = 128
    lr: float = 0.001
    dropout: float = 0.5
    plateau_patience: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.epochs <= 0 or self.batch_size <= 0 or self.lr <= 0:
            raise ValueError("epochs, batch_size, and lr must be positive")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")
        if self.plateau_patience <= 0:
            raise ValueError("plateau_patience must be positive")


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    loss: float
    accuracy: float
    lr: float


def train(params: NetworkParams, features: np.ndarray, labels: np.ndarray,
          cfg: TrainConfig, log=None) -> list[EpochStats]:
    """Train in place; returns per-epoch loss, accuracy, and learning rate.

    Fully deterministic given cfg.seed: the shuffle order and dropout masks
    for epoch e come from substreams keyed on (seed, e). Loss and accuracy
    are accumulated from the train-mode forward passes.
    """
    n = len(labels)
    if n == 0:
        raise ValueError("training set is empty")
    hidden = params.hidden_size
    state = adam_init(params)
    lr = cfg.lr
    history: list[float] = []
    stats: list[EpochStats] = []
    for epoch in range(1, cfg.epochs + 1):
        order = np.random.default_rng([cfg.seed, epoch]).permutation(n)
        drop_rng = np.random.default_rng([cfg.seed, epoch, 1])
        total_loss = 0.0
        correct = 0
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            x = features[idx]
            y = labels[idx]
            masks = dropout_masks(drop_rng, cfg.dropout, len(idx),
                                  x.shape[1], hidden, dtype=x.dtype)
            loss, grads, probs = loss_and_grads(params, x, y, masks)
            adam_step(state, params, grads, lr)
            total_loss += loss * len(idx)
            correct += int((probs.argmax(axis=1) == y).sum())
        accuracy = correct / n
        history.append(accuracy)
        stats.append(EpochStats(epoch, total_loss / n, accuracy, lr))
        if log is not None:
            log(stats[-1])
        lr = lr_schedule(history, lr, cfg.plateau_patience)
    return stats
