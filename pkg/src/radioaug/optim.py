"""Adam with bias correction, and accuracy-plateau learning-rate halving."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lstm import NetworkParams

__all__ = ["AdamState", "adam_init", "adam_step", "lr_schedule"]

BETA1 = 0.9
BETA2 = 0.999
EPSILON = 1e-8


@dataclass
class AdamState:
    """First/second moment accumulators, one per parameter tensor."""

    m: list
    v: list
    t: int = 0


def adam_init(params: NetworkParams) -> AdamState:
    tensors = [a for _, a in params.tensors()]
    return AdamState(m=[np.zeros_like(a) for a in tensors],
                     v=[np.zeros_like(a) for a in tensors])


def adam_step(state: AdamState, params: NetworkParams, grads: NetworkParams,
              lr: float) -> None:
    """One bias-corrected Adam update, applied to params in place."""
    state.t += 1
    correction1 = 1.0 - BETA1**state.t
    correction2 = 1.0 - BETA2**state.t
    for (name, p), (gname, g), m, v in zip(params.tensors(), grads.tensors(),
                                           state.m, state.v):
        if p.shape != g.shape:
            raise ValueError(f"gradient shape mismatch for {name}: {p.shape} vs {g.shape}")
        m *= BETA1
        m += (1.0 - BETA1) * g
        v *= BETA2
        v += (1.0 - BETA2) * (g * g)
        p -= lr * (m / correction1) / (np.sqrt(v / correction2) + EPSILON)


def lr_schedule(history, current_lr: float, patience: int = 3) -> float:
    """Halve the rate when the best accuracy stalls for `patience` epochs.

    history is the per-epoch training accuracy so far. The trailing count of
    epochs without a strict improvement of the running best triggers a halve
    at every full multiple of `patience` (the counter conceptually resets
    after each halve).
    """
    if len(history) == 0:
        raise ValueError("history must contain at least one epoch")
    best = history[0]
    streak = 0
    for acc in history[1:]:
        if acc > best:
            best = acc
            streak = 0
        else:
            streak += 1
    if streak > 0 and streak % patience == 0:
        return current_lr / 2.0
    return current_lr
