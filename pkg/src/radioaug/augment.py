"""Label-preserving I/Q transforms and dataset-expansion policies.

Quarter-turn rotations and flips are pure coordinate swaps/negations, so
they compose bit-exactly and preserve per-sample amplitude exactly. Noise
transforms add one independent zero-mean normal draw per real component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .frames import Dataset

__all__ = [
    "Transform",
    "Policy",
    "IDENTITY",
    "FLIP_H",
    "FLIP_V",
    "FLIP_BOTH",
    "NOISE_SIGMAS_DEFAULT",
    "POLICY_KINDS",
    "rotate",
    "add_noise",
    "builtin_policy",
    "noise_policy",
    "identity_policy",
    "apply_transform",
    "augment_dataset",
]

_KINDS = ("identity", "rot", "fliph", "flipv", "flipboth", "noise")
NOISE_SIGMAS_DEFAULT = (0.0, 0.0005, 0.001, 0.002)
POLICY_KINDS = ("rotation", "flip", "noise", "joint")


@dataclass(frozen=True)
class Transform:
    """One augmentation transform, tagged by kind.

    rot uses quarter_turns in 0..3 (angle = quarter_turns * pi/2,
    counter-clockwise); noise uses sigma >= 0.
    """

    kind: str
    quarter_turns: int = 0
    sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown transform kind {self.kind!r}")
        if not 0 <= self.quarter_turns <= 3:
            raise ValueError("quarter_turns must be in 0..3")
        if not (math.isfinite(self.sigma) and self.sigma >= 0.0):
            raise ValueError("sigma must be finite and non-negative")

    @property
    def needs_rng(self) -> bool:
        return self.kind == "noise" and self.sigma > 0.0


IDENTITY = Transform("identity")
FLIP_H = Transform("fliph")
FLIP_V = Transform("flipv")
FLIP_BOTH = Transform("flipboth")


def rotate(quarter_turns: int) -> Transform:
    return Transform("rot", quarter_turns=quarter_turns % 4)


def add_noise(sigma: float) -> Transform:
    return Transform("noise", sigma=float(sigma))


def apply_transform(frame, transform: Transform, rng=None) -> np.ndarray:
    """Apply one transform to a frame (or a stack of frames).

    Accepts any float array whose last axis is (I, Q). Always returns a new
    float32 array of the same shape. Noise transforms with sigma > 0 require
    an rng; draws are float64, added, then rounded back to float32.
    """
    frame = np.asarray(frame, dtype=np.float32)
    if frame.shape[-1] != 2:
        raise ValueError(f"expected I/Q pairs on the last axis, got shape {frame.shape}")
    kind = transform.kind
    if kind == "identity":
        return frame.copy()
    if kind == "rot":
        i, q = frame[..., 0], frame[..., 1]
        for _ in range(transform.quarter_turns):
            i, q = -q, i
        return np.stack([i, q], axis=-1)
    if kind == "fliph":
        return np.stack([-frame[..., 0], frame[..., 1]], axis=-1)
    if kind == "flipv":
        return np.stack([frame[..., 0], -frame[..., 1]], axis=-1)
    if kind == "flipboth":
        return np.stack([-frame[..., 0], -frame[..., 1]], axis=-1)
    # noise
    if transform.sigma == 0.0:
        return frame.copy()
    if rng is None:
        raise ValueError("noise transform with sigma > 0 requires an rng")
    draws = rng.normal(0.0, transform.sigma, size=frame.shape)
    return (frame + draws).astype(np.float32)


@dataclass(frozen=True)
class Policy:
    """Ordered list of transforms; expands each frame by scale_factor."""

    name: str
    transforms: tuple[Transform, ...]

    def __post_init__(self):
        if not self.transforms:
            raise ValueError("a policy needs at least one transform")

    @property
    def scale_factor(self) -> int:
        return len(self.transforms)


def builtin_policy(kind: str) -> Policy:
    """Built-in policies: rotation, flip, noise (all N=4), or joint (N=6).

    joint is the deduplicated union of the rotation and flip sets: the flip
    identity coincides with the 0-turn rotation and the double flip with the
    half-turn rotation, leaving 6 distinct transforms.
    """
    if kind == "rotation":
        return Policy("rotation", tuple(rotate(k) for k in range(4)))
    if kind == "flip":
        return Policy("flip", (IDENTITY, FLIP_H, FLIP_V, FLIP_BOTH))
    if kind == "noise":
        return noise_policy(NOISE_SIGMAS_DEFAULT)
    if kind == "joint":
        return Policy("joint", tuple(rotate(k) for k in range(4)) + (FLIP_H, FLIP_V))
    raise ValueError(f"unknown policy kind {kind!r}; expected one of {POLICY_KINDS}")


def noise_policy(sigmas) -> Policy:
    return Policy("noise", tuple(add_noise(s) for s in sigmas))


def identity_policy() -> Policy:
    return Policy("identity", (IDENTITY,))


def augment_dataset(ds: Dataset, policy: Policy, seed: int = 0) -> Dataset:
    """Expand a dataset by policy.scale_factor frames per input frame.

    Output ordering is source order x policy order: variant j of source
    frame i lands at index i * N + j, carrying the source label and SNR.
    Noise draws come from per-(frame, transform) substreams derived from
    the seed, so the result is independent of evaluation order.
    """
    if len(ds) == 0:
        raise ValueError("cannot augment an empty dataset")
    n, scale = len(ds), policy.scale_factor
    out = np.empty((n * scale, ds.seq_len, 2), dtype=np.float32)
    for j, tr in enumerate(policy.transforms):
        if tr.needs_rng:
            for i in range(n):
                rng = np.random.default_rng([seed, i, j])
                out[i * scale + j] = apply_transform(ds.iq[i], tr, rng)
        else:
            out[j::scale] = apply_transform(ds.iq, tr)
    tag = f"augmented:{policy.name}(seed={seed})"
    return Dataset(
        iq=out,
        labels=np.repeat(ds.labels, scale),
        snrs=np.repeat(ds.snrs, scale),
        class_names=ds.class_names,
        provenance=ds.provenance + "|" + tag if ds.provenance else tag,
    )
