"""Experiment orchestration: splits, augmentation phases, TTA, metrics.

The pipeline mirrors one experiment row: stratified 50/50 split, optional
stratified subsampling of the training side, train-time expansion, LSTM
training, and evaluation that either predicts plainly or fuses the
predicted probabilities of every policy variant (test-time augmentation).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .augment import (Policy, augment_dataset, apply_transform, builtin_policy,
                      noise_policy)
from .errors import DataError
from .frames import Dataset, bulk_features, dataset_features, frame_features, halve_dataset
from .lstm import NetworkParams, forward, forward_batch, init_params
from .train import EpochStats, TrainConfig, train

__all__ = [
    "AUG_PHASES",
    "ExperimentConfig",
    "Metrics",
    "split_dataset",
    "subsample",
    "fuse_probs",
    "tta_predict",
    "evaluate",
    "run_experiment",
]

AUG_PHASES = ("none", "train", "test", "train_test")
_EVAL_CHUNK = 256  # fixed so results do not depend on the thread count


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment row: augmentation phase/policy, data regime, training."""

    aug_phase: str = "none"
    policy: str = "none"
    noise_sigmas: tuple | None = None  # overrides the noise policy's sigmas
    train_fraction: float = 1.0
    seq_len: int | None = None  # None keeps the dataset's length
    halve_after_split: bool = False
    hidden: int = 128
    train: TrainConfig = field(default_factory=TrainConfig)
    seed: int = 0

    def __post_init__(self):
        if self.aug_phase not in AUG_PHASES:
            raise ValueError(f"aug_phase must be one of {AUG_PHASES}")
        if (self.policy == "none") != (self.aug_phase == "none"):
            raise ValueError("policy and aug_phase must both be 'none' or neither")
        if not 0.0 < self.train_fraction <= 1.0:
            raise ValueError("train_fraction must be in (0, 1]")
        if self.hidden <= 0:
            raise ValueError("hidden must be positive")


@dataclass
class Metrics:
    """Per-SNR accuracy and confusion counts (rows true, columns predicted)."""

    class_names: tuple[str, ...]
    per_snr_accuracy: dict
    per_snr_confusion: dict
    overall_accuracy: float

    def per_snr_count(self, snr: int) -> int:
        return int(self.per_snr_confusion[snr].sum())


def _strata(ds: Dataset):
    pairs = sorted({(int(c), int(s)) for c, s in zip(ds.labels, ds.snrs)})
    for label, snr in pairs:
        yield (label, snr), np.flatnonzero((ds.labels == label) & (ds.snrs == snr))


def split_dataset(ds: Dataset, seed: int = 0) -> tuple[Dataset, Dataset]:
    """Stratified 50/50 split: each (class, snr) stratum contributes exactly
    half its frames to each side. Strata with odd counts are rejected."""
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for (label, snr), idx in _strata(ds):
        if len(idx) % 2 != 0:
            raise ValueError(
                f"stratum (class {label}, snr {snr}) has odd count {len(idx)}"
            )
        perm = rng.permutation(idx)
        half = len(idx) // 2
        train_idx.append(perm[:half])
        test_idx.append(perm[half:])
    train_idx = np.sort(np.concatenate(train_idx))
    test_idx = np.sort(np.concatenate(test_idx))
    return ds.select(train_idx), ds.select(test_idx)


def subsample(ds: Dataset, fraction: float, seed: int = 0) -> Dataset:
    """Stratified random subset; per-stratum count is round-half-even of
    fraction times the stratum size."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must be in (0, 1]")
    if fraction == 1.0:
        return ds.select(np.arange(len(ds)))
    rng = np.random.default_rng(seed)
    keep = []
    for (label, snr), idx in _strata(ds):
        count = round(fraction * len(idx))
        if count == 0:
            raise ValueError(
                f"fraction {fraction} empties stratum (class {label}, snr {snr})"
            )
        keep.append(rng.permutation(idx)[:count])
    return ds.select(np.sort(np.concatenate(keep)))


def fuse_probs(prob_rows) -> tuple[int, np.ndarray]:
    """Sum per-variant probability vectors; argmax (lowest index on ties)
    and the sum divided by the variant count."""
    stack = np.asarray(prob_rows)
    if stack.ndim != 2 or stack.shape[0] == 0:
        raise ValueError("need a (N, K) stack of distributions")
    totals = stack.sum(axis=0)
    return int(np.argmax(totals)), totals / stack.shape[0]


def tta_predict(params: NetworkParams, frame, policy: Policy, rng=None):
    """Fused prediction for one raw I/Q frame under a policy.

    With the single-transform identity policy this is bit-identical to a
    plain forward pass on the frame's features.
    """
    rows = []
    for tr in policy.transforms:
        variant = apply_transform(frame, tr, rng)
        rows.append(forward(params, frame_features(variant)))
    return fuse_probs(rows)


def _eval_probs(params, iq, policy, tta_seed, base_index):
    """Probabilities for a chunk of raw frames, fused over the policy."""
    if policy is None:
        return forward_batch(params, bulk_features(iq))
    total = None
    for j, tr in enumerate(policy.transforms):
        if tr.needs_rng:
            variant = np.empty_like(iq)
            for i in range(len(iq)):
                rng = np.random.default_rng([tta_seed, base_index + i, j])
                variant[i] = apply_transform(iq[i], tr, rng)
        else:
            variant = apply_transform(iq, tr)
        probs = forward_batch(params, bulk_features(variant))
        total = probs if total is None else total + probs
    return total / policy.scale_factor


def evaluate(params: NetworkParams, ds: Dataset, policy: Policy | None = None,
             tta_seed: int = 0, threads: int = 1) -> Metrics:
    """Per-SNR accuracy and confusion matrices over a test set.

    Deterministic: TTA noise comes from substreams keyed on (tta_seed,
    frame index, transform index), and frames are processed in fixed-size
    chunks whose boundaries do not depend on the thread count.
    """
    if params.n_classes != ds.n_classes:
        raise DataError(
            f"model has {params.n_classes} classes, dataset has {ds.n_classes}"
        )
    n = len(ds)
    starts = range(0, n, _EVAL_CHUNK)

    def chunk_probs(start):
        stop = min(start + _EVAL_CHUNK, n)
        return _eval_probs(params, ds.iq[start:stop], policy, tta_seed, start)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            pieces = list(pool.map(chunk_probs, starts))
    else:
        pieces = [chunk_probs(s) for s in starts]
    probs = np.concatenate(pieces) if pieces else np.zeros((0, ds.n_classes))
    preds = probs.argmax(axis=1)

    k = ds.n_classes
    per_acc, per_conf = {}, {}
    for snr in sorted(set(int(s) for s in ds.snrs)):
        mask = ds.snrs == snr
        conf = np.zeros((k, k), dtype=np.int64)
        np.add.at(conf, (ds.labels[mask].astype(np.intp), preds[mask]), 1)
        per_conf[snr] = conf
        per_acc[snr] = float(np.trace(conf) / conf.sum())
    overall = float((preds == ds.labels).mean()) if n else 0.0
    return Metrics(ds.class_names, per_acc, per_conf, overall)


def _derived_seeds(seed: int) -> dict:
    state = np.random.SeedSequence(seed).generate_state(4)
    return {
        "split": int(state[0]),
        "subsample": int(state[1]),
        "augment": int(state[2]),
        "tta": int(state[3]),
    }


def run_experiment(cfg: ExperimentConfig, data: Dataset, threads: int = 1,
                   log=None):
    """Full pipeline; returns (params, metrics, per-epoch history).

    Train-time augmentation never touches the test side; test-time
    augmentation fuses per query and never modifies stored test data.
    """
    seeds = _derived_seeds(cfg.seed)
    ds = data
    halve_late = False
    if cfg.seq_len is not None and cfg.seq_len != ds.seq_len:
        if cfg.seq_len * 2 != ds.seq_len:
            raise ValueError(
                f"seq_len {cfg.seq_len} is not the data's length or its half"
            )
        if cfg.halve_after_split:
            halve_late = True
        else:
            ds = halve_dataset(ds)
    train_ds, test_ds = split_dataset(ds, seeds["split"])
    if halve_late:
        train_ds = halve_dataset(train_ds)
        test_ds = halve_dataset(test_ds)
    if cfg.train_fraction < 1.0:
        train_ds = subsample(train_ds, cfg.train_fraction, seeds["subsample"])
    if cfg.policy == "none":
        policy = None
    elif cfg.policy == "noise" and cfg.noise_sigmas:
        policy = noise_policy(cfg.noise_sigmas)
    else:
        policy = builtin_policy(cfg.policy)
    if policy is not None and cfg.aug_phase in ("train", "train_test"):
        train_ds = augment_dataset(train_ds, policy, seeds["augment"])

    params = init_params(cfg.hidden, ds.n_classes, input_dim=2,
                         seed=cfg.train.seed)
    history = train(params, dataset_features(train_ds), train_ds.labels,
                    cfg.train, log=log)

    tta = policy if cfg.aug_phase in ("test", "train_test") else None
    metrics = evaluate(params, test_ds, tta, tta_seed=seeds["tta"],
                       threads=threads)
    return params, metrics, history
