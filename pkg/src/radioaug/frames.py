"""Complex baseband frames, labeled datasets, and amplitude/phase features.

A frame is a float32 array of shape (seq_len, 2); column 0 holds the
in-phase component and column 1 the quadrature component. A dataset stacks
frames into a single (n, seq_len, 2) array with per-frame class and SNR
labels. All functions here are pure; nothing mutates its input.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "Dataset",
    "as_frame",
    "from_complex",
    "to_complex",
    "frame_power",
    "normalize_frame",
    "to_features",
    "frame_features",
    "halve_frame",
    "halve_dataset",
    "bulk_features",
    "dataset_features",
]

_PI32 = np.float32(np.pi)


def as_frame(samples) -> np.ndarray:
    """Coerce to the canonical (seq_len, 2) float32 frame layout."""
    frame = np.asarray(samples, dtype=np.float32)
    if frame.ndim != 2 or frame.shape[1] != 2 or frame.shape[0] == 0:
        raise ValueError(f"expected samples of shape (seq_len, 2), got {frame.shape}")
    return frame


def from_complex(z) -> np.ndarray:
    """Pack a complex sequence into the (seq_len, 2) frame layout."""
    z = np.asarray(z)
    return np.stack([z.real, z.imag], axis=-1).astype(np.float32)


def to_complex(frame) -> np.ndarray:
    frame = np.asarray(frame)
    return frame[..., 0] + 1j * frame[..., 1]


def frame_power(frame) -> float:
    """Mean squared complex magnitude, accumulated in double precision."""
    frame = np.asarray(frame, dtype=np.float64)
    return float(np.mean(frame[..., 0] ** 2 + frame[..., 1] ** 2))


def normalize_frame(frame) -> np.ndarray:
    """Scale a frame by one positive constant so its RMS magnitude is 1."""
    frame = as_frame(frame)
    power = frame_power(frame)
    if power == 0.0:
        raise ValueError("cannot normalize an all-zero frame")
    return (frame.astype(np.float64) / np.sqrt(power)).astype(np.float32)


def to_features(frame) -> np.ndarray:
    """Convert I/Q samples to (amplitude, phase) pairs.

    Phase is the four-quadrant arc tangent folded into (-pi, pi] and then
    divided by pi, so both feature channels are O(1). The origin maps to
    phase 0. Output has the same length as the input.
    """
    frame = as_frame(frame)
    if not np.isfinite(frame).all():
        raise ValueError("frame contains non-finite samples")
    i, q = frame[:, 0], frame[:, 1]
    amp = np.sqrt(i * i + q * q)
    phase = np.arctan2(q, i)
    phase[phase == -_PI32] = _PI32  # -pi only occurs for q = -0.0
    return np.stack([amp, phase / _PI32], axis=1)


def frame_features(frame) -> np.ndarray:
    """Classifier input for one frame: RMS-normalize, then to_features."""
    return to_features(normalize_frame(frame))


def halve_frame(frame) -> tuple[np.ndarray, np.ndarray]:
    """Split an even-length frame into its first and second halves."""
    frame = as_frame(frame)
    n = frame.shape[0]
    if n % 2 != 0:
        raise ValueError(f"cannot halve a frame of odd length {n}")
    half = n // 2
    return frame[:half].copy(), frame[half:].copy()


@dataclass
class Dataset:
    """Labeled I/Q frames sharing one sequence length.

    iq          (n, seq_len, 2) float32
    labels      (n,) uint8 indices into class_names
    snrs        (n,) int8, per-frame SNR in dB
    class_names ordered class table
    provenance  free text: generator config or import source
    """

    iq: np.ndarray
    labels: np.ndarray
    snrs: np.ndarray
    class_names: tuple[str, ...]
    provenance: str = ""

    def __post_init__(self):
        self.iq = np.asarray(self.iq, dtype=np.float32)
        self.labels = np.asarray(self.labels, dtype=np.uint8)
        self.snrs = np.asarray(self.snrs, dtype=np.int8)
        self.class_names = tuple(self.class_names)
        if self.iq.ndim != 3 or self.iq.shape[2] != 2:
            raise ValueError(f"iq must have shape (n, seq_len, 2), got {self.iq.shape}")
        n = self.iq.shape[0]
        if self.labels.shape != (n,) or self.snrs.shape != (n,):
            raise ValueError("labels/snrs length does not match frame count")
        if n and int(self.labels.max()) >= len(self.class_names):
            raise ValueError("label index outside the class table")

    def __len__(self) -> int:
        return self.iq.shape[0]

    @property
    def seq_len(self) -> int:
        return self.iq.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def frame(self, i: int) -> np.ndarray:
        return self.iq[i]

    def select(self, indices) -> "Dataset":
        """New dataset holding the given frames (copies, original order of indices)."""
        return replace(
            self,
            iq=self.iq[indices].copy(),
            labels=self.labels[indices].copy(),
            snrs=self.snrs[indices].copy(),
        )


def halve_dataset(ds: Dataset) -> Dataset:
    """Split every frame in two, doubling the frame count.

    Both halves inherit the source frame's label and SNR and stay adjacent
    in the output (source order preserved).
    """
    if ds.seq_len % 2 != 0:
        raise ValueError(f"cannot halve frames of odd length {ds.seq_len}")
    half = ds.seq_len // 2
    return Dataset(
        iq=ds.iq.reshape(len(ds) * 2, half, 2).copy(),
        labels=np.repeat(ds.labels, 2),
        snrs=np.repeat(ds.snrs, 2),
        class_names=ds.class_names,
        provenance=ds.provenance + "|halved" if ds.provenance else "halved",
    )


def bulk_features(iq: np.ndarray) -> np.ndarray:
    """frame_features vectorized over a stack of raw frames (n, seq_len, 2)."""
    iq = np.asarray(iq, dtype=np.float32)
    if iq.ndim != 3 or iq.shape[2] != 2:
        raise ValueError(f"expected frames of shape (n, seq_len, 2), got {iq.shape}")
    if not np.isfinite(iq).all():
        raise ValueError("frames contain non-finite samples")
    power = np.einsum("nlc,nlc->n", iq, iq, dtype=np.float64) / iq.shape[1]
    if np.any(power == 0.0):
        raise ValueError("stack contains an all-zero frame")
    scale = (1.0 / np.sqrt(power)).astype(np.float32)
    scaled = iq * scale[:, None, None]
    i, q = scaled[..., 0], scaled[..., 1]
    amp = np.sqrt(i * i + q * q)
    phase = np.arctan2(q, i)
    phase[phase == -_PI32] = _PI32
    phase /= _PI32
    return np.stack([amp, phase], axis=-1)


def dataset_features(ds: Dataset) -> np.ndarray:
    """Classifier inputs for a whole dataset: per-frame RMS normalization,
    then amplitude and phase/pi, shape (n, seq_len, 2)."""
    return bulk_features(ds.iq)
