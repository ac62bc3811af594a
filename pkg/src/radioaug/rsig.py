"""RSIG v1 container: little-endian binary file of labeled I/Q frames.

Layout: magic "RSIG", u32 version, u32 frame_count, u16 seq_len,
u8 class_count, u8 reserved (0); then class_count name entries
(u8 byte length + UTF-8 bytes); then frame records of u8 label,
i8 snr_db, and seq_len interleaved (I, Q) float32 pairs. Serialization
is deterministic: equal datasets produce byte-identical files.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import DataError
from .frames import Dataset

__all__ = ["MAGIC", "VERSION", "dataset_bytes", "write_rsig", "read_rsig"]

MAGIC = b"RSIG"
VERSION = 1
_HEADER = struct.Struct("<4sIIHBB")


def _record_dtype(seq_len: int) -> np.dtype:
    return np.dtype([("label", "u1"), ("snr", "i1"), ("iq", "<f4", (seq_len, 2))])


def dataset_bytes(ds: Dataset) -> bytes:
    """Serialize a dataset to RSIG v1 bytes."""
    if ds.seq_len > 0xFFFF:
        raise ValueError(f"seq_len {ds.seq_len} exceeds the u16 field")
    if ds.n_classes > 0xFF:
        raise ValueError(f"class count {ds.n_classes} exceeds the u8 field")
    parts = [_HEADER.pack(MAGIC, VERSION, len(ds), ds.seq_len, ds.n_classes, 0)]
    for name in ds.class_names:
        raw = name.encode("utf-8")
        if not 0 < len(raw) <= 255:
            raise ValueError(f"class name {name!r} does not fit a u8-length entry")
        parts.append(struct.pack("<B", len(raw)))
        parts.append(raw)
    records = np.empty(len(ds), dtype=_record_dtype(ds.seq_len))
    records["label"] = ds.labels
    records["snr"] = ds.snrs
    records["iq"] = ds.iq
    parts.append(records.tobytes())
    return b"".join(parts)


def write_rsig(path, ds: Dataset) -> None:
    Path(path).write_bytes(dataset_bytes(ds))


def read_rsig(path) -> Dataset:
    """Parse an RSIG v1 file; rejects wrong magic, version, or sizes."""
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < _HEADER.size:
        raise DataError(f"{path}: truncated header")
    magic, version, frame_count, seq_len, class_count, reserved = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise DataError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise DataError(f"{path}: unsupported version {version}")
    if reserved != 0:
        raise DataError(f"{path}: nonzero reserved byte")
    if seq_len == 0 or class_count == 0:
        raise DataError(f"{path}: empty sequence length or class table")

    offset = _HEADER.size
    names = []
    for _ in range(class_count):
        if offset >= len(blob):
            raise DataError(f"{path}: truncated class table")
        n = blob[offset]
        offset += 1
        if n == 0 or offset + n > len(blob):
            raise DataError(f"{path}: malformed class-name entry")
        names.append(blob[offset : offset + n].decode("utf-8"))
        offset += n

    rec = _record_dtype(seq_len)
    expected = offset + frame_count * rec.itemsize
    if len(blob) != expected:
        raise DataError(f"{path}: expected {expected} bytes, file has {len(blob)}")
    records = np.frombuffer(blob, dtype=rec, count=frame_count, offset=offset)
    labels = records["label"].copy()
    if frame_count and int(labels.max()) >= class_count:
        raise DataError(f"{path}: label index outside the class table")
    return Dataset(
        iq=np.array(records["iq"]),
        labels=labels,
        snrs=records["snr"].copy(),
        class_names=tuple(names),
        provenance=f"rsig:{path}",
    )
