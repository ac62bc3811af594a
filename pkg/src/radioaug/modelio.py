"""RMDL v1 model container: UTF-8 key:value header plus packed tensors.

Header lines ("key:value") end with a single blank line; required keys are
format, version, hidden, layers, classes, input_dim, class_names, and
provenance. The payload is every parameter tensor as little-endian float32
in a fixed order: layer1 gate weights (input-to-hidden, hidden-to-hidden),
layer1 biases (input-side, hidden-side), the same four for layer2, then
head weights and head bias. Matrices are row-major.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import DataError
from .lstm import LstmLayerParams, NetworkParams

__all__ = ["model_bytes", "save_model", "load_model"]

_FORMAT = "RMDL"
_VERSION = "1"


def model_bytes(params: NetworkParams, class_names, provenance: str = "") -> bytes:
    class_names = tuple(class_names)
    if len(class_names) != params.n_classes:
        raise ValueError("class table size does not match the head dimension")
    for name in class_names:
        if "," in name or "\n" in name or not name:
            raise ValueError(f"class name {name!r} cannot be stored in the header")
    if "\n" in provenance:
        provenance = provenance.replace("\n", " ")
    header = (
        f"format:{_FORMAT}\n"
        f"version:{_VERSION}\n"
        f"hidden:{params.hidden_size}\n"
        f"layers:2\n"
        f"classes:{params.n_classes}\n"
        f"input_dim:{params.input_dim}\n"
        f"class_names:{','.join(class_names)}\n"
        f"provenance:{provenance}\n"
        "\n"
    )
    payload = b"".join(
        np.ascontiguousarray(a, dtype="<f4").tobytes() for _, a in params.tensors()
    )
    return header.encode("utf-8") + payload


def save_model(path, params: NetworkParams, class_names, provenance: str = "") -> None:
    Path(path).write_bytes(model_bytes(params, class_names, provenance))


def load_model(path):
    """Returns (params, class_names, provenance); rejects malformed files."""
    path = Path(path)
    blob = path.read_bytes()
    sep = blob.find(b"\n\n")
    if sep < 0:
        raise DataError(f"{path}: missing header terminator")
    try:
        lines = blob[:sep].decode("utf-8").splitlines()
    except UnicodeDecodeError as exc:
        raise DataError(f"{path}: header is not UTF-8") from exc
    meta = {}
    for line in lines:
        key, colon, value = line.partition(":")
        if not colon:
            raise DataError(f"{path}: malformed header line {line!r}")
        meta[key] = value
    if meta.get("format") != _FORMAT or meta.get("version") != _VERSION:
        raise DataError(f"{path}: not an RMDL v{_VERSION} file")
    try:
        hidden = int(meta["hidden"])
        layers = int(meta["layers"])
        classes = int(meta["classes"])
        input_dim = int(meta["input_dim"])
        class_names = tuple(meta["class_names"].split(","))
    except (KeyError, ValueError) as exc:
        raise DataError(f"{path}: incomplete header") from exc
    if layers != 2:
        raise DataError(f"{path}: expected 2 layers, header says {layers}")
    if len(class_names) != classes:
        raise DataError(f"{path}: class_names count disagrees with classes")

    shapes = []
    for d in (input_dim, hidden):
        shapes += [(4 * hidden, d), (4 * hidden, hidden), (4 * hidden,), (4 * hidden,)]
    shapes += [(hidden, classes), (classes,)]
    payload = blob[sep + 2 :]
    expected = sum(int(np.prod(s)) for s in shapes) * 4
    if len(payload) != expected:
        raise DataError(f"{path}: expected {expected} payload bytes, found {len(payload)}")
    tensors = []
    offset = 0
    for shape in shapes:
        count = int(np.prod(shape))
        arr = np.frombuffer(payload, dtype="<f4", count=count, offset=offset)
        tensors.append(arr.reshape(shape).copy())
        offset += count * 4
    params = NetworkParams(
        layer1=LstmLayerParams(*tensors[0:4]),
        layer2=LstmLayerParams(*tensors[4:8]),
        w_out=tensors[8],
        b_out=tensors[9],
    )
    return params, class_names, meta.get("provenance", "")
