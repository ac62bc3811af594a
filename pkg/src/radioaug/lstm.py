"""Two-layer LSTM classifier: parameters, forward pass, and BPTT gradients.

Plain numpy throughout. Gate order in every packed (4h, .) tensor is
input, forget, cell-candidate, output. Each gate set carries two bias
vectors (input-side and hidden-side), both added in the pre-activation.
Hidden and cell states start at zero; the dense softmax head reads the
final time step of layer 2. Training runs in float32; gradient checking
uses float64 parameters and inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

__all__ = [
    "LstmLayerParams",
    "NetworkParams",
    "count_params",
    "init_params",
    "dropout_masks",
    "forward",
    "forward_batch",
    "cross_entropy",
    "loss_and_grads",
    "backward",
]


@dataclass
class LstmLayerParams:
    """One layer's weights: shapes (4h, d), (4h, h), (4h,), (4h,)."""

    w_ih: np.ndarray
    w_hh: np.ndarray
    b_ih: np.ndarray
    b_hh: np.ndarray

    @property
    def hidden_size(self) -> int:
        return self.w_hh.shape[1]

    @property
    def input_size(self) -> int:
        return self.w_ih.shape[1]

    def tensors(self):
        return [("w_ih", self.w_ih), ("w_hh", self.w_hh),
                ("b_ih", self.b_ih), ("b_hh", self.b_hh)]


@dataclass
class NetworkParams:
    """Both LSTM layers plus the dense softmax head (w_out: (h, K))."""

    layer1: LstmLayerParams
    layer2: LstmLayerParams
    w_out: np.ndarray
    b_out: np.ndarray

    @property
    def hidden_size(self) -> int:
        return self.layer1.hidden_size

    @property
    def input_dim(self) -> int:
        return self.layer1.input_size

    @property
    def n_classes(self) -> int:
        return self.w_out.shape[1]

    def tensors(self):
        """(name, array) pairs in the serialization order."""
        out = [(f"layer1.{n}", a) for n, a in self.layer1.tensors()]
        out += [(f"layer2.{n}", a) for n, a in self.layer2.tensors()]
        out += [("w_out", self.w_out), ("b_out", self.b_out)]
        return out

    @property
    def num_params(self) -> int:
        return sum(a.size for _, a in self.tensors())


def count_params(hidden: int, classes: int, input_dim: int = 2) -> int:
    """Closed-form scalar count under the double-bias convention."""
    if hidden <= 0 or classes <= 0 or input_dim <= 0:
        raise ValueError("dimensions must be positive")

    def layer(d):
        return 4 * hidden * d + 4 * hidden * hidden + 8 * hidden

    return layer(input_dim) + layer(hidden) + hidden * classes + classes


def init_params(hidden: int, classes: int, input_dim: int = 2, seed: int = 0,
                dtype=np.float32) -> NetworkParams:
    """Uniform(-1/sqrt(h), 1/sqrt(h)) weights, zero biases, forget bias 1."""
    rng = np.random.default_rng(seed)
    bound = 1.0 / np.sqrt(hidden)

    def layer(d):
        w_ih = rng.uniform(-bound, bound, (4 * hidden, d)).astype(dtype)
        w_hh = rng.uniform(-bound, bound, (4 * hidden, hidden)).astype(dtype)
        b_ih = np.zeros(4 * hidden, dtype=dtype)
        b_hh = np.zeros(4 * hidden, dtype=dtype)
        b_ih[hidden : 2 * hidden] = 1.0
        return LstmLayerParams(w_ih, w_hh, b_ih, b_hh)

    layer1 = layer(input_dim)
    layer2 = layer(hidden)
    w_out = rng.uniform(-bound, bound, (hidden, classes)).astype(dtype)
    b_out = np.zeros(classes, dtype=dtype)
    params = NetworkParams(layer1, layer2, w_out, b_out)
    assert params.num_params == count_params(hidden, classes, input_dim)
    return params


def _layer_forward(layer: LstmLayerParams, x: np.ndarray):
    """Run one layer over a (B, T, d) batch; returns outputs and a cache."""
    batch, steps, _ = x.shape
    h = layer.hidden_size
    dtype = x.dtype
    zx = x @ layer.w_ih.T + (layer.b_ih + layer.b_hh)
    w_hh_t = np.ascontiguousarray(layer.w_hh.T)
    gates = np.empty((batch, steps, 4 * h), dtype=dtype)
    cells = np.empty((batch, steps, h), dtype=dtype)
    tanh_c = np.empty((batch, steps, h), dtype=dtype)
    outputs = np.empty((batch, steps, h), dtype=dtype)
    h_t = np.zeros((batch, h), dtype=dtype)
    c_t = np.zeros((batch, h), dtype=dtype)
    for t in range(steps):
        z = zx[:, t] + h_t @ w_hh_t
        ig = expit(z[:, :h])
        fg = expit(z[:, h : 2 * h])
        gg = np.tanh(z[:, 2 * h : 3 * h])
        og = expit(z[:, 3 * h :])
        c_t = fg * c_t + ig * gg
        tc = np.tanh(c_t)
        h_t = og * tc
        gates[:, t, :h] = ig
        gates[:, t, h : 2 * h] = fg
        gates[:, t, 2 * h : 3 * h] = gg
        gates[:, t, 3 * h :] = og
        cells[:, t] = c_t
        tanh_c[:, t] = tc
        outputs[:, t] = h_t
    return outputs, (x, gates, cells, tanh_c, outputs)


def _layer_backward(layer: LstmLayerParams, cache, d_out: np.ndarray):
    """Gradients for one layer given d(loss)/d(output sequence)."""
    x, gates, cells, tanh_c, outputs = cache
    batch, steps, _ = x.shape
    h = layer.hidden_size
    dtype = x.dtype
    dz_seq = np.empty((batch, steps, 4 * h), dtype=dtype)
    dh_next = np.zeros((batch, h), dtype=dtype)
    dc_next = np.zeros((batch, h), dtype=dtype)
    for t in range(steps - 1, -1, -1):
        ig = gates[:, t, :h]
        fg = gates[:, t, h : 2 * h]
        gg = gates[:, t, 2 * h : 3 * h]
        og = gates[:, t, 3 * h :]
        tc = tanh_c[:, t]
        dh = d_out[:, t] + dh_next
        dc = dc_next + dh * og * (1.0 - tc * tc)
        c_prev = cells[:, t - 1] if t > 0 else 0.0
        dz = dz_seq[:, t]
        dz[:, :h] = (dc * gg) * ig * (1.0 - ig)
        dz[:, h : 2 * h] = (dc * c_prev) * fg * (1.0 - fg)
        dz[:, 2 * h : 3 * h] = (dc * ig) * (1.0 - gg * gg)
        dz[:, 3 * h :] = (dh * tc) * og * (1.0 - og)
        dh_next = dz @ layer.w_hh
        dc_next = dc * fg
    h_prev = np.concatenate(
        [np.zeros((batch, 1, h), dtype=dtype), outputs[:, :-1]], axis=1
    )
    dw_ih = np.tensordot(dz_seq, x, axes=([0, 1], [0, 1]))
    dw_hh = np.tensordot(dz_seq, h_prev, axes=([0, 1], [0, 1]))
    db = dz_seq.sum(axis=(0, 1))
    dx = dz_seq @ layer.w_ih
    return LstmLayerParams(dw_ih, dw_hh, db, db.copy()), dx


def dropout_masks(rng, rate: float, batch: int, steps: int, hidden: int,
                  dtype=np.float32):
    """Inverted-dropout multipliers for both layers, redrawn per step/sample."""
    if not 0.0 <= rate < 1.0:
        raise ValueError("dropout rate must be in [0, 1)")
    if rate == 0.0:
        return None
    shape = (batch, steps, hidden)
    keep = 1.0 - rate
    m1 = (rng.random(shape) >= rate).astype(dtype) / dtype(keep)
    m2 = (rng.random(shape) >= rate).astype(dtype) / dtype(keep)
    return m1, m2


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _forward_full(params: NetworkParams, x: np.ndarray, masks=None):
    h1, cache1 = _layer_forward(params.layer1, x)
    h1_in = h1 * masks[0] if masks is not None else h1
    h2, cache2 = _layer_forward(params.layer2, h1_in)
    last = h2[:, -1] * masks[1][:, -1] if masks is not None else h2[:, -1]
    logits = last @ params.w_out + params.b_out
    return logits, (cache1, cache2, last, masks)


def forward_batch(params: NetworkParams, x: np.ndarray, masks=None) -> np.ndarray:
    """Class probabilities for a (B, T, input_dim) feature batch."""
    x = np.asarray(x)
    if x.ndim != 3 or x.shape[2] != params.input_dim:
        raise ValueError(f"expected features of shape (B, T, {params.input_dim}), got {x.shape}")
    logits, _ = _forward_full(params, x, masks)
    return _softmax(logits)


def forward(params: NetworkParams, features: np.ndarray, dropout: float = 0.0,
            rng=None) -> np.ndarray:
    """Class probabilities for one (T, input_dim) feature frame.

    dropout > 0 selects train mode and requires an rng for the masks;
    the default is the deterministic eval mode.
    """
    features = np.asarray(features)
    if features.ndim != 2 or features.shape[1] != params.input_dim:
        raise ValueError(f"expected features of shape (T, {params.input_dim}), got {features.shape}")
    masks = None
    if dropout > 0.0:
        if rng is None:
            raise ValueError("train-mode forward requires an rng for dropout")
        masks = dropout_masks(rng, dropout, 1, features.shape[0],
                              params.hidden_size, dtype=features.dtype)
    return forward_batch(params, features[None], masks)[0]


def cross_entropy(probs: np.ndarray, label: int) -> float:
    """Plain -log(p[label]) on an explicit probability vector."""
    probs = np.asarray(probs)
    if probs.ndim != 1 or not 0 <= label < probs.shape[0]:
        raise ValueError("need a 1-d distribution and a valid label")
    return float(-np.log(probs[label]))


def loss_and_grads(params: NetworkParams, x: np.ndarray, labels: np.ndarray,
                   masks=None):
    """Mean cross-entropy over the batch, its gradients, and the probabilities.

    The loss is computed in fused log-softmax form. Gradients cover every
    parameter tensor and respect the supplied dropout masks.
    """
    x = np.asarray(x)
    labels = np.asarray(labels, dtype=np.intp)
    if x.ndim != 3 or x.shape[2] != params.input_dim:
        raise ValueError(f"expected features of shape (B, T, {params.input_dim}), got {x.shape}")
    if labels.shape != (x.shape[0],):
        raise ValueError("labels must be one integer per batch row")
    if labels.size == 0:
        raise ValueError("batch is empty")

    logits, (cache1, cache2, last, masks) = _forward_full(params, x, masks)
    batch = x.shape[0]
    rows = np.arange(batch)
    shifted = logits - logits.max(axis=1, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=1))
    loss = float(np.mean(lse - shifted[rows, labels]))
    probs = _softmax(logits)

    dlogits = probs.copy()
    dlogits[rows, labels] -= 1.0
    dlogits /= batch

    dw_out = last.T @ dlogits
    db_out = dlogits.sum(axis=0)
    d_last = dlogits @ params.w_out.T
    if masks is not None:
        d_last = d_last * masks[1][:, -1]
    d_h2 = np.zeros_like(cache2[4])
    d_h2[:, -1] = d_last
    grads2, d_h1_in = _layer_backward(params.layer2, cache2, d_h2)
    if masks is not None:
        d_h1_in = d_h1_in * masks[0]
    grads1, _ = _layer_backward(params.layer1, cache1, d_h1_in)
    grads = NetworkParams(grads1, grads2, dw_out, db_out)
    return loss, grads, probs


def backward(params: NetworkParams, x: np.ndarray, labels: np.ndarray,
             masks=None) -> NetworkParams:
    """Mean-over-batch gradient of the cross-entropy loss."""
    _, grads, _ = loss_and_grads(params, x, labels, masks)
    return grads
