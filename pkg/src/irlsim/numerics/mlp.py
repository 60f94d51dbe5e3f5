"""Plain fully connected networks on the gradient tape.

Three output heads:
  * ``linear``   — raw affine output,
  * ``tanh``     — bounded output in (-1, 1) (pre-activation clipped at +-18
                   so the bound stays strict in float64),
  * ``gaussian`` — last layer emits (mean, raw) pairs; ``raw`` is squashed
                   smoothly into [LOG_STD_MIN, LOG_STD_MAX] log-stds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError, TapeError
from . import tape as tp
from .tape import Tape, Var

LOG_STD_MIN = -5.0
LOG_STD_MAX = 1.0

# tanh(18) is the largest double strictly below 1; clipping the pre-activation
# there keeps tanh heads strictly inside (-1, 1).
TANH_CLIP = 18.0

ACTIVATIONS = ("tanh", "relu")
HEADS = ("linear", "tanh", "gaussian")


@dataclass
class MlpParams:
    """Weights/biases of one MLP. weights[i] has shape (out_i, in_i)."""

    weights: list = field(default_factory=list)
    biases: list = field(default_factory=list)
    activation: str = "tanh"
    head: str = "linear"

    def arrays(self) -> list:
        """Flat parameter list, interleaved [W0, b0, W1, b1, ...]."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def copy(self) -> "MlpParams":
        return MlpParams([w.copy() for w in self.weights],
                         [b.copy() for b in self.biases],
                         self.activation, self.head)

    @property
    def in_dim(self) -> int:
        return self.weights[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights[-1].shape[0]

    def validate(self) -> None:
        if self.activation not in ACTIVATIONS:
            raise ConfigurationError(f"unknown activation {self.activation!r}")
        if self.head not in HEADS:
            raise ConfigurationError(f"unknown head {self.head!r}")
        for i in range(len(self.weights) - 1):
            if self.weights[i + 1].shape[1] != self.weights[i].shape[0]:
                raise ConfigurationError(
                    f"layer {i} out dim {self.weights[i].shape[0]} does not chain "
                    f"into layer {i + 1} in dim {self.weights[i + 1].shape[1]}")
        for w, b in zip(self.weights, self.biases):
            if b.shape != (w.shape[0],):
                raise ConfigurationError("bias shape does not match weight rows")
        if self.head == "gaussian" and self.out_dim % 2 != 0:
            raise ConfigurationError("gaussian head needs an even output width")


def init_mlp(sizes, activation: str = "tanh", head: str = "linear",
             rng: np.random.Generator | None = None,
             zero_final: bool = False) -> MlpParams:
    """Xavier-uniform init; ``zero_final`` zeroes the last layer."""
    if rng is None:
        rng = np.random.default_rng(0)
    weights, biases = [], []
    for i in range(len(sizes) - 1):
        fan_in, fan_out = sizes[i], sizes[i + 1]
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        w = rng.uniform(-limit, limit, size=(fan_out, fan_in))
        b = np.zeros(fan_out)
        if zero_final and i == len(sizes) - 2:
            w[:] = 0.0
        weights.append(w)
        biases.append(b)
    params = MlpParams(weights, biases, activation, head)
    params.validate()
    return params


def _apply_head(z: Var, head: str) -> Var:
    if head == "linear":
        return z
    if head == "tanh":
        return tp.tanh(tp.clip(z, -TANH_CLIP, TANH_CLIP))
    # gaussian: first half means, second half squashed log-stds
    d = z.shape[-1] // 2
    mean = tp.slice_last(z, 0, d)
    raw = tp.slice_last(z, d, 2 * d)
    half_span = 0.5 * (LOG_STD_MAX - LOG_STD_MIN)
    log_std = tp.add(tp.mul(tp.add(tp.tanh(raw), 1.0), half_span), LOG_STD_MIN)
    return tp.concat([mean, log_std], axis=-1)


def mlp_forward(params: MlpParams, x, tape: Tape | None = None, *,
                watch: bool = True) -> Var:
    """Forward pass; records intermediates on ``tape`` when given.

    Accepts a single input vector (in,) or a batch (B, in). Parameters are
    registered as tape leaves unless ``watch=False`` (frozen network whose
    inputs may still carry gradients).
    """
    xv = x if isinstance(x, Var) else tp.constant(x)
    if xv.value.ndim not in (1, 2):
        raise ConfigurationError("mlp input must be a vector or a batch of vectors")
    single = xv.value.ndim == 1
    if xv.value.shape[-1] != params.in_dim:
        raise ConfigurationError(
            f"input dim {xv.value.shape[-1]} != first layer in dim {params.in_dim}")
    h = tp.reshape(xv, (1, -1)) if single else xv
    act = tp.tanh if params.activation == "tanh" else tp.relu
    n = len(params.weights)
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        if tape is not None and watch:
            wv, bv = tape.watch(w), tape.watch(b)
        else:
            wv, bv = tp.constant(w), tp.constant(b)
        h = tp.affine(h, wv, bv)
        if i < n - 1:
            h = act(h)
    out = _apply_head(h, params.head)
    if single:
        out = tp.reshape(out, (-1,))
    if tape is not None:
        tape._forward_record = (out, params)
    return out


def mlp_backward(tape: Tape, upstream) -> list:
    """Gradient of upstream . output w.r.t. the last-forwarded net's arrays.

    Returns arrays aligned with ``MlpParams.arrays()``.
    """
    if tape is None or tape._forward_record is None:
        raise TapeError("no forward pass recorded on this tape")
    out, params = tape._forward_record
    upstream = np.asarray(upstream, dtype=np.float64)
    if upstream.shape != out.value.shape:
        raise TapeError(
            f"upstream shape {upstream.shape} does not match output {out.value.shape}")
    tape.backward(out, seed=upstream)
    return [tape.grad_for(a) for a in params.arrays()]


def mlp_eval(params: MlpParams, x: np.ndarray) -> np.ndarray:
    """Fast numpy-only forward (same math as mlp_forward, no tape)."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    h = x.reshape(1, -1) if single else x
    act = np.tanh if params.activation == "tanh" else lambda v: np.maximum(v, 0.0)
    n = len(params.weights)
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        h = h @ w.T + b
        if i < n - 1:
            h = act(h)
    if params.head == "tanh":
        h = np.tanh(np.clip(h, -TANH_CLIP, TANH_CLIP))
    elif params.head == "gaussian":
        d = h.shape[-1] // 2
        mean, raw = h[..., :d], h[..., d:]
        log_std = LOG_STD_MIN + 0.5 * (LOG_STD_MAX - LOG_STD_MIN) * (np.tanh(raw) + 1.0)
        h = np.concatenate([mean, log_std], axis=-1)
    return h[0] if single else h


def split_gaussian_head(out):
    """Split a gaussian-head output (mean ++ log_std) into its halves."""
    if isinstance(out, Var):
        d = out.shape[-1] // 2
        return tp.slice_last(out, 0, d), tp.slice_last(out, d, 2 * d)
    d = out.shape[-1] // 2
    return out[..., :d], out[..., d:]
