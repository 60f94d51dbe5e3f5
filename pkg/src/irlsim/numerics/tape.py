"""Reverse-mode gradient tape over a fixed operator set.

Everything is float64 numpy. A ``Var`` wraps an array; operators build new
``Var``s and, when any input is tracked on a tape, append a backward closure
to that tape. ``Tape.backward`` replays the closures in reverse execution
order, which is a valid topological order because nodes are only ever built
from already existing nodes.

Parameters are registered with ``Tape.watch`` (cached by array identity), so
two sub-expressions touching the same parameter accumulate into one gradient.
Constants (plain arrays, or ``Var``s with no tape) never receive gradients.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from ..errors import TapeError


class Var:
    """A float64 array plus its accumulated gradient on a tape."""

    __slots__ = ("value", "grad", "tape")

    def __init__(self, value, tape: "Tape | None" = None):
        self.value = value if isinstance(value, np.ndarray) and value.dtype == np.float64 \
            else np.asarray(value, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.tape = tape

    @property
    def shape(self):
        return self.value.shape

    def __repr__(self):
        return f"Var(shape={self.value.shape}, tracked={self.tape is not None})"

    # Arithmetic sugar so losses read naturally.
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return neg(self)

    def __truediv__(self, other):
        if isinstance(other, Var):
            raise TypeError("division by a tracked Var is not in the operator set")
        return mul(self, 1.0 / np.asarray(other, dtype=np.float64))


class Tape:
    """Records backward closures; ``backward`` runs them newest-first."""

    __slots__ = ("_ops", "_watched", "_forward_record", "_consumed")

    def __init__(self):
        self._ops: list = []
        self._watched: dict[int, Var] = {}
        self._forward_record = None  # set by mlp_forward, used by mlp_backward
        self._consumed = False

    def watch(self, arr: np.ndarray) -> Var:
        """Return the (cached) leaf Var for a parameter array."""
        leaf = self._watched.get(id(arr))
        if leaf is None:
            leaf = Var(arr, self)
            self._watched[id(arr)] = leaf
        return leaf

    def watch_all(self, arrs: Iterable[np.ndarray]) -> list[Var]:
        return [self.watch(a) for a in arrs]

    def grad_for(self, arr: np.ndarray) -> np.ndarray:
        """Gradient accumulated for a watched array (zeros if untouched)."""
        leaf = self._watched.get(id(arr))
        if leaf is None or leaf.grad is None:
            return np.zeros_like(arr)
        return leaf.grad

    def backward(self, root: Var, seed: np.ndarray | None = None) -> None:
        if root.tape is not self:
            raise TapeError("root Var was not recorded on this tape")
        if self._consumed:
            raise TapeError("tape backward already ran; build a fresh tape")
        self._consumed = True
        if seed is None:
            root.grad = np.ones_like(root.value)
        else:
            seed = np.asarray(seed, dtype=np.float64)
            if seed.shape != root.value.shape:
                raise TapeError(
                    f"seed shape {seed.shape} does not match output {root.value.shape}")
            root.grad = seed.copy()
        for back in reversed(self._ops):
            back()


def _val(x) -> np.ndarray:
    if isinstance(x, Var):
        return x.value
    return np.asarray(x, dtype=np.float64)


def _tape_of(*xs) -> Tape | None:
    for x in xs:
        if isinstance(x, Var) and x.tape is not None:
            return x.tape
    return None


def _accum(x, g: np.ndarray) -> None:
    if isinstance(x, Var) and x.tape is not None:
        x.grad = g if x.grad is None else x.grad + g


def _unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum a broadcast gradient back down to ``shape``."""
    if g.shape == shape:
        return g
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for i, (gd, sd) in enumerate(zip(g.shape, shape)):
        if sd == 1 and gd != 1:
            g = g.sum(axis=i, keepdims=True)
    return g


def constant(x) -> Var:
    return Var(_val(x), None)


def stop_gradient(x) -> Var:
    """Detach: same value, no gradient flow."""
    return Var(_val(x), None)


# ---------------------------------------------------------------------------
# elementwise operators
# ---------------------------------------------------------------------------

def add(a, b) -> Var:
    av, bv = _val(a), _val(b)
    tape = _tape_of(a, b)
    out = Var(av + bv, tape)
    if tape is not None:
        def back():
            g = out.grad
            if g is None:
                return
            _accum(a, _unbroadcast(g, av.shape))
            _accum(b, _unbroadcast(g, bv.shape))
        tape._ops.append(back)
    return out


def sub(a, b) -> Var:
    av, bv = _val(a), _val(b)
    tape = _tape_of(a, b)
    out = Var(av - bv, tape)
    if tape is not None:
        def back():
            g = out.grad
            if g is None:
                return
            _accum(a, _unbroadcast(g, av.shape))
            _accum(b, _unbroadcast(-g, bv.shape))
        tape._ops.append(back)
    return out


def mul(a, b) -> Var:
    av, bv = _val(a), _val(b)
    tape = _tape_of(a, b)
    out = Var(av * bv, tape)
    if tape is not None:
        def back():
            g = out.grad
            if g is None:
                return
            _accum(a, _unbroadcast(g * bv, av.shape))
            _accum(b, _unbroadcast(g * av, bv.shape))
        tape._ops.append(back)
    return out


def neg(a) -> Var:
    av = _val(a)
    tape = _tape_of(a)
    out = Var(-av, tape)
    if tape is not None:
        def back():
            if out.grad is not None:
                _accum(a, -out.grad)
        tape._ops.append(back)
    return out


def tanh(a) -> Var:
    av = _val(a)
    tape = _tape_of(a)
    t = np.tanh(av)
    out = Var(t, tape)
    if tape is not None:
        def back():
            if out.grad is not None:
                _accum(a, out.grad * (1.0 - t * t))
        tape._ops.append(back)
    return out


def relu(a) -> Var:
    av = _val(a)
    tape = _tape_of(a)
    out = Var(np.maximum(av, 0.0), tape)
    if tape is not None:
        mask = av > 0.0  # subgradient 0 at the kink
        def back():
            if out.grad is not None:
                _accum(a, out.grad * mask)
        tape._ops.append(back)
    return out


def exp(a) -> Var:
    av = _val(a)
    tape = _tape_of(a)
    e = np.exp(av)
    out = Var(e, tape)
    if tape is not None:
        def back():
            if out.grad is not None:
                _accum(a, out.grad * e)
        tape._ops.append(back)
    return out


def log(a) -> Var:
    av = _val(a)
    tape = _tape_of(a)
    out = Var(np.log(av), tape)
    if tape is not None:
        def back():
            if out.grad is not None:
                _accum(a, out.grad / av)
        tape._ops.append(back)
    return out


def square(a) -> Var:
    av = _val(a)
    tape = _tape_of(a)
    out = Var(av * av, tape)
    if tape is not None:
        def back():
            if out.grad is not None:
                _accum(a, out.grad * (2.0 * av))
        tape._ops.append(back)
    return out


def clip(a, lo: float, hi: float) -> Var:
    """Hard clip; gradient passes only strictly inside the interval bounds."""
    av = _val(a)
    tape = _tape_of(a)
    out = Var(np.clip(av, lo, hi), tape)
    if tape is not None:
        mask = (av >= lo) & (av <= hi)
        def back():
            if out.grad is not None:
                _accum(a, out.grad * mask)
        tape._ops.append(back)
    return out


def minimum(a, b) -> Var:
    av, bv = _val(a), _val(b)
    tape = _tape_of(a, b)
    take_a = av <= bv
    out = Var(np.where(take_a, av, bv), tape)
    if tape is not None:
        def back():
            g = out.grad
            if g is None:
                return
            _accum(a, _unbroadcast(g * take_a, av.shape))
            _accum(b, _unbroadcast(g * ~take_a, bv.shape))
        tape._ops.append(back)
    return out


# ---------------------------------------------------------------------------
# reductions / shape ops
# ---------------------------------------------------------------------------

def reduce_sum(a, axis: int | None = None) -> Var:
    av = _val(a)
    tape = _tape_of(a)
    out = Var(av.sum(axis=axis), tape)
    if tape is not None:
        def back():
            g = out.grad
            if g is None:
                return
            if axis is None:
                _accum(a, np.broadcast_to(g, av.shape).copy())
            else:
                _accum(a, np.broadcast_to(np.expand_dims(g, axis), av.shape).copy())
        tape._ops.append(back)
    return out


def reduce_mean(a, axis: int | None = None) -> Var:
    av = _val(a)
    tape = _tape_of(a)
    out = Var(av.mean(axis=axis), tape)
    if tape is not None:
        count = av.size if axis is None else av.shape[axis]
        def back():
            g = out.grad
            if g is None:
                return
            scaled = g / count
            if axis is None:
                _accum(a, np.broadcast_to(scaled, av.shape).copy())
            else:
                _accum(a, np.broadcast_to(np.expand_dims(scaled, axis), av.shape).copy())
        tape._ops.append(back)
    return out


def reshape(a, shape) -> Var:
    av = _val(a)
    tape = _tape_of(a)
    out = Var(av.reshape(shape), tape)
    if tape is not None:
        def back():
            if out.grad is not None:
                _accum(a, out.grad.reshape(av.shape))
        tape._ops.append(back)
    return out


def concat(parts: Sequence, axis: int = -1) -> Var:
    vals = [_val(p) for p in parts]
    tape = _tape_of(*parts)
    out = Var(np.concatenate(vals, axis=axis), tape)
    if tape is not None:
        sizes = [v.shape[axis] for v in vals]
        splits = np.cumsum(sizes)[:-1]
        def back():
            g = out.grad
            if g is None:
                return
            for p, gp in zip(parts, np.split(g, splits, axis=axis)):
                _accum(p, gp)
        tape._ops.append(back)
    return out


def slice_last(a, start: int, stop: int) -> Var:
    """Slice along the last axis."""
    av = _val(a)
    tape = _tape_of(a)
    out = Var(av[..., start:stop], tape)
    if tape is not None:
        def back():
            g = out.grad
            if g is None:
                return
            full = np.zeros_like(av)
            full[..., start:stop] = g
            _accum(a, full)
        tape._ops.append(back)
    return out


def take_rows(a, idx: np.ndarray) -> Var:
    """Gather rows of a 2-D (or 1-D) array."""
    av = _val(a)
    tape = _tape_of(a)
    out = Var(av[idx], tape)
    if tape is not None:
        def back():
            g = out.grad
            if g is None:
                return
            full = np.zeros_like(av)
            np.add.at(full, idx, g)
            _accum(a, full)
        tape._ops.append(back)
    return out


def select_member(a, member_idx: np.ndarray) -> Var:
    """From a (K, B, d) stack pick member ``member_idx[i]`` for row i -> (B, d)."""
    av = _val(a)
    tape = _tape_of(a)
    rows = np.arange(av.shape[1])
    out = Var(av[member_idx, rows], tape)
    if tape is not None:
        def back():
            g = out.grad
            if g is None:
                return
            full = np.zeros_like(av)
            np.add.at(full, (member_idx, rows), g)
            _accum(a, full)
        tape._ops.append(back)
    return out


# ---------------------------------------------------------------------------
# affine operators
# ---------------------------------------------------------------------------

def affine(x, w, b) -> Var:
    """x (B, i) @ w (o, i)^T + b (o,) -> (B, o)."""
    xv, wv, bv = _val(x), _val(w), _val(b)
    tape = _tape_of(x, w, b)
    out = Var(xv @ wv.T + bv, tape)
    if tape is not None:
        def back():
            g = out.grad
            if g is None:
                return
            _accum(x, g @ wv)
            _accum(w, g.T @ xv)
            _accum(b, g.sum(axis=0))
        tape._ops.append(back)
    return out


def ens_affine(x, w, b) -> Var:
    """Batched ensemble affine: x (K, B, i), w (K, o, i), b (K, o) -> (K, B, o)."""
    xv, wv, bv = _val(x), _val(w), _val(b)
    tape = _tape_of(x, w, b)
    out = Var(xv @ wv.transpose(0, 2, 1) + bv[:, None, :], tape)
    if tape is not None:
        def back():
            g = out.grad
            if g is None:
                return
            _accum(x, g @ wv)
            _accum(w, g.transpose(0, 2, 1) @ xv)
            _accum(b, g.sum(axis=1))
        tape._ops.append(back)
    return out
