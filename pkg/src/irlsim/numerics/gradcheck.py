"""Central finite-difference verification of analytic gradients."""

from __future__ import annotations

import numpy as np


def finite_diff_check(loss_and_grad, params: list, eps: float = 1e-5, *,
                      max_coords: int | None = None,
                      rng: np.random.Generator | None = None) -> float:
    """Worst relative error between analytic and central-difference gradients.

    ``loss_and_grad(params) -> (float, list-of-arrays)`` must be deterministic
    (freeze any sampling noise before calling). Parameters are perturbed in
    place and restored. ``max_coords`` caps the checked coordinates per array
    (uniform subsample) for large nets.
    """
    _, grads = loss_and_grad(params)
    worst = 0.0
    for p, g in zip(params, grads):
        flat_p = p.reshape(-1)
        flat_g = np.asarray(g).reshape(-1)
        idxs = np.arange(flat_p.size)
        if max_coords is not None and flat_p.size > max_coords:
            if rng is None:
                rng = np.random.default_rng(0)
            idxs = rng.choice(flat_p.size, size=max_coords, replace=False)
        for j in idxs:
            orig = flat_p[j]
            flat_p[j] = orig + eps
            lo_plus, _ = loss_and_grad(params)
            flat_p[j] = orig - eps
            lo_minus, _ = loss_and_grad(params)
            flat_p[j] = orig
            fd = (lo_plus - lo_minus) / (2.0 * eps)
            an = flat_g[j]
            scale = max(abs(fd), abs(an), 1e-6)
            err = abs(fd - an) / scale
            if err > worst:
                worst = err
    return worst
