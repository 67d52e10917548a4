"""Finite-difference operators on cell-centred grids, and Gaussian pre-filtering.

``grad`` uses forward differences with a Neumann boundary (the last slice
along each axis is zero); ``div`` is its exact negative adjoint. Both have
array-level kernels (used inside the solvers) and field-level wrappers.
"""

from __future__ import annotations

import warnings
from typing import Sequence

import numpy as np
from scipy import ndimage

from .fields import ScalarField, VectorField


def _fwd(v: np.ndarray, axis: int, h: float, m: int) -> np.ndarray:
    """Forward difference along ``axis`` kept for indices < m, zero elsewhere."""
    out = np.zeros_like(v)
    src = np.moveaxis(v, axis, 0)
    dst = np.moveaxis(out, axis, 0)
    dst[:m] = (src[1:m + 1] - src[:m]) / h
    return out


def _fwd_adj(q: np.ndarray, axis: int, h: float, m: int) -> np.ndarray:
    """Adjoint of ``_fwd`` for the unweighted inner product."""
    out = np.zeros_like(q)
    src = np.moveaxis(q, axis, 0)[:m]
    dst = np.moveaxis(out, axis, 0)
    dst[:m] -= src / h
    dst[1:m + 1] += src / h
    return out


def grad(u: np.ndarray, spacing: Sequence[float]) -> np.ndarray:
    return np.stack([_fwd(u, a, spacing[a], u.shape[a] - 1) for a in range(u.ndim)])


def div(p: np.ndarray, spacing: Sequence[float]) -> np.ndarray:
    out = np.zeros(p.shape[1:])
    for a in range(p.shape[0]):
        out -= _fwd_adj(p[a], a, spacing[a], p.shape[1 + a] - 1)
    return out


def gradient(u: ScalarField) -> VectorField:
    return VectorField(u.grid, grad(u.values, u.grid.spacing))


def divergence(p: VectorField) -> ScalarField:
    return ScalarField(p.grid, div(p.values, p.grid.spacing))


# Symmetrised gradient for the TGV model. A vector field w produced against
# ``grad`` has a dead last slice along its own axis (the Neumann row), so the
# self-derivative of component k only runs over indices < n_k - 2; cross
# derivatives use the plain Neumann forward difference. In 2D the output holds
# (xx, yy, xy); the xy entry counts twice in norms and inner products.

def sym_grad(w: np.ndarray, spacing: Sequence[float]) -> np.ndarray:
    shape = w.shape[1:]
    if len(shape) == 1:
        return _fwd(w[0], 0, spacing[0], max(shape[0] - 2, 0))[None]
    xx = _fwd(w[0], 0, spacing[0], max(shape[0] - 2, 0))
    yy = _fwd(w[1], 1, spacing[1], max(shape[1] - 2, 0))
    xy = 0.5 * (_fwd(w[0], 1, spacing[1], shape[1] - 1) + _fwd(w[1], 0, spacing[0], shape[0] - 1))
    return np.stack([xx, yy, xy])


def sym_grad_adj(q: np.ndarray, spacing: Sequence[float]) -> np.ndarray:
    """Adjoint of ``sym_grad`` under the xy-doubled inner product."""
    shape = q.shape[1:]
    if len(shape) == 1:
        return _fwd_adj(q[0], 0, spacing[0], max(shape[0] - 2, 0))[None]
    wx = _fwd_adj(q[0], 0, spacing[0], max(shape[0] - 2, 0)) + _fwd_adj(q[2], 1, spacing[1], shape[1] - 1)
    wy = _fwd_adj(q[1], 1, spacing[1], max(shape[1] - 2, 0)) + _fwd_adj(q[2], 0, spacing[0], shape[0] - 1)
    return np.stack([wx, wy])


def sym_norm(e: np.ndarray) -> np.ndarray:
    """Pointwise Frobenius norm of a symmetrised gradient."""
    if e.shape[0] == 1:
        return np.abs(e[0])
    return np.sqrt(e[0] ** 2 + e[1] ** 2 + 2.0 * e[2] ** 2)


def gaussian_kernel(sigma: float, window: int) -> np.ndarray:
    """Sampled Gaussian on ``window`` points, renormalised to sum 1."""
    r = window // 2
    x = np.arange(-r, r + 1, dtype=float)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def gaussian_filter(f: ScalarField, sigma: float, window: int = 13) -> ScalarField:
    """Separable Gaussian smoothing; sigma and window are in samples.

    The boundary is extended by half-sample mirroring, the reflection that
    matches the Neumann gradient and keeps the mean exactly.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    window = int(window)
    if window < 3 or window % 2 == 0:
        raise ValueError(f"window must be an odd integer >= 3, got {window}")
    out = np.array(f.values, dtype=float)
    for axis, n in enumerate(f.grid.shape):
        win = window
        if win > n:
            win = n if n % 2 else n - 1
            warnings.warn(f"window {window} exceeds axis {axis} length {n}; clamped to {win}",
                          stacklevel=2)
        if win < 3:
            continue
        out = ndimage.convolve1d(out, gaussian_kernel(sigma, win), axis=axis, mode="reflect")
    return f.with_values(out)
