"""Synthetic test data: 1D steps and the two 2D phantoms, plus Gaussian noise.

2D phantoms use unit pixel spacing with values in [0, 1]. ``circle_2d`` is a
cone of constant slope inside a disc (apex = central spike, jump at the rim);
``pyramid_square_2d`` is a square pyramid whose inner square is twice as
steep as the outer ring.
"""

from __future__ import annotations

import numpy as np

from .fields import GridSpec, ScalarField
from .oracle1d import StepData, sample_data


def step_1d(n: int = 1000, L: float = 1.0, h: float = 1.0) -> ScalarField:
    return sample_data(StepData(L, h, 0.0), n)


def affine_step_1d(n: int = 1000, L: float = 1.0, h: float = 1.0, lam: float = 1.0) -> ScalarField:
    return sample_data(StepData(L, h, lam), n)


def _centred(n: int):
    grid = GridSpec.regular((n, n), 1.0)
    c = np.arange(n) + 0.5 - n / 2
    return grid, c[:, None], c[None, :]


def circle_2d(n: int = 128, radius: float = 0.35, outside: float = 0.15,
              rim: float = 0.3, apex: float = 0.9) -> ScalarField:
    grid, y, x = _centred(n)
    r = np.hypot(x, y)
    R = radius * n
    u = np.where(r < R, rim + (apex - rim) * (1.0 - r / R), outside)
    return ScalarField(grid, u)


def pyramid_square_2d(n: int = 128, inner: float = 0.25, base: float = 0.05,
                      top: float = 0.95) -> ScalarField:
    grid, y, x = _centred(n)
    d = np.maximum(np.abs(x), np.abs(y))
    D, a = n / 2, inner * n
    s = (top - base) / (D + a)
    u = np.where(d >= a, base + s * (D - d), base + s * (D - a) + 2 * s * (a - d))
    return ScalarField(grid, u)


def pyramid_masks(n: int = 128, inner: float = 0.25, margin: int = 3):
    """Boolean masks of the inner square and outer ring, shrunk away from the interface."""
    _, y, x = _centred(n)
    d = np.maximum(np.abs(x), np.abs(y))
    a = inner * n
    return d < a - margin, (d > a + margin) & (d < n / 2 - margin)


def add_gaussian_noise(f: ScalarField, variance: float, seed: int | None = 0) -> ScalarField:
    """i.i.d. zero-mean Gaussian noise of the given variance, deterministic per seed."""
    if variance < 0:
        raise ValueError(f"variance must be nonnegative, got {variance}")
    if variance == 0:
        return f.with_values(f.values)
    rng = np.random.default_rng(seed)
    return f.with_values(f.values + rng.normal(0.0, np.sqrt(variance), f.grid.shape))


GENERATORS = {
    "step": step_1d,
    "affine-step": affine_step_1d,
    "circle": circle_2d,
    "pyramid-square": pyramid_square_2d,
}
