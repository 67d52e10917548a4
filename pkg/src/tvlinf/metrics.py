"""Image quality metrics: SSIM, PSNR and the cell-weighted L2 distance."""

from __future__ import annotations

import warnings

import numpy as np
from scipy import ndimage

from .diffops import gaussian_kernel
from .fields import ScalarField, check_same_grid

K1, K2 = 0.01, 0.03
SSIM_SIGMA, SSIM_WINDOW = 1.5, 11


def _unit_range(v: np.ndarray, name: str) -> np.ndarray:
    if v.min() < 0.0 or v.max() > 1.0:
        warnings.warn(f"{name} has values outside [0, 1]; clipping for SSIM", stacklevel=3)
        return np.clip(v, 0.0, 1.0)
    return v


def ssim_map(a: np.ndarray, b: np.ndarray, data_range: float = 1.0) -> np.ndarray:
    """Local SSIM with an 11-tap Gaussian window (sigma 1.5), border-cropped."""
    if any(n < SSIM_WINDOW for n in a.shape):
        raise ValueError(f"SSIM needs at least {SSIM_WINDOW} samples per axis, got {a.shape}")
    k = gaussian_kernel(SSIM_SIGMA, SSIM_WINDOW)

    def blur(x):
        for axis in range(x.ndim):
            x = ndimage.correlate1d(x, k, axis=axis, mode="reflect")
        return x

    c1 = (K1 * data_range) ** 2
    c2 = (K2 * data_range) ** 2
    mu_a, mu_b = blur(a), blur(b)
    var_a = blur(a * a) - mu_a ** 2
    var_b = blur(b * b) - mu_b ** 2
    cov = blur(a * b) - mu_a * mu_b
    s = ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) / ((mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2))
    pad = (SSIM_WINDOW - 1) // 2
    return s[tuple(slice(pad, n - pad) for n in s.shape)]


def ssim(a: ScalarField, b: ScalarField) -> float:
    check_same_grid(a, b)
    return float(ssim_map(_unit_range(a.values, "first image"),
                          _unit_range(b.values, "second image")).mean())


def psnr(a: ScalarField, b: ScalarField, data_range: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; ``inf`` for identical inputs."""
    check_same_grid(a, b)
    mse = float(np.mean((a.values - b.values) ** 2))
    if mse == 0.0:
        return float("inf")
    return float(10.0 * np.log10(data_range ** 2 / mse))


def l2_distance(a: ScalarField, b: ScalarField) -> float:
    grid = check_same_grid(a, b)
    return float(np.sqrt(grid.cell_volume * np.sum((a.values - b.values) ** 2)))
