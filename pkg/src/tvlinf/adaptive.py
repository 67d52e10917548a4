"""Spatially varying beta maps for the adapted TVL-infinity model.

Both rules set beta inversely proportional to a gradient magnitude,
``beta(x) = c / (|grad v(x)| + eps)``, so regions expected to be steep get a
small beta (large admissible |w|) and flat regions approach the TV limit.
"""

from __future__ import annotations

import numpy as np

from .diffops import gaussian_filter, grad
from .fields import ScalarField, pointwise_norm


def _inverse_gradient_rule(v: ScalarField, c: float, eps: float) -> ScalarField:
    if not c > 0:
        raise ValueError(f"c must be positive, got {c}")
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    mag = pointwise_norm(grad(v.values, v.grid.spacing))
    return ScalarField(v.grid, c / (mag + eps))


def beta_from_data(f: ScalarField, c: float, eps: float, sigma: float, window: int = 13) -> ScalarField:
    """Rule applied to the Gaussian pre-filtered data (sigma/window in samples)."""
    return _inverse_gradient_rule(gaussian_filter(f, sigma, window), c, eps)


def beta_from_reference(u_ref: ScalarField, c: float, eps: float) -> ScalarField:
    """Rule applied to a clean reference image, e.g. the ground truth."""
    return _inverse_gradient_rule(u_ref, c, eps)


def region_ratio(beta: ScalarField, outer: np.ndarray, inner: np.ndarray) -> float:
    """Median beta over ``outer`` divided by median over ``inner`` (boolean masks)."""
    return float(np.median(beta.values[outer]) / np.median(beta.values[inner]))
