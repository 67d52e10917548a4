"""Proximal maps and projections used by the splitting solvers."""

from __future__ import annotations

import numpy as np

from .fields import ScalarField, VectorField, check_same_grid, pointwise_norm


def shrink(v: np.ndarray, tau: float) -> np.ndarray:
    """Pointwise (isotropic) soft shrinkage of a stacked vector array."""
    mag = pointwise_norm(v)
    scale = np.zeros_like(mag)
    nz = mag > tau
    scale[nz] = (mag[nz] - tau) / mag[nz]
    return v * scale


def shrink_vector(v: VectorField, tau: float) -> VectorField:
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    return VectorField(v.grid, shrink(v.values, tau))


def project_l1_ball(v, radius: float, weights=None) -> np.ndarray:
    """Euclidean projection onto ``{z : sum(weights * |z|) <= radius}``.

    Sort-based threshold search. With ``weights`` omitted this is the plain
    l1 ball; weighted balls arise from spatially varying beta.
    """
    v = np.asarray(v, dtype=float)
    if radius < 0:
        raise ValueError(f"radius must be nonnegative, got {radius}")
    shape = v.shape
    v = v.ravel()
    a = np.abs(v)
    wt = np.ones_like(a) if weights is None else np.broadcast_to(np.asarray(weights, float), shape).ravel()
    if np.dot(wt, a) <= radius:
        return v.reshape(shape).copy()
    if radius == 0:
        return np.zeros(shape)
    # z_i = sign(v_i) * max(|v_i| - theta * wt_i, 0); breakpoints at |v_i| / wt_i
    bp = a / wt
    order = np.argsort(-bp, kind="stable")
    num = np.cumsum((wt * a)[order]) - radius
    den = np.cumsum((wt * wt)[order])
    theta_k = num / den
    # active set is the largest prefix whose own breakpoint exceeds theta;
    # the first entry is always active, rounding can hide that for tiny radii
    active = np.nonzero(bp[order] > theta_k)[0]
    k = active[-1] if active.size else 0
    theta = max(theta_k[k], 0.0)
    z = np.sign(v) * np.maximum(a - theta * wt, 0.0)
    # a - theta*wt cancels when theta is close to |v|; pull rounding overshoot back inside
    mass = np.dot(wt, np.abs(z))
    if mass > radius:
        z *= radius / mass
    return z.reshape(shape)


def prox_linf_array(v: np.ndarray, tau: float, weights=None) -> np.ndarray:
    """Prox of ``tau * max_x weights(x) |w(x)|`` for a stacked vector array.

    Moreau decomposition on pointwise magnitudes: the conjugate is the
    indicator of ``{z : sum |z| / weights <= tau}``, so the prox keeps the
    direction of each v(x) and clips its magnitude.
    """
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    mag = pointwise_norm(v)
    inv = None if weights is None else 1.0 / np.asarray(weights, float)
    clipped = mag - project_l1_ball(mag, tau, inv)
    scale = np.zeros_like(mag)
    nz = mag > 0
    scale[nz] = clipped[nz] / mag[nz]
    return v * scale


def prox_linf(v: VectorField, tau: float, beta_map: ScalarField | None = None) -> VectorField:
    weights = None
    if beta_map is not None:
        check_same_grid(v, beta_map)
        weights = beta_map.values
    return VectorField(v.grid, prox_linf_array(v.values, tau, weights))
