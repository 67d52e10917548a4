"""Split-Bregman solvers for L2-TVL-infinity and L2-TV denoising, and the
contrast-restoring Bregman outer loop.

The splitting enforces ``d = grad u - w`` with penalty ``mu``; energies are
divided by the cell volume internally so the shrink threshold is ``alpha/mu``
and the L-infinity prox step is ``beta / (mu * vol)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import fft

from .diffops import div, grad
from .fields import (GridSpec, RegParams, ScalarField, SolveReport, VectorField,
                     check_same_grid, pointwise_norm)
from .prox import prox_linf_array, shrink

log = logging.getLogger(__name__)

# relative tolerance for the splitting constraint in the stopping rule
CONSTRAINT_RTOL = 1e-4


@dataclass
class SplitState:
    u: np.ndarray
    w: np.ndarray
    d: np.ndarray
    b: np.ndarray


def _laplacian_symbol(grid: GridSpec) -> np.ndarray:
    """Eigenvalues of grad^T grad in the DCT-II basis (Neumann forward differences)."""
    sym = np.zeros(grid.shape)
    for axis, (n, h) in enumerate(zip(grid.shape, grid.spacing)):
        lam = (2.0 * np.sin(np.pi * np.arange(n) / (2 * n)) / h) ** 2
        shape = [1] * grid.dims
        shape[axis] = n
        sym = sym + lam.reshape(shape)
    return sym


class _ScreenedPoisson:
    """Exact solver for ``(I + mu grad^T grad) u = rhs`` via the DCT."""

    def __init__(self, grid: GridSpec, mu: float):
        self.denom = 1.0 + mu * _laplacian_symbol(grid)

    def __call__(self, rhs: np.ndarray) -> np.ndarray:
        return fft.idctn(fft.dctn(rhs, type=2, norm="ortho") / self.denom, type=2, norm="ortho")


def _energy(u, w, f, gu, alpha, beta, vol):
    e = 0.5 * vol * np.sum((f - u) ** 2) + alpha * vol * np.sum(pointwise_norm(gu - w))
    if beta is not None:
        e += float(np.max(beta * pointwise_norm(w)))
    return float(e)


def _split_bregman(f: np.ndarray, grid: GridSpec, alpha: float, beta, mu: float,
                   max_iters: int, tol: float, u0: np.ndarray | None = None):
    """Core loop. ``beta=None`` pins w to zero (ROF); otherwise scalar or array."""
    vol = grid.cell_volume
    h = grid.spacing
    solve = _ScreenedPoisson(grid, mu)
    zeros = np.zeros((grid.dims,) + grid.shape)
    st = SplitState(u=np.array(f if u0 is None else u0, dtype=float), w=zeros.copy(),
                    d=zeros.copy(), b=zeros.copy())
    if beta is None:
        tau, weights = None, None
    elif np.isscalar(beta):
        tau, weights = float(beta) / (mu * vol), None
    else:
        tau, weights = 1.0 / (mu * vol), np.asarray(beta, float)

    # absolute floor for the constraint test so flat solutions can stop
    res_floor = tol * max(float(np.linalg.norm(grad(f, h))), np.finfo(float).tiny)
    report = SolveReport()
    for _ in range(max_iters):
        u_old = st.u
        st.u = solve(f - mu * div(st.d + st.w - st.b, h))
        gu = grad(st.u, h)
        st.d = shrink(gu - st.w + st.b, alpha / mu)
        if tau is not None:
            st.w = prox_linf_array(gu - st.d + st.b, tau, weights)
        r = gu - st.d - st.w
        st.b = st.b + r

        change = np.linalg.norm(st.u - u_old) / max(np.linalg.norm(st.u), np.finfo(float).tiny)
        res = float(np.linalg.norm(r))
        report.record(_energy(st.u, st.w, f, gu, alpha, beta, vol), res)
        if change < tol and res <= CONSTRAINT_RTOL * np.linalg.norm(gu) + res_floor:
            report.converged = True
            break
    if not report.converged:
        log.info("split Bregman stopped after %d iterations without meeting tol=%g",
                 report.iterations, tol)
    return st, report


def solve_tvlinf(f: ScalarField, p: RegParams, u0: ScalarField | None = None):
    """Minimise ``1/2||f-u||^2 + alpha||grad u - w||_M + ||beta w||_inf``.

    Returns ``(u, w, report)``. Non-convergence is reported, not raised.
    """
    beta = p.beta
    if isinstance(beta, ScalarField):
        check_same_grid(f, beta)
        beta = beta.values
    elif np.isinf(beta):
        raise ValueError("solve_tvlinf needs a finite beta; use solve_tv for the ROF model")
    init = None
    if u0 is not None:
        check_same_grid(f, u0)
        init = u0.values
    st, report = _split_bregman(f.values, f.grid, p.alpha, beta, p.penalty(f.grid), p.max_iters,
                                p.tol, init)
    return ScalarField(f.grid, st.u), VectorField(f.grid, st.w), report


def solve_tv(f: ScalarField, alpha: float, p: RegParams | None = None,
             u0: ScalarField | None = None):
    """ROF denoising: the same splitting with w pinned to zero. Returns ``(u, report)``."""
    if p is None:
        p = RegParams(alpha=alpha)
    mu = p.mu if p.mu is not None else alpha * min(f.grid.spacing)
    init = None if u0 is None else u0.values
    st, report = _split_bregman(f.values, f.grid, alpha, None, mu, p.max_iters, p.tol, init)
    return ScalarField(f.grid, st.u), report


def _inner_solver(model: str) -> Callable:
    if model == "tvlinf":
        return lambda data, p: solve_tvlinf(data, p)[::2]
    if model == "tv":
        return lambda data, p: solve_tv(data, p.alpha, p)
    if model == "tgv":
        from .tgv import solve_tgv
        return lambda data, p: solve_tgv(data, p.alpha, p.beta, p)[::2]
    raise ValueError(f"unknown inner model {model!r}")


def bregman_iterate(f: ScalarField, p: RegParams, outer_iters: int, solver="tvlinf"):
    """Bregman iteration: solve with data ``f + v^k``, then ``v += f - u``.

    ``solver`` is ``"tvlinf"``, ``"tv"``, ``"tgv"`` or a callable
    ``(data, params) -> (u, report)``. Returns the list of ``(u^k, report)``.
    """
    if outer_iters < 1:
        raise ValueError("outer_iters must be >= 1")
    inner = solver if callable(solver) else _inner_solver(solver)
    v = np.zeros(f.grid.shape)
    trajectory = []
    for k in range(outer_iters):
        u, report = inner(f.with_values(f.values + v), p)
        v = v + f.values - u.values
        trajectory.append((u, report))
        log.debug("Bregman step %d: ||f-u|| = %.3e", k + 1, np.linalg.norm(f.values - u.values))
    return trajectory
