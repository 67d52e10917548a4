"""Exact solutions and dual certificates for 1D L2-TVL-infinity denoising.

Data live on (-L, L): the step ``f = h * 1_{(0,L)}`` and the tilted step
``g = f + lam * x``. A pair (u, w) is optimal iff a dual function phi with
zero boundary values satisfies

* ``phi' = u - f``,
* ``|phi| <= alpha`` with ``phi = alpha * sign`` on the support of ``Du - w``
  (checked pointwise on the thresholded jump set and through the slackness
  gap ``alpha ||Du - w|| - <phi, Du - w>`` everywhere),
* ``||phi||_1 <= beta``, and ``<phi, w> = beta ||w||_inf`` when w is nonzero.

On the grid phi is the cell-weighted running sum of ``u - f`` taken on the
edges, which makes the first condition exact for the forward-difference
gradient.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .diffops import grad
from .fields import GridSpec, ScalarField, VectorField, check_same_grid


class UnsupportedDimensionError(ValueError):
    pass


class RegionError(ValueError):
    """Closed form requested outside the parameter region it is valid for."""


class Region(enum.Enum):
    YellowAffineJump = "yellow-affine-jump"
    TVRegime = "tv-regime"
    OtherThesisRegion = "other"


@dataclass(frozen=True)
class StepData:
    L: float
    h_jump: float
    lam: float = 0.0

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError(f"L must be positive, got {self.L}")
        if not self.h_jump > 0:
            raise ValueError(f"step height must be positive, got {self.h_jump}")
        if self.lam < 0:
            raise ValueError(f"slope must be nonnegative, got {self.lam}")

    @property
    def measure(self) -> float:
        return 2.0 * self.L

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.h_jump * (x > 0) + self.lam * x


def yellow_inequalities(data: StepData, alpha: float, beta: float) -> tuple[bool, bool, bool, bool]:
    L, h, lam = data.L, data.h_jump, data.lam
    return (beta < alpha * L + lam * L ** 3 / 6,
            beta > 4 * alpha * L / 3 - h * L ** 2 / 6,
            beta > 2 * alpha * L / 3,
            beta < 4 * alpha * L / 3)


def classify_region(data: StepData, alpha: float, beta: float) -> Region:
    if not (alpha > 0 and beta > 0):
        raise ValueError("alpha and beta must be positive")
    if beta >= alpha * data.measure:
        return Region.TVRegime
    if data.lam > 0 and all(yellow_inequalities(data, alpha, beta)):
        return Region.YellowAffineJump
    return Region.OtherThesisRegion


@dataclass(frozen=True)
class AffineJumpSolution:
    """``u = c1 x + c2`` on (-L,0), ``c1 x + h - c2`` on (0,L); ``w = c1``."""

    data: StepData
    c1: float
    c2: float
    c3: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.c1 * x + np.where(x > 0, self.data.h_jump - self.c2, self.c2)

    def phi(self, x):
        x = np.asarray(x, dtype=float)
        return (self.c1 - self.data.lam) * x ** 2 / 2 - self.c2 * np.abs(x) + self.c3

    @property
    def jump(self) -> float:
        return self.data.h_jump - 2 * self.c2


def exact_solution_yellow(data: StepData, alpha: float, beta: float):
    """Closed form in the affine-with-jump region. Returns ``(u, w_mag)``."""
    region = classify_region(data, alpha, beta)
    if region is not Region.YellowAffineJump:
        raise RegionError(f"parameters lie in {region.name}, not the affine-jump region")
    L = data.L
    c1 = 6 * (alpha * L - beta) / L ** 3 + data.lam
    c2 = (4 * alpha * L - 3 * beta) / L ** 2
    sol = AffineJumpSolution(data, c1, c2, alpha)
    return sol, c1


@dataclass(frozen=True)
class StepTVSolution:
    """ROF solution for the pure step: each side moves ``min(alpha/L, h/2)`` inwards."""

    data: StepData
    shift: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, self.data.h_jump - self.shift, self.shift)


def exact_solution_tv_step(data: StepData, alpha: float) -> StepTVSolution:
    """Exact TVL-inf (= alpha TV) solution for the pure step in the TV regime."""
    if data.lam != 0:
        raise RegionError("closed-form TV solution is only provided for the pure step")
    return StepTVSolution(data, min(alpha / data.L, data.h_jump / 2))


def data_grid(data: StepData, n: int) -> GridSpec:
    return GridSpec.regular(n, data.measure / n, -data.L)


def sample_data(data: StepData, n: int) -> ScalarField:
    """Cell-centred samples on (-L, L); the jump falls between the two centre cells."""
    if n < 2 or n % 2:
        raise ValueError(f"n must be an even integer >= 2, got {n}")
    grid = data_grid(data, n)
    return ScalarField(grid, data(grid.coords()))


def sample_solution(sol, grid: GridSpec, w_mag: float = 0.0):
    """Sample a closed-form solution as ``(u, w)``; w's Neumann slot stays zero."""
    u = ScalarField(grid, sol(grid.coords()))
    w = np.full((1,) + grid.shape, float(w_mag))
    w[0, -1] = 0.0
    return u, VectorField(grid, w)


@dataclass(frozen=True, eq=False)
class Certificate1D:
    phi: ScalarField
    r_boundary: float
    r_linf: float
    r_l1: float
    r_pairing: float
    r_sign: float

    @property
    def residuals(self) -> dict[str, float]:
        return {"boundary": self.r_boundary, "linf": self.r_linf, "l1": self.r_l1,
                "pairing": self.r_pairing, "sign": self.r_sign}

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    def passed(self, tol: float = 5e-3) -> bool:
        return self.max_residual < tol


def jump_set(u: ScalarField, w: VectorField, jump_tol: float) -> np.ndarray:
    """Edges carrying mass of ``Du - w``: above ``jump_tol`` and 10x the median mass."""
    h = u.grid.spacing[0]
    mass = h * np.abs(grad(u.values, u.grid.spacing)[0] - w.values[0])
    thr = max(10.0 * float(np.median(mass)), jump_tol)
    return mass > thr


def build_certificate(u: ScalarField, w: VectorField, f: ScalarField, alpha: float, beta: float,
                      jump_tol: float | None = None) -> Certificate1D:
    grid = check_same_grid(u, w, f)
    if grid.dims != 1:
        raise UnsupportedDimensionError("certificates are only defined for 1D problems")
    h = grid.spacing[0]
    phi = h * np.cumsum(u.values - f.values)
    if jump_tol is None:
        jump_tol = 1e-3 * max(float(np.ptp(f.values)), 1.0)

    r_boundary = abs(phi[-1])
    r_linf = max(float(np.max(np.abs(phi))) - alpha, 0.0)
    r_l1 = max(h * float(np.sum(np.abs(phi))) - beta, 0.0)
    wv = w.values[0]
    wmax = float(np.max(np.abs(wv)))
    r_pairing = abs(h * float(np.dot(phi, wv)) - beta * wmax) if wmax > 0 else 0.0
    g = grad(u.values, grid.spacing)[0] - wv
    J = jump_set(u, w, jump_tol)
    r_sign = float(np.max(np.abs(phi[J] - alpha * np.sign(g[J])))) if np.any(J) else 0.0
    # complementary slackness covers the diffuse part of Du - w as well:
    # alpha ||Du - w|| = <phi, Du - w> iff phi = alpha sign(Du - w) on its support
    gap = abs(alpha * h * float(np.sum(np.abs(g))) - h * float(np.dot(phi, g)))
    r_sign = max(r_sign, gap)
    return Certificate1D(ScalarField(grid, phi), float(r_boundary), r_linf, r_l1,
                         float(r_pairing), r_sign)
