"""Grid-sampled fields, regularisation parameters and the discrete energies.

Discrete conventions used throughout the package:

* samples sit at cell centres ``origin + (i + 1/2) * h`` along each axis;
* measures are cell-volume weighted sums, so ``||u||^2 = vol * sum(u**2)``
  and the Radon norm of a vector field is ``vol * sum(|v(x)|)``;
* ``||w||_inf`` is the plain maximum of pointwise Euclidean magnitudes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np


class GridMismatchError(ValueError):
    """Two fields that must share a grid do not."""


@dataclass(frozen=True)
class GridSpec:
    sizes: tuple[int, ...]
    spacing: tuple[float, ...]
    origin: tuple[float, ...] = ()

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.sizes)
        spacing = tuple(float(h) for h in self.spacing)
        origin = tuple(float(o) for o in self.origin) or (0.0,) * len(sizes)
        if len(sizes) not in (1, 2):
            raise ValueError(f"only 1D and 2D grids are supported, got {len(sizes)} axes")
        if len(spacing) != len(sizes) or len(origin) != len(sizes):
            raise ValueError("sizes, spacing and origin must have one entry per axis")
        if any(n < 2 for n in sizes):
            raise ValueError(f"every axis needs at least 2 points, got {sizes}")
        if any(not (h > 0 and np.isfinite(h)) for h in spacing):
            raise ValueError(f"spacing must be positive, got {spacing}")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "origin", origin)

    @classmethod
    def regular(cls, sizes: Union[int, Sequence[int]], spacing: Union[float, Sequence[float]] = 1.0,
                origin: Union[float, Sequence[float], None] = None) -> "GridSpec":
        """Build a grid, broadcasting scalar spacing/origin to every axis."""
        sizes = (sizes,) if np.isscalar(sizes) else tuple(sizes)
        spacing = (spacing,) * len(sizes) if np.isscalar(spacing) else tuple(spacing)
        if origin is None:
            origin = (0.0,) * len(sizes)
        elif np.isscalar(origin):
            origin = (origin,) * len(sizes)
        return cls(sizes, spacing, tuple(origin))

    @property
    def dims(self) -> int:
        return len(self.sizes)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.sizes

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def measure(self) -> float:
        """Total measure |Omega| of the sampled domain."""
        return float(np.prod([n * h for n, h in zip(self.sizes, self.spacing)]))

    def coords(self, axis: int = 0) -> np.ndarray:
        """Cell-centre coordinates along one axis."""
        n, h, o = self.sizes[axis], self.spacing[axis], self.origin[axis]
        return o + (np.arange(n) + 0.5) * h


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=float, copy=True)
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class ScalarField:
    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = _frozen(self.values)
        if values.shape != self.grid.shape:
            raise GridMismatchError(f"values shape {values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("ScalarField values must be finite")
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: GridSpec) -> "ScalarField":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def constant(cls, grid: GridSpec, c: float) -> "ScalarField":
        return cls(grid, np.full(grid.shape, float(c)))

    def with_values(self, values: np.ndarray) -> "ScalarField":
        return ScalarField(self.grid, values)


@dataclass(frozen=True, eq=False)
class VectorField:
    """Gradient-valued field; ``values`` has shape ``(dims, *grid.shape)``."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = _frozen(self.values)
        expected = (self.grid.dims,) + self.grid.shape
        if values.shape != expected:
            raise GridMismatchError(f"values shape {values.shape} does not match {expected}")
        if not np.all(np.isfinite(values)):
            raise ValueError("VectorField values must be finite")
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: GridSpec) -> "VectorField":
        return cls(grid, np.zeros((grid.dims,) + grid.shape))

    def magnitude(self) -> np.ndarray:
        return pointwise_norm(self.values)


def pointwise_norm(v: np.ndarray) -> np.ndarray:
    """Euclidean magnitude over the leading (component) axis."""
    return np.sqrt(np.sum(v * v, axis=0))


@dataclass
class RegParams:
    """Weights and stopping controls for the splitting solvers.

    ``beta`` is either a positive scalar or a ScalarField of positive values
    (spatially adapted model). ``mu=None`` resolves per grid to
    ``alpha * min(spacing)``, which is ``alpha`` on unit-spaced pixel grids.
    """

    alpha: float
    beta: Union[float, ScalarField] = np.inf
    mu: float | None = None
    max_iters: int = 5000
    tol: float = 1e-6

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if isinstance(self.beta, ScalarField):
            if not np.all(self.beta.values > 0):
                raise ValueError("spatial beta must be positive everywhere")
        elif not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.mu is not None and not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if int(self.max_iters) < 1:
            raise ValueError("max_iters must be a positive integer")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        self.max_iters = int(self.max_iters)

    def penalty(self, grid: GridSpec) -> float:
        if self.mu is not None:
            return float(self.mu)
        return float(self.alpha) * min(grid.spacing)

    @property
    def spatial(self) -> bool:
        return isinstance(self.beta, ScalarField)


@dataclass
class SolveReport:
    iterations: int = 0
    energy_history: list[float] = field(default_factory=list)
    residual_history: list[float] = field(default_factory=list)
    converged: bool = False

    def record(self, energy: float, residual: float) -> None:
        self.iterations += 1
        self.energy_history.append(float(energy))
        self.residual_history.append(float(residual))


def check_same_grid(*fields_) -> GridSpec:
    grid = fields_[0].grid
    for other in fields_[1:]:
        if other.grid != grid:
            raise GridMismatchError(f"grid mismatch: {grid} vs {other.grid}")
    return grid


def _beta_array(beta, grid: GridSpec):
    if isinstance(beta, ScalarField):
        check_same_grid(beta, ScalarField.zeros(grid))
        return beta.values
    return float(beta)


def energy_tvlinf(u: ScalarField, w: VectorField, f: ScalarField, p: RegParams) -> float:
    """Discrete ``1/2 ||f-u||^2 + alpha ||grad u - w||_M + ||beta w||_inf``."""
    from .diffops import grad

    grid = check_same_grid(u, w, f)
    vol = grid.cell_volume
    fidelity = 0.5 * vol * np.sum((f.values - u.values) ** 2)
    radon = vol * np.sum(pointwise_norm(grad(u.values, grid.spacing) - w.values))
    beta = _beta_array(p.beta, grid)
    wmag = pointwise_norm(w.values)
    if np.isscalar(beta) and np.isinf(beta):
        linf = 0.0 if not np.any(wmag) else np.inf
    else:
        linf = float(np.max(beta * wmag))
    return float(fidelity + p.alpha * radon + linf)


def energy_tv(u: ScalarField, f: ScalarField, alpha: float) -> float:
    """Discrete ROF energy ``1/2 ||f-u||^2 + alpha TV(u)``."""
    from .diffops import grad

    grid = check_same_grid(u, f)
    vol = grid.cell_volume
    fidelity = 0.5 * vol * np.sum((f.values - u.values) ** 2)
    return float(fidelity + alpha * vol * np.sum(pointwise_norm(grad(u.values, grid.spacing))))


def total_variation(u: ScalarField) -> float:
    from .diffops import grad

    return float(u.grid.cell_volume * np.sum(pointwise_norm(grad(u.values, u.grid.spacing))))


def energy_tgv(u: ScalarField, w: VectorField, f: ScalarField, alpha: float, beta: float) -> float:
    """Discrete ``1/2 ||f-u||^2 + alpha ||grad u - w||_M + beta ||E w||_M``."""
    from .diffops import grad, sym_grad, sym_norm

    grid = check_same_grid(u, w, f)
    vol = grid.cell_volume
    fidelity = 0.5 * vol * np.sum((f.values - u.values) ** 2)
    first = vol * np.sum(pointwise_norm(grad(u.values, grid.spacing) - w.values))
    second = vol * np.sum(sym_norm(sym_grad(w.values, grid.spacing)))
    return float(fidelity + alpha * first + beta * second)
