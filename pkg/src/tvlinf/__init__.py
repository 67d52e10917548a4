"""L2-TVL-infinity denoising: solvers, exact 1D oracles and experiment tooling."""

from .adaptive import beta_from_data, beta_from_reference
from .diffops import divergence, gaussian_filter, gradient
from .fields import (GridMismatchError, GridSpec, RegParams, ScalarField, SolveReport, VectorField,
                     energy_tgv, energy_tv, energy_tvlinf, total_variation)
from .metrics import l2_distance, psnr, ssim
from .oracle1d import (Certificate1D, Region, StepData, build_certificate, classify_region,
                       exact_solution_tv_step, exact_solution_yellow, sample_data)
from .prox import project_l1_ball, prox_linf, shrink_vector
from .solvers import bregman_iterate, solve_tv, solve_tvlinf
from .tgv import solve_tgv

__version__ = "0.1.0"

__all__ = [
    "Certificate1D", "GridMismatchError", "GridSpec", "RegParams", "Region", "ScalarField", "SolveReport",
    "StepData", "VectorField", "beta_from_data", "beta_from_reference", "bregman_iterate",
    "build_certificate", "classify_region", "divergence", "energy_tgv", "energy_tv", "energy_tvlinf",
    "exact_solution_tv_step", "exact_solution_yellow", "gaussian_filter", "gradient", "l2_distance",
    "project_l1_ball", "prox_linf", "psnr", "sample_data", "shrink_vector", "solve_tgv", "solve_tv",
    "solve_tvlinf", "ssim", "total_variation",
]
