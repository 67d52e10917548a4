"""Experiment configuration and the denoise / verify / compare drivers.

An experiment reads its data from a file or a named generator, optionally
adds Gaussian noise, runs one model (with optional Bregman outer loop) and
writes images, profiles, metrics and iteration histories to an output
directory.
"""

from __future__ import annotations

import dataclasses
import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import imageio, metrics, synthetic
from .adaptive import beta_from_data, beta_from_reference
from .fields import GridSpec, RegParams, ScalarField, VectorField
from .oracle1d import (Region, StepData, build_certificate, classify_region, exact_solution_tv_step,
                       exact_solution_yellow, sample_data)
from .solvers import bregman_iterate, solve_tv, solve_tvlinf
from .tgv import solve_tgv

log = logging.getLogger(__name__)

MODELS = ("tv", "tgv", "tvlinf", "tvlinf_sa")


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration (usage error)."""


@dataclass
class ExperimentConfig:
    model: str = "tvlinf"
    alpha: float | None = None
    beta: float | None = None
    mu: float | None = None
    tol: float = 1e-6
    max_iters: int = 5000
    bregman: int = 1
    c: float | None = None
    eps: float = 1e-4
    sigma: float = 2.0
    window: int = 13
    beta_source: str = "data"
    input: str | None = None
    generator: str | None = None
    n: int | None = None
    L: float = 1.0
    h_jump: float = 1.0
    lam: float = 1.0
    noise: float = 0.0
    seed: int = 0
    out: str = "out"
    strict: bool = False
    cert_tol: float = 5e-3

    @classmethod
    def from_mapping(cls, values: dict[str, Any], check_model: bool = True) -> "ExperimentConfig":
        """Build from strings or typed values; unknown keys are rejected.

        ``check_model=False`` validates only the data source (for ``generate``).
        """
        kwargs = {}
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        for key, raw in values.items():
            if raw is None:
                continue
            if key not in types:
                raise ConfigError(f"unknown config key {key!r}")
            kwargs[key] = _coerce(key, raw, types[key])
        cfg = cls(**kwargs)
        cfg.validate(check_model)
        return cfg

    def validate(self, check_model: bool = True) -> None:
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}, got {self.model!r}")
        if (self.input is None) == (self.generator is None):
            raise ConfigError("exactly one of input path or generator must be given")
        if self.generator is not None and self.generator not in synthetic.GENERATORS:
            raise ConfigError(f"unknown generator {self.generator!r}; "
                              f"choose from {sorted(synthetic.GENERATORS)}")
        if self.noise < 0:
            raise ConfigError("noise variance must be nonnegative")
        if not check_model:
            return
        if self.alpha is None or not self.alpha > 0:
            raise ConfigError("a positive alpha is required")
        if self.model in ("tgv", "tvlinf") and (self.beta is None or not self.beta > 0):
            raise ConfigError(f"model {self.model} needs a positive beta")
        if self.model == "tvlinf_sa":
            if self.c is None or not self.c > 0:
                raise ConfigError("tvlinf_sa needs the beta-rule constant c > 0")
            if self.beta_source not in ("data", "reference"):
                raise ConfigError("beta_source must be 'data' or 'reference'")
            if self.beta_source == "reference" and self.generator is None:
                raise ConfigError("beta_source=reference needs a synthetic ground truth")
        if self.bregman < 1:
            raise ConfigError("bregman (outer iterations) must be >= 1")


def _coerce(key: str, raw, typ: str):
    if not isinstance(raw, str):
        return raw
    typ = str(typ)
    try:
        if typ.startswith("bool"):
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if typ.startswith("int"):
            return int(raw)
        if typ.startswith("float"):
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    return raw


@dataclass
class Dataset:
    data: ScalarField
    clean: ScalarField | None = None
    step: StepData | None = None


def load_dataset(cfg: ExperimentConfig) -> Dataset:
    if cfg.generator is not None:
        step = None
        if cfg.generator in ("step", "affine-step"):
            n = cfg.n or 1000
            lam = 0.0 if cfg.generator == "step" else cfg.lam
            step = StepData(cfg.L, cfg.h_jump, lam)
            clean = sample_data(step, n)
        else:
            clean = synthetic.GENERATORS[cfg.generator](cfg.n or 128)
        data = synthetic.add_gaussian_noise(clean, cfg.noise, cfg.seed)
        return Dataset(data, clean, step)

    path = Path(cfg.input)
    if not path.is_file():
        raise FileNotFoundError(f"input not found: {path}")
    if path.suffix.lower() == ".csv":
        cols = imageio.read_profile_csv(path)
        if "x" not in cols or "f" not in cols:
            raise imageio.ImageFormatError(f"{path}: profile needs x and f columns")
        x = cols["x"]
        h = float(np.mean(np.diff(x)))
        grid = GridSpec.regular(len(x), h, float(x[0]) - h / 2)
        data = ScalarField(grid, cols["f"])
    else:
        data = imageio.read_image(path)
    data = synthetic.add_gaussian_noise(data, cfg.noise, cfg.seed)
    return Dataset(data)


def build_params(cfg: ExperimentConfig, ds: Dataset, beta=None) -> RegParams:
    beta = cfg.beta if beta is None else beta
    return RegParams(alpha=cfg.alpha, beta=np.inf if beta is None else beta, mu=cfg.mu,
                     max_iters=cfg.max_iters, tol=cfg.tol)


def beta_map(cfg: ExperimentConfig, ds: Dataset) -> ScalarField:
    if cfg.beta_source == "reference":
        return beta_from_reference(ds.clean, cfg.c, cfg.eps)
    return beta_from_data(ds.data, cfg.c, cfg.eps, cfg.sigma, cfg.window)


@dataclass
class RunResult:
    u: ScalarField
    w: VectorField | None
    reports: list = field(default_factory=list)
    beta: Any = None

    @property
    def converged(self) -> bool:
        return all(r.converged for r in self.reports)


def run_model(cfg: ExperimentConfig, ds: Dataset) -> RunResult:
    """Run the configured model, with Bregman outer iterations when ``bregman > 1``."""
    model = cfg.model
    beta = beta_map(cfg, ds) if model == "tvlinf_sa" else cfg.beta
    p = build_params(cfg, ds, beta)
    f = ds.data
    if cfg.bregman > 1:
        inner = "tvlinf" if model == "tvlinf_sa" else model
        traj = bregman_iterate(f, p, cfg.bregman, inner)
        return RunResult(traj[-1][0], None, [r for _, r in traj], beta)
    if model == "tv":
        u, rep = solve_tv(f, cfg.alpha, p)
        return RunResult(u, None, [rep], beta)
    if model == "tgv":
        u, w, rep = solve_tgv(f, cfg.alpha, cfg.beta, p)
        return RunResult(u, w, [rep], beta)
    u, w, rep = solve_tvlinf(f, p)
    return RunResult(u, w, [rep], beta)


def exact_profile(cfg: ExperimentConfig, ds: Dataset):
    """Closed-form solution on the data grid when one is known for this setup."""
    if ds.step is None or cfg.noise > 0 or cfg.bregman > 1:
        return None
    x = ds.data.grid.coords()
    if cfg.model == "tv" and ds.step.lam == 0:
        return exact_solution_tv_step(ds.step, cfg.alpha)(x)
    if cfg.model != "tvlinf":
        return None
    region = classify_region(ds.step, cfg.alpha, cfg.beta)
    if region is Region.YellowAffineJump:
        return exact_solution_yellow(ds.step, cfg.alpha, cfg.beta)[0](x)
    if region is Region.TVRegime and ds.step.lam == 0:
        return exact_solution_tv_step(ds.step, cfg.alpha)(x)
    return None


def quality_report(ds: Dataset, u: ScalarField) -> dict[str, float]:
    """SSIM (2D only) and PSNR against the clean image, or against the data if none.

    Noisy data routinely leave [0, 1]; SSIM clips them, which is logged rather
    than warned about here.
    """
    ref = ds.clean if ds.clean is not None else ds.data
    out = {"l2_to_data": metrics.l2_distance(ds.data, u)}
    if ref.grid.dims == 2 and min(ref.grid.shape) >= metrics.SSIM_WINDOW:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            out["ssim_denoised"] = metrics.ssim(ref, u)
            if ds.clean is not None:
                out["ssim_noisy"] = metrics.ssim(ref, ds.data)
        for w in caught:
            log.info("%s", w.message)
    peak = 1.0 if ref.grid.dims == 2 else max(float(np.ptp(ref.values)), np.finfo(float).tiny)
    out["psnr_denoised"] = metrics.psnr(ref, u, peak)
    if ds.clean is not None:
        out["psnr_noisy"] = metrics.psnr(ref, ds.data, peak)
    return out


def denoise(cfg: ExperimentConfig) -> dict[str, Any]:
    """Run one experiment and write its outputs. Returns a summary dict."""
    ds = load_dataset(cfg)
    result = run_model(cfg, ds)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    summary: dict[str, Any] = {"model": cfg.model, "converged": result.converged,
                               "iterations": sum(r.iterations for r in result.reports)}
    summary.update(quality_report(ds, result.u))

    if ds.data.grid.dims == 1:
        exact = exact_profile(cfg, ds)
        if exact is not None:
            summary["max_abs_exact_error"] = float(np.max(np.abs(result.u.values - exact)))
        imageio.write_profile_csv(out / "profile.csv", ds.data.grid.coords(), ds.data.values,
                                  result.u.values, exact)
    else:
        imageio.write_image(out / "denoised.pgm", result.u, bits=16)
        imageio.write_image(out / "noisy.pgm", ds.data, bits=16)
        if ds.clean is not None:
            imageio.write_image(out / "clean.pgm", ds.clean, bits=16)
    imageio.write_history_csv(out / "history.csv", result.reports)
    with open(out / "report.txt", "w") as fh:
        for key, val in summary.items():
            fh.write(f"{key}: {val}\n")
    summary["result"] = result
    return summary


def verify(cfg: ExperimentConfig, u: ScalarField | None = None, w: VectorField | None = None):
    """Certificate check of a 1D solution; solves first unless ``u`` is supplied."""
    ds = load_dataset(cfg)
    if ds.data.grid.dims != 1:
        raise ConfigError("verify only supports 1D problems")
    if cfg.beta is None:
        raise ConfigError("verify needs beta")
    if u is None:
        u, w, _ = solve_tvlinf(ds.data, build_params(cfg, ds))
    if w is None:
        w = VectorField.zeros(ds.data.grid)
    return build_certificate(u, w, ds.data, cfg.alpha, cfg.beta)


def compare(cfg: ExperimentConfig, models=MODELS, tgv_beta: float | None = None) -> list[dict]:
    """Run several models on one dataset; rows of model name and metrics."""
    ds = load_dataset(cfg)
    rows = []
    for model in models:
        sub = dataclasses.replace(cfg, model=model)
        if model == "tgv" and tgv_beta is not None:
            sub.beta = tgv_beta
        if model == "tvlinf_sa" and sub.c is None:
            continue
        res = run_model(sub, ds)
        row = {"model": model, "iterations": sum(r.iterations for r in res.reports),
               "converged": res.converged}
        row.update(quality_report(ds, res.u))
        rows.append(row)
    return rows
