"""Command-line interface: ``tvlinf {denoise,verify,generate,compare}``.

Parameters come from an optional ``--config`` key=value file; command-line
flags override file values. Exit codes: 0 success, 1 usage or input error,
2 numerical failure (non-convergence under ``--strict``, failed certificate).
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from . import imageio, synthetic
from .experiment import MODELS, ConfigError, ExperimentConfig, compare, denoise, verify
from .fields import ScalarField, VectorField

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2

# flag name -> config key
_FLAGS = {
    "model": "model", "alpha": "alpha", "beta": "beta", "mu": "mu", "tol": "tol",
    "max_iters": "max_iters", "bregman": "bregman", "c": "c", "eps": "eps", "sigma": "sigma",
    "window": "window", "seed": "seed", "input": "input", "out": "out", "generator": "generator",
    "n": "n", "noise": "noise", "beta_source": "beta_source", "L": "L", "h_jump": "h_jump",
    "lam": "lam", "cert_tol": "cert_tol",
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value file; flags override its entries")
    p.add_argument("--model", choices=MODELS)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--mu", type=float, help="splitting penalty (default alpha * grid spacing)")
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iters", dest="max_iters", type=int)
    p.add_argument("--bregman", type=int, help="Bregman outer iterations (1 = single solve)")
    p.add_argument("--c", type=float, help="beta rule constant for tvlinf_sa")
    p.add_argument("--eps", type=float, help="beta rule offset")
    p.add_argument("--sigma", type=float, help="pre-filter Gaussian sigma (pixels)")
    p.add_argument("--window", type=int, help="pre-filter window (odd, pixels)")
    p.add_argument("--beta-source", dest="beta_source", choices=("data", "reference"))
    p.add_argument("--seed", type=int)
    p.add_argument("--in", dest="input", help="input image (.pgm/.png) or 1D profile (.csv)")
    p.add_argument("--generator", choices=sorted(synthetic.GENERATORS))
    p.add_argument("--n", type=int, help="generator size (samples per axis)")
    p.add_argument("--L", type=float, help="half-length of the 1D domain")
    p.add_argument("--h-jump", dest="h_jump", type=float, help="1D step height")
    p.add_argument("--lam", type=float, help="1D slope of the affine step")
    p.add_argument("--noise", type=float, help="Gaussian noise variance")
    p.add_argument("--out", help="output directory")
    p.add_argument("--strict", action="store_true", help="exit 2 if a solve does not converge")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tvlinf", description="TVL-infinity denoising experiments")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("denoise", help="denoise an image or 1D profile")
    _add_common(p)

    p = sub.add_parser("verify", help="check the optimality certificate of a 1D solution")
    _add_common(p)
    p.add_argument("--cert-tol", dest="cert_tol", type=float, help="pass threshold (default 5e-3)")

    p = sub.add_parser("generate", help="write a synthetic (optionally noisy) dataset")
    _add_common(p)
    p.add_argument("--bits", type=int, choices=(8, 16), default=16)

    p = sub.add_parser("compare", help="run several models on the same data")
    _add_common(p)
    p.add_argument("--models", default="tv,tgv,tvlinf,tvlinf_sa")
    p.add_argument("--tgv-beta", dest="tgv_beta", type=float, help="beta for the TGV run")
    return parser


def _config_from_args(args, check_model: bool = True) -> ExperimentConfig:
    values = {}
    if args.config:
        values.update(imageio.read_config(args.config))
    for flag, key in _FLAGS.items():
        val = getattr(args, flag, None)
        if val is not None:
            values[key] = val
    if args.strict:
        values["strict"] = True
    return ExperimentConfig.from_mapping(values, check_model)


def _cmd_denoise(args) -> int:
    cfg = _config_from_args(args)
    summary = denoise(cfg)
    for key, val in summary.items():
        if key != "result":
            print(f"{key}: {val}")
    if cfg.strict and not summary["converged"]:
        print("error: solver did not converge", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_verify(args) -> int:
    cfg = _config_from_args(args)
    u = w = None
    if cfg.input and Path(cfg.input).suffix.lower() == ".csv":
        cols = imageio.read_profile_csv(cfg.input)
        if "u" in cols and not np.all(np.isnan(cols["u"])):
            from .experiment import load_dataset
            grid = load_dataset(cfg).data.grid
            u = ScalarField(grid, cols["u"])
            if "w" in cols and not np.all(np.isnan(cols["w"])):
                w = VectorField(grid, cols["w"][None])
    cert = verify(cfg, u, w)
    for name, val in cert.residuals.items():
        print(f"r_{name}: {val:.3e}")
    ok = cert.passed(cfg.cert_tol)
    print(f"max residual {cert.max_residual:.3e} vs tol {cfg.cert_tol:g}: {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_NUMERICAL


def _cmd_generate(args) -> int:
    cfg = _config_from_args(args, check_model=False)
    if cfg.generator is None:
        raise ConfigError("generate needs --generator")
    from .experiment import load_dataset
    ds = load_dataset(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    if ds.data.grid.dims == 1:
        path = out / "data.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "f", "clean"])
            for row in zip(ds.data.grid.coords(), ds.data.values, ds.clean.values):
                writer.writerow([repr(float(v)) for v in row])
        print(f"wrote {path}")
    else:
        imageio.write_image(out / "clean.pgm", ds.clean, bits=args.bits)
        imageio.write_image(out / "noisy.pgm", ds.data, bits=args.bits)
        print(f"wrote {out / 'clean.pgm'} and {out / 'noisy.pgm'}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    cfg = _config_from_args(args)
    models = [m.strip() for m in args.models.split(",") if m.strip()]
    bad = [m for m in models if m not in MODELS]
    if bad:
        raise ConfigError(f"unknown models: {bad}")
    rows = compare(cfg, models, args.tgv_beta)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    keys = sorted({k for r in rows for k in r}, key=lambda k: (k != "model", k))
    with open(out / "compare.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=keys)
        writer.writeheader()
        writer.writerows(rows)
    for r in rows:
        print("  ".join(f"{k}={r[k]:.4f}" if isinstance(r.get(k), float) else f"{k}={r.get(k)}"
                        for k in keys))
    if cfg.strict and not all(r["converged"] for r in rows):
        return EXIT_NUMERICAL
    return EXIT_OK


_COMMANDS = {"denoise": _cmd_denoise, "verify": _cmd_verify, "generate": _cmd_generate,
             "compare": _cmd_compare}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, FileNotFoundError, imageio.ImageFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
