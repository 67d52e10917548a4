"""Image, profile and config I/O.

PGM (P5 binary, 8 or 16 bit; P2 ascii on read) is handled here without
dependencies. PNG goes through Pillow when it is installed. Pixel values are
mapped to [0, 1] on read and quantised from [0, 1] on write.
"""

from __future__ import annotations

import csv
import re
from pathlib import Path

import numpy as np

from .fields import GridSpec, ScalarField, SolveReport


class ImageFormatError(ValueError):
    pass


def _pgm_tokens(data: bytes, count: int):
    """Split the first ``count`` header tokens, skipping comments; returns tokens and offset."""
    tokens, pos = [], 0
    while len(tokens) < count:
        m = re.compile(rb"\s*(#[^\n]*\n\s*)*").match(data, pos)
        pos = m.end()
        m = re.compile(rb"\S+").match(data, pos)
        if m is None:
            raise ImageFormatError("truncated PGM header")
        tokens.append(m.group())
        pos = m.end()
    return tokens, pos


def read_pgm(path) -> ScalarField:
    data = Path(path).read_bytes()
    if data[:2] not in (b"P5", b"P2"):
        raise ImageFormatError(f"{path}: not a PGM file")
    try:
        tokens, pos = _pgm_tokens(data, 4)
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise ImageFormatError(f"{path}: malformed PGM header") from exc
    if not 0 < maxval < 65536 or width < 1 or height < 1:
        raise ImageFormatError(f"{path}: unsupported PGM header values")
    if data[:2] == b"P5":
        pos += 1  # single whitespace byte before raster
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        raster = np.frombuffer(data, dtype=dtype, count=width * height, offset=pos) \
            if len(data) - pos >= width * height * dtype.itemsize else None
        if raster is None:
            raise ImageFormatError(f"{path}: truncated PGM raster")
    else:
        raster = np.array(data[pos:].split()[: width * height], dtype=int)
        if raster.size != width * height:
            raise ImageFormatError(f"{path}: truncated PGM raster")
    img = raster.reshape(height, width).astype(float) / maxval
    return ScalarField(GridSpec.regular(img.shape, 1.0), img)


def write_pgm(path, f: ScalarField, bits: int = 8) -> None:
    if f.grid.dims != 2:
        raise ImageFormatError("PGM output needs a 2D field")
    if bits not in (8, 16):
        raise ValueError("bits must be 8 or 16")
    maxval = 255 if bits == 8 else 65535
    q = np.rint(np.clip(f.values, 0.0, 1.0) * maxval)
    raster = q.astype(">u2" if bits == 16 else "u1").tobytes()
    height, width = f.grid.shape
    Path(path).write_bytes(f"P5\n{width} {height}\n{maxval}\n".encode() + raster)


def read_image(path) -> ScalarField:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such image: {path}")
    if path.suffix.lower() in (".pgm", ".pnm"):
        return read_pgm(path)
    try:
        from PIL import Image
    except ImportError as exc:  # pragma: no cover - Pillow is optional
        raise ImageFormatError(f"{path}: only PGM is supported without Pillow") from exc
    try:
        with Image.open(path) as im:
            arr = np.asarray(im.convert("I;16") if im.mode in ("I", "I;16") else im.convert("L"))
    except OSError as exc:
        raise ImageFormatError(f"{path}: cannot decode image ({exc})") from exc
    maxval = 65535.0 if arr.dtype == np.uint16 else 255.0
    img = arr.astype(float) / maxval
    return ScalarField(GridSpec.regular(img.shape, 1.0), img)


def write_image(path, f: ScalarField, bits: int = 8) -> None:
    path = Path(path)
    if path.suffix.lower() == ".png":
        from PIL import Image
        maxval = 255 if bits == 8 else 65535
        q = np.rint(np.clip(f.values, 0.0, 1.0) * maxval).astype(np.uint8 if bits == 8 else np.uint16)
        Image.fromarray(q).save(path)
    else:
        write_pgm(path, f, bits)


def write_profile_csv(path, x, f, u, u_exact=None) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "f", "u", "u_exact"])
        for i in range(len(x)):
            ex = "" if u_exact is None else repr(float(u_exact[i]))
            writer.writerow([repr(float(x[i])), repr(float(f[i])), repr(float(u[i])), ex])


def read_profile_csv(path) -> dict[str, np.ndarray]:
    """Read a profile CSV into column arrays; empty cells become NaN."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ImageFormatError(f"{path}: empty profile")
    cols = {}
    for key in rows[0]:
        cols[key] = np.array([float(r[key]) if r[key] not in ("", None) else np.nan for r in rows])
    return cols


def write_field_csv(path, f: ScalarField) -> None:
    """Row-major dump of a 2D field: columns i, j, value."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "value"])
        for (i, j), v in np.ndenumerate(f.values):
            writer.writerow([i, j, repr(float(v))])


def write_history_csv(path, reports: list[SolveReport]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["outer", "iteration", "energy", "residual"])
        for k, rep in enumerate(reports):
            for i, (e, r) in enumerate(zip(rep.energy_history, rep.residual_history)):
                writer.writerow([k, i + 1, repr(e), repr(r)])


def read_config(path) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out
