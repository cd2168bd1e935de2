"""File contracts: binary PGM images, plain-text kernels, trace CSV,
and the JSON-lines run manifest.

Images travel as 8-bit PGM (P5, maxval 255); intensities are clamped and
rounded only at write time, so everything upstream stays in doubles.
Kernel files are plain text: the side length on the first line, then the
taps row by row, used verbatim (no normalization).
"""

import json
from dataclasses import asdict, dataclass

import numpy as np

from .core import Kernel
from .solver import TRACE_COLUMNS


def write_pgm(path, img: np.ndarray):
    """Write an image as binary PGM, clamping to [0, 255] and rounding."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError("PGM output requires a 2-D image")
    data = np.rint(np.clip(img, 0.0, 255.0)).astype(np.uint8)
    height, width = data.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(data.tobytes())


def read_pgm(path) -> np.ndarray:
    """Read a binary PGM (maxval <= 255) into a float64 image."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if not blob.startswith(b"P5"):
        raise ValueError(f"{path}: not a binary PGM (missing P5 magic)")
    pos = 2
    fields = []
    while len(fields) < 3:
        while pos < len(blob) and blob[pos : pos + 1].isspace():
            pos += 1
        if pos < len(blob) and blob[pos : pos + 1] == b"#":
            while pos < len(blob) and blob[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(blob) and not blob[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError(f"{path}: truncated PGM header")
        fields.append(blob[start:pos])
    pos += 1  # single whitespace byte separates header from raster
    width, height, maxval = (int(f) for f in fields)
    if width <= 0 or height <= 0:
        raise ValueError(f"{path}: bad PGM dimensions {width}x{height}")
    if not 0 < maxval <= 255:
        raise ValueError(f"{path}: unsupported PGM maxval {maxval} (need <= 255)")
    raster = blob[pos : pos + width * height]
    if len(raster) != width * height:
        raise ValueError(f"{path}: PGM raster shorter than {width}x{height}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).astype(np.float64)


def write_kernel(path, k: Kernel):
    with open(path, "w") as fh:
        fh.write(f"{k.size}\n")
        for row in k.taps:
            fh.write(" ".join(f"{t:.17g}" for t in row) + "\n")


def read_kernel(path) -> Kernel:
    """Parse a kernel file; constraint violations surface as ValueError."""
    with open(path) as fh:
        tokens = fh.read().split()
    if not tokens:
        raise ValueError(f"{path}: empty kernel file")
    try:
        size = int(tokens[0])
        taps = [float(t) for t in tokens[1:]]
    except ValueError:
        raise ValueError(f"{path}: kernel file must contain only numbers")
    if size <= 0:
        raise ValueError(f"{path}: kernel size must be positive, got {size}")
    if len(taps) != size * size:
        raise ValueError(
            f"{path}: expected {size}x{size} = {size * size} taps, found {len(taps)}"
        )
    return Kernel(np.array(taps, dtype=np.float64).reshape(size, size))


def write_trace(path, rows):
    """Write trace rows (from solver.trace_to_rows) as CSV, full precision."""
    with open(path, "w") as fh:
        fh.write(",".join(TRACE_COLUMNS) + "\n")
        for outer, inner, dist, cost_value, residual, isnr_db in rows:
            isnr_txt = "" if isnr_db is None else f"{isnr_db:.17g}"
            fh.write(
                f"{outer},{inner},{dist:.17g},{cost_value:.17g},"
                f"{residual:.17g},{isnr_txt}\n"
            )


def read_trace(path):
    """Parse a trace CSV back into (outer, inner, ...) tuples."""
    rows = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != ",".join(TRACE_COLUMNS):
            raise ValueError(f"{path}: unexpected trace header {header!r}")
        for line in fh:
            parts = line.rstrip("\n").split(",")
            if len(parts) != len(TRACE_COLUMNS):
                raise ValueError(f"{path}: malformed trace row {line!r}")
            rows.append(
                (
                    int(parts[0]),
                    int(parts[1]),
                    float(parts[2]),
                    float(parts[3]),
                    float(parts[4]),
                    None if parts[5] == "" else float(parts[5]),
                )
            )
    return rows


@dataclass(frozen=True)
class RunManifest:
    """One command invocation with every parameter resolved."""

    command: str
    params: dict
    version: str


def manifest_path_for(out_path) -> str:
    return f"{out_path}.manifest.jsonl"


def write_manifest(path, manifest: RunManifest):
    with open(path, "w") as fh:
        fh.write(json.dumps(asdict(manifest), sort_keys=True) + "\n")


def read_manifest(path) -> RunManifest:
    with open(path) as fh:
        line = fh.readline()
    record = json.loads(line)
    return RunManifest(
        command=record["command"], params=record["params"], version=record["version"]
    )
