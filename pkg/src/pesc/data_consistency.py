"""Row-action projections onto the measurement hyperplanes.

Each observed pixel z_i pins one linear constraint on the unknown image:
the kernel stamped at i must reproduce z_i.  Projecting onto a single
constraint is a rank-one Kaczmarz update; a sweep applies them in
raster order, each update feeding the next.

At border pixels part of the stamp falls outside the image.  The update
divides by the squared norm of the in-range taps only, which keeps every
row action an exact orthogonal projection (dividing by the full-kernel
norm would under-relax border rows).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Kernel, _stamp_window, as_image


@dataclass(frozen=True)
class MeasurementModel:
    """Observations plus the blur that produced them.

    ``slab_eps``, when set, thickens each measurement hyperplane into a
    slab of that half-width, which tolerates noise at the cost of a
    looser fit.
    """

    z: np.ndarray
    h: Kernel
    slab_eps: Optional[float] = None

    def __post_init__(self):
        z = as_image(self.z)
        if z.ndim != 2:
            raise ValueError("observations must form a 2-D image")
        z.setflags(write=False)
        object.__setattr__(self, "z", z)
        if self.slab_eps is not None and self.slab_eps < 0:
            raise ValueError("slab_eps must be nonnegative")


def project_row(v: np.ndarray, m: MeasurementModel, i) -> np.ndarray:
    """Project v onto the single measurement hyperplane at pixel i = (x, y).

    Afterwards the stamped kernel at i reproduces z_i exactly.
    """
    out = np.array(v, dtype=np.float64)
    _row_update(out, m, i, 0.0)
    return out


def project_slab(v: np.ndarray, m: MeasurementModel, i) -> np.ndarray:
    """Project v onto the slab |z_i - (v*h)[i]| <= slab_eps at pixel i.

    Points already inside the slab are returned unchanged; outside, the
    projection lands on the nearer bounding hyperplane.
    """
    if m.slab_eps is None:
        raise ValueError("slab projection requires slab_eps on the model")
    out = np.array(v, dtype=np.float64)
    _row_update(out, m, i, m.slab_eps)
    return out


def sweep(v: np.ndarray, m: MeasurementModel) -> np.ndarray:
    """One full raster pass of row projections (Gauss-Seidel style).

    Uses slab projections when the model carries ``slab_eps``, plain
    hyperplane projections otherwise.  Returns a new image; the input is
    untouched.
    """
    v = as_image(v)
    if v.shape != m.z.shape:
        raise ValueError(f"image shape {v.shape} != observation shape {m.z.shape}")
    out = v.copy()
    eps = m.slab_eps if m.slab_eps is not None else 0.0
    height, width = out.shape
    for y in range(height):
        for x in range(width):
            _row_update(out, m, (x, y), eps)
    return out


def _row_update(v: np.ndarray, m: MeasurementModel, i, eps: float):
    """In-place Kaczmarz/slab update at pixel i; eps = 0 is the hyperplane case."""
    x, y = i
    height, width = v.shape
    if not (0 <= x < width and 0 <= y < height):
        raise IndexError(f"pixel ({x}, {y}) outside {width}x{height} image")
    taps_sub, rows, cols = _stamp_window(v.shape, m.h, x, y)
    denom = float(np.sum(taps_sub * taps_sub))
    if denom == 0.0:
        raise RuntimeError(
            f"measurement row at ({x}, {y}) has zero effective norm; "
            "the kernel places no weight inside the image there"
        )
    r = float(m.z[y, x]) - float(np.sum(v[rows, cols] * taps_sub))
    if abs(r) <= eps:
        return
    shift = r - eps if r > 0 else r + eps
    v[rows, cols] += (shift / denom) * taps_sub
