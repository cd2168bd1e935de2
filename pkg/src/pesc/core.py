"""Fundamental value types: images, blur kernels, lifted vectors, convolution.

Images are plain 2-D float64 numpy arrays (row-major, intensities nominally
in [0, 255] but never clamped internally).  All operations here are pure:
inputs are not mutated, and outputs are freshly allocated.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import ndimage


class NumericError(ArithmeticError):
    """Raised when NaN/Inf appears in an iterative computation.

    Carries an optional ``trace`` attribute with whatever convergence
    record existed when the failure was detected.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


def as_image(data) -> np.ndarray:
    """Validate and return an image as a fresh 2-D float64 array.

    1-D input is accepted and treated as a single-row image where that is
    meaningful to the caller; the array is returned with its dimensionality
    preserved.  Raises ValueError on empty or non-finite data.
    """
    arr = np.array(data, dtype=np.float64, order="C")
    if arr.ndim not in (1, 2):
        raise ValueError(f"image must be 1-D or 2-D, got ndim={arr.ndim}")
    if arr.size == 0:
        raise ValueError("image must have at least one pixel")
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains non-finite entries")
    return arr


@dataclass(frozen=True)
class Kernel:
    """Small square blur kernel with odd side length.

    ``sq_norm`` caches the sum of squared taps; it is what the row-action
    update divides by on interior pixels.
    """

    taps: np.ndarray
    sq_norm: float = field(init=False)

    def __post_init__(self):
        taps = np.array(self.taps, dtype=np.float64, order="C")
        if taps.ndim != 2 or taps.shape[0] != taps.shape[1]:
            raise ValueError(f"kernel must be square, got shape {taps.shape}")
        if taps.shape[0] % 2 == 0:
            raise ValueError(f"kernel size must be odd, got {taps.shape[0]}")
        if not np.all(np.isfinite(taps)):
            raise ValueError("kernel contains non-finite taps")
        sq = float(np.sum(taps * taps))
        if sq <= 0.0:
            raise ValueError("kernel must have positive squared norm")
        taps.setflags(write=False)
        object.__setattr__(self, "taps", taps)
        object.__setattr__(self, "sq_norm", sq)

    @property
    def size(self) -> int:
        return self.taps.shape[0]

    @property
    def radius(self) -> int:
        return self.taps.shape[0] // 2


def delta_kernel() -> Kernel:
    """The 1x1 identity kernel."""
    return Kernel(np.ones((1, 1)))


def box_kernel(size: int) -> Kernel:
    """Uniform averaging kernel of odd side ``size`` (taps sum to 1)."""
    return Kernel(np.full((size, size), 1.0 / (size * size)))


class Lifted(NamedTuple):
    """A point (w, y) in the lifted space: an image plus one cost coordinate."""

    w: np.ndarray
    y: float


def lift(img: np.ndarray, y: float) -> Lifted:
    """Embed an image into the lifted space with last component ``y``.

    ``lift(img, 0)`` is the canonical embedding used as the projection
    source throughout the solver.
    """
    if not np.isfinite(y):
        raise ValueError(f"lifted component must be finite, got {y}")
    return Lifted(np.array(img, dtype=np.float64), float(y))


def lifted_distance(a: Lifted, b: Lifted) -> float:
    """Euclidean distance in the lifted space: sqrt(||w1-w2||^2 + (y1-y2)^2)."""
    dw = a.w - b.w
    return float(np.sqrt(np.sum(dw * dw) + (a.y - b.y) ** 2))


def convolve_at(img: np.ndarray, k: Kernel, x: int, y: int) -> float:
    """Blurred value at pixel (x, y): the kernel stamped there, zero-padded.

    ``x`` indexes columns and ``y`` rows.  Taps are applied without
    flipping, so the same stamp serves both as the measurement functional
    and as the row-action update direction.  Neighbours outside the image
    contribute zero.
    """
    h, w = img.shape
    if not (0 <= x < w and 0 <= y < h):
        raise IndexError(f"pixel ({x}, {y}) outside {w}x{h} image")
    taps_sub, rows, cols = _stamp_window(img.shape, k, x, y)
    return float(np.sum(img[rows, cols] * taps_sub))


def convolve_full(img: np.ndarray, k: Kernel) -> np.ndarray:
    """Blur the whole image: elementwise equal to convolve_at at every pixel."""
    img = as_image(img)
    if img.ndim != 2:
        raise ValueError("convolution is defined on 2-D images")
    return ndimage.correlate(img, k.taps, mode="constant", cval=0.0)


def _stamp_window(shape, k: Kernel, x: int, y: int):
    """In-range kernel slice and the image window it overlaps at (x, y)."""
    h, w = shape
    c = k.radius
    r0, r1 = max(0, y - c), min(h, y + c + 1)
    c0, c1 = max(0, x - c), min(w, x + c + 1)
    taps_sub = k.taps[r0 - y + c : r1 - y + c, c0 - x + c : c1 - x + c]
    return taps_sub, slice(r0, r1), slice(c0, c1)
