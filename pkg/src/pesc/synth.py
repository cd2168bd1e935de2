"""Degradation synthesis: blur plus noise calibrated to a target BSNR.

The Gaussian sampler is a Box-Muller transform over numpy's PCG64
uniform stream, pinned explicitly so that a given seed reproduces the
same observation byte-for-byte on any platform.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import Kernel, as_image, convolve_full


@dataclass(frozen=True)
class DegradationSpec:
    """Blur kernel, noise target, and RNG seed for one synthetic observation.

    A ``target_bsnr_db`` of +inf is the noiseless sentinel (sigma forced
    to zero).
    """

    kernel: Kernel
    target_bsnr_db: float
    seed: int = 0

    def __post_init__(self):
        if math.isnan(self.target_bsnr_db):
            raise ValueError("target_bsnr_db must not be NaN")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")


def calibrate_sigma(z_tilde: np.ndarray, target_bsnr_db: float) -> float:
    """Noise standard deviation that hits the requested BSNR exactly.

    Inverts the BSNR definition: sigma = sqrt(||z - mean||^2 / (N * 10^(t/10))).
    Raises ValueError for a constant image, whose BSNR is undefined.
    """
    z_tilde = as_image(z_tilde)
    energy = float(np.sum((z_tilde - z_tilde.mean()) ** 2))
    if energy == 0.0:
        raise ValueError("constant blurred image: BSNR target cannot be met")
    return math.sqrt(energy / (z_tilde.size * 10.0 ** (target_bsnr_db / 10.0)))


def degrade(w_orig: np.ndarray, spec: DegradationSpec):
    """Blur w_orig and add seeded Gaussian noise at the calibrated level.

    Returns
    -------
    (z, sigma) : (ndarray, float)
        The degraded observation and the noise standard deviation used.
        Deterministic for a fixed spec.
    """
    w_orig = as_image(w_orig)
    z_tilde = convolve_full(w_orig, spec.kernel)
    if math.isinf(spec.target_bsnr_db) and spec.target_bsnr_db > 0:
        return z_tilde, 0.0
    sigma = calibrate_sigma(z_tilde, spec.target_bsnr_db)
    noise = _seeded_normal(z_tilde.shape, spec.seed)
    return z_tilde + sigma * noise, sigma


def _seeded_normal(shape, seed: int) -> np.ndarray:
    """Standard normals via Box-Muller on a PCG64 uniform stream."""
    n = int(np.prod(shape))
    pairs = (n + 1) // 2
    rng = np.random.Generator(np.random.PCG64(seed))
    u1 = rng.random(pairs)
    u2 = rng.random(pairs)
    # 1 - u1 lies in (0, 1], keeping the log finite
    r = np.sqrt(-2.0 * np.log1p(-u1))
    theta = 2.0 * np.pi * u2
    out = np.concatenate([r * np.cos(theta), r * np.sin(theta)])[:n]
    return out.reshape(shape)
