"""Restoration quality metrics in decibels.

All three metrics are energy ratios on a log scale.  Degenerate inputs
(perfect reconstruction, zero noise, constant blurred image) are flagged
with signed infinities rather than raised, since they are legitimate
outcomes of exact arithmetic on synthetic data.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class QualityReport:
    """BSNR/ISNR/SNR bundle for one restoration run.

    Entries may be +/-inf for degenerate cases; ``bsnr_db`` is NaN when
    the noise level needed to compute it was not available.
    """

    bsnr_db: float
    isnr_db: float
    snr_db: float


def bsnr(z_tilde: np.ndarray, sigma: float, n_pixels: int) -> float:
    """Blurred signal-to-noise ratio of a degraded observation.

    Parameters
    ----------
    z_tilde : array_like
        Noise-free blurred image.
    sigma : float
        Standard deviation of the additive noise.
    n_pixels : int
        Total pixel count N.

    Returns
    -------
    float
        10*log10(||z_tilde - mean(z_tilde)||^2 / (N*sigma^2)), where the
        mean is the spatial pixel average.  -inf for a constant image.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    z_tilde = np.asarray(z_tilde, dtype=np.float64)
    energy = float(np.sum((z_tilde - z_tilde.mean()) ** 2))
    if energy == 0.0:
        return float("-inf")
    return 10.0 * np.log10(energy / (n_pixels * sigma * sigma))


def isnr(z: np.ndarray, w_rec: np.ndarray, w_orig: np.ndarray) -> float:
    """Improvement in signal-to-noise ratio of a restoration over its input.

    Parameters
    ----------
    z : array_like
        Degraded observation.
    w_rec : array_like
        Restored image.
    w_orig : array_like
        Ground truth.

    Returns
    -------
    float
        10*log10(||z - w_orig||^2 / ||w_rec - w_orig||^2).  Positive means
        the restoration helped.  +inf when w_rec equals the truth exactly,
        -inf when z does (nothing left to improve).
    """
    z, w_rec, w_orig = (np.asarray(a, dtype=np.float64) for a in (z, w_rec, w_orig))
    if not (z.shape == w_rec.shape == w_orig.shape):
        raise ValueError("isnr requires matching shapes")
    num = float(np.sum((z - w_orig) ** 2))
    den = float(np.sum((w_rec - w_orig) ** 2))
    if den == 0.0:
        return float("inf")
    if num == 0.0:
        return float("-inf")
    return 10.0 * np.log10(num / den)


def snr(w_rec: np.ndarray, w_orig: np.ndarray) -> float:
    """Signal energy over reconstruction-error energy, in dB.

    Returns +inf for an exact reconstruction.
    """
    w_rec = np.asarray(w_rec, dtype=np.float64)
    w_orig = np.asarray(w_orig, dtype=np.float64)
    if w_rec.shape != w_orig.shape:
        raise ValueError("snr requires matching shapes")
    err = float(np.sum((w_rec - w_orig) ** 2))
    if err == 0.0:
        return float("inf")
    sig = float(np.sum(w_orig**2))
    if sig == 0.0:
        return float("-inf")
    return 10.0 * np.log10(sig / err)
