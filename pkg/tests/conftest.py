import numpy as np
import pytest

from pesc.core import Kernel


def piecewise_constant(size, seed, blocks=5, lo=30.0, hi=220.0):
    """Random axis-aligned blocks on a mid-grey background."""
    rng = np.random.default_rng(seed)
    img = np.full((size, size), 128.0)
    for _ in range(blocks):
        x0, y0 = rng.integers(0, size - 6, size=2)
        wd, ht = rng.integers(size // 8, size // 2, size=2)
        img[y0 : y0 + ht, x0 : x0 + wd] = rng.uniform(lo, hi)
    return img


def brute_convolve(img, k: Kernel):
    """Independent zero-padded stamped-sum reference for the convolution ops."""
    img = np.asarray(img, dtype=float)
    height, width = img.shape
    c = k.size // 2
    out = np.zeros_like(img)
    for y in range(height):
        for x in range(width):
            acc = 0.0
            for b in range(k.size):
                for a in range(k.size):
                    yy, xx = y + b - c, x + a - c
                    if 0 <= yy < height and 0 <= xx < width:
                        acc += img[yy, xx] * k.taps[b, a]
            out[y, x] = acc
    return out


def random_kernel(rng, size=3):
    """Random strictly positive normalized kernel."""
    taps = rng.uniform(0.1, 1.0, size=(size, size))
    return Kernel(taps / taps.sum())


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
