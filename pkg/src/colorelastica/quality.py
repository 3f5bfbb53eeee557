"""PSNR and SSIM for images with values in [0, 1]."""

from typing import NamedTuple

import numpy as np
from scipy import ndimage

from .image_core import as_array

PEAK = 1.0
WINDOW_SIZE = 11
WINDOW_SIGMA = 1.5
K1 = 0.01
K2 = 0.03


class QualityReport(NamedTuple):
    psnr: float
    ssim: float

    def __str__(self):
        return f"psnr_db={self.psnr:.6f} ssim={self.ssim:.6f}"


def _pair(a, b):
    a, b = as_array(a), as_array(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a, b


def psnr(a, b):
    """10 log10(PEAK^2 / MSE) over all samples; ``inf`` for identical images."""
    a, b = _pair(a, b)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0:
        return float("inf")
    return 10.0 * np.log10(PEAK * PEAK / mse)


def gaussian_window(size=WINDOW_SIZE, sigma=WINDOW_SIGMA):
    x = np.arange(size) - (size - 1) / 2
    g = np.exp(-(x * x) / (2 * sigma * sigma))
    w = np.outer(g, g)
    return w / w.sum()


def ssim_map(a, b, window=None):
    """Per-pixel SSIM of two single-channel images, window wrapped periodically."""
    w = gaussian_window() if window is None else window
    filt = lambda x: ndimage.correlate(x, w, mode="wrap")
    c1 = (K1 * PEAK) ** 2
    c2 = (K2 * PEAK) ** 2
    mu_a, mu_b = filt(a), filt(b)
    var_a = filt(a * a) - mu_a * mu_a
    var_b = filt(b * b) - mu_b * mu_b
    cov = filt(a * b) - mu_a * mu_b
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return num / den


def ssim(a, b):
    """Mean SSIM, channels scored independently and averaged."""
    a, b = _pair(a, b)
    if min(a.shape[-2:]) < WINDOW_SIZE:
        raise ValueError(f"image must be at least {WINDOW_SIZE}x{WINDOW_SIZE} for SSIM, got {a.shape[-2:]}")
    return float(np.mean([np.mean(ssim_map(ca, cb)) for ca, cb in zip(a, b)]))


def evaluate(ref, test):
    return QualityReport(psnr(ref, test), ssim(ref, test))
