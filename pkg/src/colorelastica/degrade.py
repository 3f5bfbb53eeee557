"""Synthetic degradations: additive Gaussian noise, Poisson photon noise, blur kernels.

Random numbers come from numpy's Philox generator, a counter-based bit
generator whose output for a given seed is the same on every platform.
Noisy values are never clamped.
"""

import math
from dataclasses import dataclass

import numpy as np

from .image_core import MultiChannelImage, as_array
from .spectral import BlurKernel, convolve_periodic


def make_rng(seed):
    return np.random.Generator(np.random.Philox(int(seed)))


def _like(img, data):
    return MultiChannelImage(data) if isinstance(img, MultiChannelImage) else data


@dataclass(frozen=True)
class NoiseSpec:
    kind: str
    sd: float = 0.0
    photons: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("gaussian", "poisson"):
            raise ValueError(f"noise kind must be 'gaussian' or 'poisson', got {self.kind!r}")
        if not self.sd >= 0:
            raise ValueError(f"sd must be non-negative, got {self.sd}")
        if not self.photons > 0:
            raise ValueError(f"photon count must be positive, got {self.photons}")

    def apply(self, img):
        if self.kind == "gaussian":
            return add_gaussian(img, self.sd, self.seed)
        return add_poisson(img, self.photons, self.seed)


def add_gaussian(img, sd, seed):
    """Add i.i.d. N(0, sd^2) noise to every sample."""
    if not sd >= 0:
        raise ValueError(f"sd must be non-negative, got {sd}")
    v = as_array(img)
    if sd == 0:
        return _like(img, v.copy())
    noise = make_rng(seed).standard_normal(v.shape)
    return _like(img, v + sd * noise)


def add_poisson(img, photons, seed):
    """Replace each sample v by Poisson(max(v, 0) P) / P."""
    if not photons > 0:
        raise ValueError(f"photon count must be positive, got {photons}")
    v = as_array(img)
    rate = np.maximum(v, 0.0) * photons
    counts = make_rng(seed).poisson(rate)
    return _like(img, counts / photons)


def _nearest(x):
    return math.floor(x + 0.5)


def make_kernel(kind, **params):
    """Build a normalized blur kernel.

    box       width, height (taps, default 1 x 1), origin at the center
    gaussian  sigma, radius (default ceil(3 sigma)), origin at the center
    motion    length, angle in degrees; taps run from the origin along the angle
    """
    if kind == "box":
        w = int(params.get("width", 1))
        h = int(params.get("height", w))
        if w < 1 or h < 1:
            raise ValueError("box kernel size must be positive")
        taps = np.full((h, w), 1.0 / (w * h))
        return BlurKernel(taps)

    if kind == "gaussian":
        sigma = float(params["sigma"])
        if not sigma > 0:
            raise ValueError("gaussian sigma must be positive")
        radius = int(params.get("radius", math.ceil(3 * sigma)))
        if radius < 0:
            raise ValueError("gaussian radius must be non-negative")
        x = np.arange(-radius, radius + 1)
        g = np.exp(-(x * x) / (2 * sigma * sigma))
        taps = np.outer(g, g)
        return BlurKernel(taps / taps.sum())

    if kind == "motion":
        length = int(params["length"])
        if length < 1:
            raise ValueError("motion length must be positive")
        theta = math.radians(float(params.get("angle", 0.0)))
        # x1 to the right (columns), x2 down (rows); samples landing on the
        # same pixel accumulate
        offsets = [(_nearest(t * math.sin(theta)), _nearest(t * math.cos(theta))) for t in range(length)]
        rows = [r for r, _ in offsets]
        cols = [c for _, c in offsets]
        r0, c0 = min(rows), min(cols)
        taps = np.zeros((max(rows) - r0 + 1, max(cols) - c0 + 1))
        for r, c in offsets:
            taps[r - r0, c - c0] += 1.0
        return BlurKernel(taps / taps.sum(), origin=(-r0, -c0))

    raise ValueError(f"unknown kernel kind {kind!r}")


def blur(img, kernel):
    return _like(img, convolve_periodic(as_array(img), kernel))


def piecewise_constant_image(N=64, M=64):
    """Deterministic RGB test card: flat background, a rectangle and a disk."""
    img = np.empty((3, N, M))
    img[:] = np.array([0.2, 0.4, 0.6])[:, None, None]
    img[:, N * 10 // 64 : N * 40 // 64, M * 15 // 64 : M * 50 // 64] = np.array([0.9, 0.3, 0.1])[:, None, None]
    rows, cols = np.mgrid[:N, :M]
    disk = (rows - N * 44 / 64) ** 2 + (cols - M * 24 / 64) ** 2 < (min(N, M) * 12 / 64) ** 2
    img[:, disk] = np.array([0.1, 0.8, 0.3])[:, None]
    return img
