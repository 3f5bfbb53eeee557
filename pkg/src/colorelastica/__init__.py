"""Color elastica restoration of multi-channel images.

The model penalizes the area of the image surface in joint space-color
coordinates plus the squared Laplace-Beltrami operator of every channel,
and is minimized by a three-step operator-splitting scheme with FFT
linear solves and a pointwise Newton solve.
"""

from .config import NewtonSettings, SolverConfig
from .errors import (
    AlphaChannelError,
    ImageIOError,
    NewtonConvergenceError,
    SingularSymbolError,
    SolverError,
    UnreadableImageError,
    UnsupportedFormatError,
)
from .image_core import MultiChannelImage, load_image, save_image
from .metric import build_metric, energy
from .quality import psnr, ssim
from .spectral import BlurKernel
from .splitting import SolveResult, run, run_deblur

__all__ = [
    "AlphaChannelError",
    "BlurKernel",
    "ImageIOError",
    "MultiChannelImage",
    "NewtonConvergenceError",
    "NewtonSettings",
    "SingularSymbolError",
    "SolveResult",
    "SolverConfig",
    "SolverError",
    "UnreadableImageError",
    "UnsupportedFormatError",
    "build_metric",
    "energy",
    "load_image",
    "psnr",
    "run",
    "run_deblur",
    "save_image",
    "ssim",
]
