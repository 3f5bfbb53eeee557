"""Multi-channel image container and raster file I/O.

Images are held as float64 arrays of shape ``(d, N, M)``: d channels,
N rows (the x2 direction, image height) and M columns (x1, image width).
Integer samples map to reals by ``value / (2**bits - 1)``.
"""

from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np

from .errors import AlphaChannelError, ImageIOError, UnreadableImageError, UnsupportedFormatError

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"
# IHDR color types carrying an alpha channel
_PNG_ALPHA_TYPES = {4, 6}


@dataclass(frozen=True, eq=False)
class MultiChannelImage:
    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64)
        if data.ndim == 2:
            data = data[np.newaxis]
        if data.ndim != 3 or min(data.shape) < 1:
            raise ValueError(f"image data must have shape (d, N, M) with d, N, M >= 1, got {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ValueError("image data contains non-finite values")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def channels(self):
        return self.data.shape[0]

    @property
    def height(self):
        """N, the pixel count along x2."""
        return self.data.shape[1]

    @property
    def width(self):
        """M, the pixel count along x1."""
        return self.data.shape[2]

    @property
    def shape(self):
        return self.data.shape

    def __eq__(self, other):
        if not isinstance(other, MultiChannelImage):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def __repr__(self):
        return f"MultiChannelImage(d={self.channels}, M={self.width}, N={self.height})"

    @classmethod
    def from_raster(cls, raster):
        """Build from a ``(rows, cols)`` or ``(rows, cols, channels)`` array in [0, 1]."""
        raster = np.asarray(raster, dtype=np.float64)
        if raster.ndim == 2:
            raster = raster[:, :, np.newaxis]
        return cls(np.moveaxis(raster, -1, 0))

    def to_raster(self):
        """Channels-last view, ``(rows, cols, channels)``."""
        return np.moveaxis(self.data, 0, -1)


def as_array(img):
    """Return the ``(d, N, M)`` float array behind an image or array-like."""
    if isinstance(img, MultiChannelImage):
        return img.data
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[np.newaxis]
    if arr.ndim != 3:
        raise ValueError(f"expected a (d, N, M) array, got shape {arr.shape}")
    return arr


def _sniff(raw, path):
    if raw.startswith(_PNG_MAGIC):
        if len(raw) < 26:
            raise UnreadableImageError(f"{path}: truncated PNG header")
        if raw[25] in _PNG_ALPHA_TYPES:
            raise AlphaChannelError(f"{path}: PNG has an alpha channel")
        return "png"
    if raw[:2] in (b"P5", b"P6"):
        return "pnm"
    raise UnsupportedFormatError(f"{path}: not a PNG or binary PGM/PPM file")


def load_image(path):
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise UnreadableImageError(f"{path}: {exc.strerror or exc}") from exc
    _sniff(raw, path)

    arr = cv2.imdecode(np.frombuffer(raw, dtype=np.uint8), cv2.IMREAD_UNCHANGED)
    if arr is None:
        raise UnreadableImageError(f"{path}: could not decode image data")
    if arr.dtype == np.uint8:
        scale = 255.0
    elif arr.dtype == np.uint16:
        scale = 65535.0
    else:
        raise UnsupportedFormatError(f"{path}: unsupported sample type {arr.dtype}")

    if arr.ndim == 3:
        if arr.shape[2] in (2, 4):
            raise AlphaChannelError(f"{path}: image has an alpha channel")
        arr = arr[:, :, ::-1]  # BGR -> RGB
    return MultiChannelImage.from_raster(arr.astype(np.float64) / scale)


def quantize(data):
    """Clamp to [0, 1] and round half away from zero onto the 8-bit lattice."""
    scaled = np.clip(np.asarray(data, dtype=np.float64), 0.0, 1.0) * 255.0
    return np.floor(scaled + 0.5).astype(np.uint8)


def save_image(img, path):
    """Write an 8-bit PNG, PGM or PPM chosen by file extension."""
    path = Path(path)
    data = as_array(img)
    d = data.shape[0]
    if d not in (1, 3):
        raise UnsupportedFormatError(f"cannot store {d} channels; only gray or RGB images are supported")

    ext = path.suffix.lower()
    if ext == ".pgm" and d != 1:
        raise UnsupportedFormatError(f"{path}: PGM holds one channel, image has {d}")
    if ext == ".ppm" and d != 3:
        raise UnsupportedFormatError(f"{path}: PPM holds three channels, image has {d}")
    if ext not in (".png", ".pgm", ".ppm"):
        raise UnsupportedFormatError(f"{path}: unknown extension {ext!r}")

    raster = quantize(np.moveaxis(data, 0, -1))
    if d == 3:
        raster = np.ascontiguousarray(raster[:, :, ::-1])
    else:
        raster = raster[:, :, 0]
    ok, buf = cv2.imencode(ext, raster)
    if not ok:
        raise ImageIOError(f"{path}: encoding failed")
    try:
        path.write_bytes(buf.tobytes())
    except OSError as exc:
        raise ImageIOError(f"{path}: {exc.strerror or exc}") from exc
