import struct
import zlib

import cv2
import numpy as np
import pytest

from colorelastica.errors import AlphaChannelError, ImageIOError, UnreadableImageError, UnsupportedFormatError
from colorelastica.image_core import MultiChannelImage, as_array, load_image, quantize, save_image


def write_pgm(path, rows):
    rows = np.asarray(rows, dtype=np.uint8)
    header = f"P5\n{rows.shape[1]} {rows.shape[0]}\n255\n".encode()
    path.write_bytes(header + rows.tobytes())


def test_container_invariants():
    img = MultiChannelImage(np.zeros((3, 2, 5)))
    assert (img.channels, img.height, img.width) == (3, 2, 5)
    assert MultiChannelImage(np.zeros((2, 5))).shape == (1, 2, 5)
    with pytest.raises(ValueError):
        MultiChannelImage(np.array([[[np.nan]]]))
    with pytest.raises(ValueError):
        MultiChannelImage(np.zeros((3, 0, 2)))
    with pytest.raises(ValueError):
        img.data[0, 0, 0] = 1.0


def test_raster_round_trip(rng):
    r = rng.uniform(0, 1, (4, 5, 3))
    img = MultiChannelImage.from_raster(r)
    assert img.shape == (3, 4, 5)
    assert np.array_equal(img.to_raster(), r)
    assert img == MultiChannelImage.from_raster(r.copy())
    assert np.array_equal(as_array(img), img.data)


def test_pgm_dimensions_and_full_scale(tmp_path):
    path = tmp_path / "a.pgm"
    write_pgm(path, [[255, 0, 128], [1, 2, 3]])
    img = load_image(path)
    assert (img.width, img.height, img.channels) == (3, 2, 1)
    assert img.data[0, 0, 0] == 1.0
    assert img.data[0, 0, 2] == pytest.approx(128 / 255)


def test_rgb_zero_pixel_and_channel_order(tmp_path):
    raster = np.zeros((2, 2, 3), dtype=np.uint8)
    raster[0, 1] = (255, 0, 0)  # red in RGB order
    path = tmp_path / "c.png"
    cv2.imwrite(str(path), raster[:, :, ::-1])
    img = load_image(path)
    assert img.data[:, 0, 0].tolist() == [0.0, 0.0, 0.0]
    assert img.data[:, 0, 1].tolist() == [1.0, 0.0, 0.0]


def test_sixteen_bit_png(tmp_path):
    raster = np.array([[0, 65535, 32768]], dtype=np.uint16)
    path = tmp_path / "g16.png"
    cv2.imwrite(str(path), raster)
    img = load_image(path)
    assert img.data[0, 0].tolist() == [0.0, 1.0, 32768 / 65535]


def test_quantization_rule():
    vals = np.array([1.0, -0.2, 1.7, 0.5 / 255, 1.5 / 255, 0.49 / 255])
    assert quantize(vals).tolist() == [255, 0, 255, 1, 2, 0]


@pytest.mark.parametrize("ext, d", [(".png", 3), (".png", 1), (".ppm", 3), (".pgm", 1)])
def test_save_load_round_trip(tmp_path, rng, ext, d):
    lattice = rng.integers(0, 256, (d, 5, 7)) / 255.0
    path = tmp_path / f"x{ext}"
    save_image(MultiChannelImage(lattice), path)
    back = load_image(path)
    assert back.shape == lattice.shape
    assert np.array_equal(back.data, lattice)


def test_save_error_bound_and_idempotence(tmp_path, rng):
    data = rng.uniform(-0.3, 1.3, (3, 6, 6))
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    save_image(data, a)
    once = load_image(a)
    assert np.max(np.abs(once.data - np.clip(data, 0, 1))) <= 1 / 510 + 1e-15
    save_image(once, b)
    assert np.array_equal(load_image(b).data, once.data)


def minimal_png(width, height, color_type, channels):
    """8-bit PNG with all-zero samples, assembled chunk by chunk."""

    def chunk(tag, body):
        return struct.pack(">I", len(body)) + tag + body + struct.pack(">I", zlib.crc32(tag + body))

    ihdr = struct.pack(">IIBBBBB", width, height, 8, color_type, 0, 0, 0)
    raw = b"".join(b"\x00" + bytes(width * channels) for _ in range(height))
    return b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", ihdr) + chunk(b"IDAT", zlib.compress(raw)) + chunk(b"IEND", b"")


def test_alpha_rejected(tmp_path):
    path = tmp_path / "rgba.png"
    cv2.imwrite(str(path), np.zeros((3, 3, 4), dtype=np.uint8))
    with pytest.raises(AlphaChannelError):
        load_image(path)
    path = tmp_path / "gray_alpha.png"
    path.write_bytes(minimal_png(3, 2, 4, 2))
    with pytest.raises(AlphaChannelError):
        load_image(path)
    path = tmp_path / "gray.png"
    path.write_bytes(minimal_png(3, 2, 0, 1))
    assert load_image(path).shape == (1, 2, 3)


def test_distinct_error_codes(tmp_path):
    missing = tmp_path / "missing.png"
    with pytest.raises(UnreadableImageError):
        load_image(missing)
    bmp = tmp_path / "x.bmp"
    cv2.imwrite(str(bmp), np.zeros((2, 2, 3), dtype=np.uint8))
    with pytest.raises(UnsupportedFormatError):
        load_image(bmp)
    broken = tmp_path / "broken.png"
    broken.write_bytes(b"\x89PNG\r\n\x1a\n" + b"\x00" * 40)
    with pytest.raises(UnreadableImageError):
        load_image(broken)
    codes = {UnreadableImageError.code, UnsupportedFormatError.code, AlphaChannelError.code}
    assert len(codes) == 3
    assert all(issubclass(e, ImageIOError) for e in (UnreadableImageError, UnsupportedFormatError, AlphaChannelError))


def test_save_rejects_bad_targets(tmp_path):
    with pytest.raises(UnsupportedFormatError):
        save_image(np.zeros((3, 2, 2)), tmp_path / "x.pgm")
    with pytest.raises(UnsupportedFormatError):
        save_image(np.zeros((1, 2, 2)), tmp_path / "x.ppm")
    with pytest.raises(UnsupportedFormatError):
        save_image(np.zeros((2, 2, 2)), tmp_path / "x.png")
    with pytest.raises(UnsupportedFormatError):
        save_image(np.zeros((1, 2, 2)), tmp_path / "x.tif")
    with pytest.raises(ImageIOError):
        save_image(np.zeros((1, 2, 2)), tmp_path / "no" / "dir" / "x.png")
