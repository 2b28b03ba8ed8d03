"""Shared fixtures: synthetic rasters and tiles."""

import numpy as np
import pytest
from PIL import Image

from cishtex.imaging import RasterImage
from cishtex.tiling import Tile

TRITEX_SEED = 20240611


def make_image(gray: np.ndarray, pixel_size_um: float = 0.5) -> RasterImage:
    """Wrap a 2-D uint8 array as an achromatic RGB raster."""
    rgb = np.stack([gray, gray, gray], axis=2).astype(np.uint8)
    h, w = gray.shape
    return RasterImage(width_px=w, height_px=h, pixels=rgb,
                       pixel_size_um=pixel_size_um)


def make_rgb_image(rgb: np.ndarray, pixel_size_um: float = 0.5) -> RasterImage:
    h, w = rgb.shape[:2]
    return RasterImage(width_px=w, height_px=h, pixels=rgb.astype(np.uint8),
                       pixel_size_um=pixel_size_um)


def full_tile(levels_shape: tuple[int, int], tile_id: int = 0) -> Tile:
    """A tile whose member set covers an entire small patch."""
    h, w = levels_shape
    return Tile(tile_id=tile_id, cx_px=w // 2, cy_px=h // 2,
                radius_px=float(max(h, w)), x0=0, y0=0,
                member=np.ones((h, w), dtype=bool))


def dummy_tile(tile_id: int, cx: int = 0, cy: int = 0) -> Tile:
    """Minimal 1-pixel tile for sampling/grading tests."""
    return Tile(tile_id=tile_id, cx_px=cx, cy_px=cy, radius_px=1.0,
                x0=cx, y0=cy, member=np.ones((1, 1), dtype=bool))


def checkerboard(h: int, w: int, lo: int = 0, hi: int = 255) -> np.ndarray:
    yy, xx = np.indices((h, w))
    return np.where((yy + xx) % 2 == 0, lo, hi).astype(np.uint8)


def tritex_gray(size: int = 1024, seed: int = TRITEX_SEED) -> np.ndarray:
    """Three-texture fixture: constant, checkerboard and salt-and-pepper.

    Top-left quadrant constant mid gray, top-right a 1-px checkerboard,
    bottom half seeded binary noise.  All pixels are achromatic.
    """
    half = size // 2
    rng = np.random.default_rng(seed)
    gray = np.zeros((size, size), dtype=np.uint8)
    gray[:half, :half] = 128
    gray[:half, half:] = checkerboard(half, size - half, 60, 180)
    gray[half:, :] = rng.integers(0, 2, size=(size - half, size)).astype(np.uint8) * 255
    return gray


def tritex_region(cx: int, cy: int, radius: float, size: int = 1024) -> int:
    """Region id (0/1/2) for a circle fully inside one texture, else -1."""
    half = size // 2
    if cx + radius < half and cy + radius < half:
        return 0
    if cx - radius >= half and cy + radius < half:
        return 1
    if cy - radius >= half:
        return 2
    return -1


def save_png(path, array: np.ndarray) -> None:
    if array.ndim == 2:
        Image.fromarray(array.astype(np.uint8), "L").save(path)
    else:
        Image.fromarray(array.astype(np.uint8), "RGB").save(path)


@pytest.fixture()
def gray_600() -> RasterImage:
    return make_image(np.full((600, 600), 128, dtype=np.uint8))
