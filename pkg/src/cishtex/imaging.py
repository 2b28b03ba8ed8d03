"""Raster loading, HSB conversion, gray-level quantization and tissue masks.

All measurement downstream happens on the Brightness and Saturation planes
of the hexcone HSB model (B = max(r,g,b)/255), quantized to G gray levels.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DimensionMismatch, InvalidBinCount, UnreadableFile, UnsupportedBitDepth

DEFAULT_PIXEL_SIZE_UM = 0.5
DEFAULT_GRAY_LEVELS = 127

# Pillow modes whose samples are wider than 8 bits.
_DEEP_MODES = ("I;16", "I;16B", "I;16L", "I;16N", "I", "F", "RGB;16", "RGBA;16")


class Channel(enum.Enum):
    """HSB channel measured for texture."""

    BRIGHTNESS = "brightness"
    SATURATION = "saturation"


@dataclass(frozen=True)
class RasterImage:
    """Flat 8-bit RGB raster with its physical pixel size."""

    width_px: int
    height_px: int
    pixels: np.ndarray  # (height, width, 3) uint8, row-major
    pixel_size_um: float = DEFAULT_PIXEL_SIZE_UM

    def __post_init__(self):
        if self.pixels.shape != (self.height_px, self.width_px, 3):
            raise ValueError(
                f"pixel buffer shape {self.pixels.shape} does not match "
                f"{self.height_px}x{self.width_px}x3"
            )
        if self.pixels.dtype != np.uint8:
            raise ValueError("pixels must be 8-bit per channel")
        if not self.pixel_size_um > 0:
            raise ValueError("pixel_size_um must be positive")

    @property
    def width_um(self) -> float:
        return self.width_px * self.pixel_size_um

    @property
    def height_um(self) -> float:
        return self.height_px * self.pixel_size_um


@dataclass(frozen=True)
class TissueMask:
    """Boolean per-pixel tissue selection, same dimensions as the image."""

    width_px: int
    height_px: int
    inside: np.ndarray  # (height, width) bool

    def __post_init__(self):
        if self.inside.shape != (self.height_px, self.width_px):
            raise ValueError("mask buffer shape mismatch")

    @property
    def inside_count(self) -> int:
        return int(self.inside.sum())


@dataclass(frozen=True)
class ChannelPlane:
    """One HSB channel quantized to integer levels in [0, gray_levels-1]."""

    channel: Channel
    levels: np.ndarray  # (height, width) unsigned integer
    gray_levels: int

    def __post_init__(self):
        if self.gray_levels < 2:
            raise InvalidBinCount(f"gray_levels must be >= 2, got {self.gray_levels}")
        if self.levels.size and int(self.levels.max()) >= self.gray_levels:
            raise ValueError("level exceeds gray_levels - 1")


def load_image(path: str | Path, pixel_size_um: float = DEFAULT_PIXEL_SIZE_UM) -> RasterImage:
    """Load a PNG or uncompressed TIFF as an 8-bit RGB raster.

    Alpha is discarded. Rasters with channels deeper than 8 bits are
    rejected rather than silently rescaled.
    """
    path = Path(path)
    if not path.exists():
        raise UnreadableFile(f"no such file: {path}")
    try:
        with Image.open(path) as im:
            if im.mode in _DEEP_MODES:
                raise UnsupportedBitDepth(
                    f"{path.name}: mode {im.mode} is not 8-bit per channel"
                )
            rgb = im.convert("RGB")
            arr = np.asarray(rgb, dtype=np.uint8)
    except UnidentifiedImageError as exc:
        raise UnreadableFile(f"cannot decode {path}") from exc
    except OSError as exc:
        raise UnreadableFile(f"cannot read {path}: {exc}") from exc
    height, width = arr.shape[:2]
    return RasterImage(width_px=width, height_px=height, pixels=arr,
                       pixel_size_um=pixel_size_um)


def load_mask(path: str | Path | None, image: RasterImage) -> TissueMask:
    """Load a binary tissue mask (nonzero = tissue).

    With no path every pixel is marked inside, which reproduces a run
    without any tissue selection.
    """
    if path is None:
        return full_mask(image)
    path = Path(path)
    if not path.exists():
        raise UnreadableFile(f"no such file: {path}")
    try:
        with Image.open(path) as im:
            arr = np.asarray(im)
    except UnidentifiedImageError as exc:
        raise UnreadableFile(f"cannot decode {path}") from exc
    except OSError as exc:
        raise UnreadableFile(f"cannot read {path}: {exc}") from exc
    if arr.ndim == 3:
        inside = arr.any(axis=2)
    else:
        inside = arr != 0
    if inside.shape != (image.height_px, image.width_px):
        raise DimensionMismatch(
            f"mask is {inside.shape[1]}x{inside.shape[0]}, "
            f"image is {image.width_px}x{image.height_px}"
        )
    return TissueMask(width_px=image.width_px, height_px=image.height_px,
                      inside=np.ascontiguousarray(inside))


def full_mask(image: RasterImage) -> TissueMask:
    """Mask marking every pixel as tissue."""
    inside = np.ones((image.height_px, image.width_px), dtype=bool)
    return TissueMask(width_px=image.width_px, height_px=image.height_px, inside=inside)


def rgb_to_hsb(r: int, g: int, b: int) -> tuple[float, float, float]:
    """Hexcone HSB of one 8-bit RGB triple.

    Returns (hue degrees in [0, 360), saturation in [0, 1], brightness
    in [0, 1]). Achromatic pixels get hue 0.
    """
    mx = max(r, g, b)
    mn = min(r, g, b)
    v = mx / 255.0
    if mx == 0:
        return 0.0, 0.0, 0.0
    s = (mx - mn) / mx
    if mx == mn:
        h = 0.0
    elif mx == r:
        h = (60.0 * (g - b) / (mx - mn)) % 360.0
    elif mx == g:
        h = 60.0 * ((b - r) / (mx - mn) + 2.0)
    else:
        h = 60.0 * ((r - g) / (mx - mn) + 4.0)
    return h, s, v


def hsb_to_rgb(h: float, s: float, v: float) -> tuple[int, int, int]:
    """Inverse hexcone conversion back to an 8-bit RGB triple."""
    c = v * s
    hp = (h % 360.0) / 60.0
    x = c * (1.0 - abs(hp % 2.0 - 1.0))
    if hp < 1:
        r1, g1, b1 = c, x, 0.0
    elif hp < 2:
        r1, g1, b1 = x, c, 0.0
    elif hp < 3:
        r1, g1, b1 = 0.0, c, x
    elif hp < 4:
        r1, g1, b1 = 0.0, x, c
    elif hp < 5:
        r1, g1, b1 = x, 0.0, c
    else:
        r1, g1, b1 = c, 0.0, x
    m = v - c
    return (
        int(round((r1 + m) * 255.0)),
        int(round((g1 + m) * 255.0)),
        int(round((b1 + m) * 255.0)),
    )


def channel_values(image: RasterImage, channel: Channel) -> np.ndarray:
    """Per-pixel value of the chosen HSB channel, as float64 in [0, 1]."""
    rgb = image.pixels.astype(np.float64)
    mx = rgb.max(axis=2)
    if channel is Channel.BRIGHTNESS:
        return mx / 255.0
    mn = rgb.min(axis=2)
    out = np.zeros_like(mx)
    np.divide(mx - mn, mx, out=out, where=mx > 0)
    return out


def quantize_channel(image: RasterImage, channel: Channel,
                     gray_levels: int = DEFAULT_GRAY_LEVELS) -> ChannelPlane:
    """Quantize one HSB channel into gray_levels integer bins.

    level = min(floor(value * G), G - 1), so the bins partition [0, 1]
    evenly and value 1.0 lands in the top bin.
    """
    if gray_levels < 2:
        raise InvalidBinCount(f"gray_levels must be >= 2, got {gray_levels}")
    values = channel_values(image, channel)
    levels = np.floor(values * gray_levels).astype(np.int64)
    np.minimum(levels, gray_levels - 1, out=levels)
    dtype = np.uint8 if gray_levels <= 256 else np.uint16
    return ChannelPlane(channel=channel, levels=levels.astype(dtype),
                        gray_levels=gray_levels)
