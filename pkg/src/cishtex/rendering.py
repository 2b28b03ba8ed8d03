"""Class color maps over the original image plus FPC-curve export.

Overlapping tiles are resolved per pixel by nearest tile center (a Voronoi
rule restricted to covered pixels); uncovered pixels keep the original
content dimmed to 40% brightness.
"""

from __future__ import annotations

import io

import numpy as np
from PIL import Image, ImageDraw

from .clustering import SweepEntry
from .imaging import RasterImage
from .tiling import Tile

# Fixed 10-entry palette; canonical class k always renders in PALETTE[k].
PALETTE: tuple[tuple[int, int, int], ...] = (
    (31, 119, 180),
    (255, 127, 14),
    (44, 160, 44),
    (214, 39, 40),
    (148, 103, 189),
    (140, 86, 75),
    (227, 119, 194),
    (127, 127, 127),
    (188, 189, 34),
    (23, 190, 207),
)

BACKGROUND_DIM = 0.4
LEGEND_SWATCH_PX = 48


def render_class_map(image: RasterImage, tiles: list[Tile], labels: np.ndarray,
                     palette: tuple[tuple[int, int, int], ...] = PALETTE) -> np.ndarray:
    """Paint each covered pixel in the color of its nearest tile's class.

    ``labels`` aligns with ``tiles``.  Distance ties go to the lower
    tile_id.  Returns an (H, W, 3) uint8 array the size of the input.
    """
    if len(tiles) != len(labels):
        raise ValueError("labels must align one-to-one with tiles")
    if len(labels) and int(np.max(labels)) >= len(palette):
        raise ValueError(f"palette has {len(palette)} colors, "
                         f"label {int(np.max(labels))} requested")

    h, w = image.height_px, image.width_px
    best_d2 = np.full((h, w), np.inf)
    best_label = np.full((h, w), -1, dtype=np.int32)
    # Ascending tile_id plus strict < keeps the lower id on exact ties.
    for tile, label in sorted(zip(tiles, labels), key=lambda t: t[0].tile_id):
        ph, pw = tile.member.shape
        ys = np.arange(tile.y0, tile.y0 + ph)
        xs = np.arange(tile.x0, tile.x0 + pw)
        d2 = ((ys[:, None] - tile.cy_px) ** 2
              + (xs[None, :] - tile.cx_px) ** 2).astype(np.float64)
        view_d2 = best_d2[tile.y0:tile.y0 + ph, tile.x0:tile.x0 + pw]
        view_lb = best_label[tile.y0:tile.y0 + ph, tile.x0:tile.x0 + pw]
        take = tile.member & (d2 < view_d2)
        view_d2[take] = d2[take]
        view_lb[take] = int(label)

    out = np.round(image.pixels.astype(np.float64) * BACKGROUND_DIM).astype(np.uint8)
    covered = best_label >= 0
    colors = np.asarray(palette, dtype=np.uint8)
    out[covered] = colors[best_label[covered]]
    return out


def render_legend(n_classes: int,
                  palette: tuple[tuple[int, int, int], ...] = PALETTE) -> np.ndarray:
    """Horizontal strip of numbered class swatches."""
    if n_classes < 1 or n_classes > len(palette):
        raise ValueError(f"n_classes must be in [1, {len(palette)}]")
    s = LEGEND_SWATCH_PX
    im = Image.new("RGB", (n_classes * s, s), (255, 255, 255))
    draw = ImageDraw.Draw(im)
    for k in range(n_classes):
        draw.rectangle([k * s, 0, (k + 1) * s - 1, s - 1], fill=palette[k])
        r, g, b = palette[k]
        text_color = (0, 0, 0) if (r + g + b) > 382 else (255, 255, 255)
        draw.text((k * s + 4, 4), str(k), fill=text_color)
    return np.asarray(im, dtype=np.uint8)


def render_fpc_curve(sweep: list[SweepEntry]) -> str:
    """Two-column CSV text (c, fpc) sorted ascending by c."""
    if not sweep:
        raise ValueError("sweep results are empty")
    lines = ["c,fpc"]
    for entry in sorted(sweep, key=lambda e: e.c):
        lines.append(f"{entry.c},{entry.fpc:.17g}")
    return "\n".join(lines) + "\n"


def encode_png(rgb: np.ndarray) -> bytes:
    """Deterministic PNG bytes for an (H, W, 3) uint8 array."""
    buf = io.BytesIO()
    Image.fromarray(rgb, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()
