"""Overlapping circular tile grid over the masked tissue.

Tile geometry is specified in micrometers and converted to pixels with the
image's pixel size, so the same physical neighborhood is sampled regardless
of scan resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyGrid
from .imaging import RasterImage, TissueMask

DEFAULT_DIAMETER_UM = 150.0
DEFAULT_STEP_UM = 100.0
DEFAULT_MIN_MASK_FRACTION = 0.5

# Guard against float drift when testing whether a circle fits in bounds.
_FIT_EPS = 1e-9


@dataclass(frozen=True)
class TileSpec:
    """Circular tile geometry: diameter, lattice step and coverage gate."""

    diameter_um: float = DEFAULT_DIAMETER_UM
    step_um: float = DEFAULT_STEP_UM
    min_mask_fraction: float = DEFAULT_MIN_MASK_FRACTION

    def __post_init__(self):
        if not self.diameter_um > 0:
            raise ValueError("diameter_um must be positive")
        if not self.step_um > 0:
            raise ValueError("step_um must be positive")
        if not 0 < self.min_mask_fraction <= 1:
            raise ValueError("min_mask_fraction must be in (0, 1]")

    def radius_px(self, pixel_size_um: float) -> float:
        return self.diameter_um / (2.0 * pixel_size_um)

    def pitch_px(self, pixel_size_um: float) -> float:
        return self.step_um / pixel_size_um


@dataclass(frozen=True)
class Tile:
    """One circular sampling region.

    ``member`` is a boolean patch anchored at ``(x0, y0)`` marking the
    in-bounds pixels within ``radius_px`` of the center that are also inside
    the tissue mask.  Membership uses center-of-pixel distance.
    """

    tile_id: int
    cx_px: int
    cy_px: int
    radius_px: float
    x0: int
    y0: int
    member: np.ndarray = field(repr=False)  # (h, w) bool patch

    @property
    def member_count(self) -> int:
        return int(self.member.sum())

    @property
    def bbox(self) -> tuple[int, int, int, int]:
        """(x0, y0, x1, y1), exclusive upper bounds."""
        h, w = self.member.shape
        return self.x0, self.y0, self.x0 + w, self.y0 + h


def _disc(cx: int, cy: int, radius: float,
          width: int, height: int) -> tuple[int, int, np.ndarray]:
    """Boolean disc patch clipped to the image bounds."""
    r_int = int(math.floor(radius))
    x0 = max(0, cx - r_int)
    y0 = max(0, cy - r_int)
    x1 = min(width, cx + r_int + 1)
    y1 = min(height, cy + r_int + 1)
    ys = np.arange(y0, y1, dtype=np.int64)
    xs = np.arange(x0, x1, dtype=np.int64)
    d2 = (ys[:, None] - cy) ** 2 + (xs[None, :] - cx) ** 2
    return x0, y0, d2 <= radius * radius


def build_grid(image: RasterImage, mask: TissueMask, spec: TileSpec) -> list[Tile]:
    """Lay the circular tile lattice and drop poorly covered tiles.

    Centers sit on a square lattice with pitch step_um/pixel_size_um px,
    starting at (radius, radius); only centers whose circle fits entirely
    inside the image are emitted.  A tile survives when its masked member
    count reaches min_mask_fraction of the full circle area.  Tile ids are
    consecutive from 0 in row-major center order.
    """
    if mask.inside.shape != (image.height_px, image.width_px):
        raise ValueError("mask does not match image dimensions")
    radius = spec.radius_px(image.pixel_size_um)
    pitch = spec.pitch_px(image.pixel_size_um)

    def centers(limit: int) -> list[int]:
        out = []
        i = 0
        while True:
            c = radius + i * pitch
            if c + radius > limit + _FIT_EPS:
                break
            out.append(int(round(c)))
            i += 1
        return out

    min_count = spec.min_mask_fraction * math.pi * radius * radius
    tiles: list[Tile] = []
    for cy in centers(image.height_px):
        for cx in centers(image.width_px):
            x0, y0, disc = _disc(cx, cy, radius, image.width_px, image.height_px)
            member = disc & mask.inside[y0:y0 + disc.shape[0], x0:x0 + disc.shape[1]]
            if member.sum() >= min_count:
                tiles.append(Tile(tile_id=len(tiles), cx_px=cx, cy_px=cy,
                                  radius_px=radius, x0=x0, y0=y0,
                                  member=member))
    if not tiles:
        raise EmptyGrid(
            f"no tile reached {spec.min_mask_fraction:.0%} mask coverage "
            f"(radius {radius:g} px on a {image.width_px}x{image.height_px} image)"
        )
    return tiles
