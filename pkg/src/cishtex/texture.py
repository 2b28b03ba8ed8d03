"""Gray-level co-occurrence matrices and the 13-feature texture descriptor.

Per tile and channel a symmetric GLCM is accumulated over the requested
offsets (default: distance d at 0, 45, 90 and 135 degrees, pooled into one
matrix) and condensed into 13 scalar statistics.  Brightness and Saturation
descriptors concatenated give the 26-dimensional tile feature vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyGrid, NoValidPairs
from .imaging import Channel, ChannelPlane, RasterImage, TissueMask, quantize_channel
from .tiling import Tile, TileSpec, build_grid

DEFAULT_DISTANCE = 1

FEATURE_NAMES = (
    "angular_second_moment",   # F0
    "contrast",                # F1
    "correlation",             # F2
    "sum_of_squares",          # F3
    "inverse_difference_moment",  # F4
    "sum_average",             # F5
    "sum_variance",            # F6
    "sum_entropy",             # F7
    "entropy",                 # F8
    "difference_variance",     # F9
    "difference_entropy",      # F10
    "info_correlation_1",      # F11
    "info_correlation_2",      # F12
)
N_FEATURES = len(FEATURE_NAMES)


def default_directions(d: int) -> tuple[tuple[int, int], ...]:
    """Offsets at 0, 45, 90 and 135 degrees for pixel distance d."""
    return ((d, 0), (d, d), (0, d), (-d, d))


@dataclass(frozen=True)
class Glcm:
    """Normalized symmetric co-occurrence matrix for one tile and channel."""

    gray_levels: int
    p: np.ndarray = field(repr=False)  # (G, G) float64, sums to 1
    distance: int = DEFAULT_DISTANCE
    directions: tuple[tuple[int, int], ...] = ()


def compute_glcm(plane: ChannelPlane, tile: Tile, d: int = DEFAULT_DISTANCE,
                 directions: tuple[tuple[int, int], ...] | None = None) -> Glcm:
    """Accumulate the symmetric GLCM of one tile over the given offsets.

    For each offset (dx, dy), every pixel pair whose endpoints both belong
    to the tile's member set adds one count at (level_a, level_b) and one at
    (level_b, level_a); the pooled matrix is normalized by its total.

    Raises NoValidPairs when not a single pair exists in any direction
    (the tile is too fragmented to measure).
    """
    if d < 1:
        raise ValueError("distance must be >= 1")
    if directions is None:
        directions = default_directions(d)
    if not directions:
        raise ValueError("at least one direction is required")

    g = plane.gray_levels
    member = tile.member
    h, w = member.shape
    patch = plane.levels[tile.y0:tile.y0 + h, tile.x0:tile.x0 + w].astype(np.int64)

    counts = np.zeros(g * g, dtype=np.int64)
    for dx, dy in directions:
        ys0, ys1 = max(0, -dy), min(h, h - dy)
        xs0, xs1 = max(0, -dx), min(w, w - dx)
        if ys0 >= ys1 or xs0 >= xs1:
            continue
        src = member[ys0:ys1, xs0:xs1]
        dst = member[ys0 + dy:ys1 + dy, xs0 + dx:xs1 + dx]
        valid = src & dst
        if not valid.any():
            continue
        a = patch[ys0:ys1, xs0:xs1][valid]
        b = patch[ys0 + dy:ys1 + dy, xs0 + dx:xs1 + dx][valid]
        counts += np.bincount(a * g + b, minlength=g * g)

    mat = counts.reshape(g, g)
    mat = mat + mat.T  # symmetric accumulation, integer-exact
    total = int(mat.sum())
    if total == 0:
        raise NoValidPairs(
            f"tile {tile.tile_id} has no co-occurring pixel pair at distance {d}"
        )
    return Glcm(gray_levels=g, p=mat / float(total), distance=d,
                directions=tuple(directions))


def _entropy(q: np.ndarray) -> float:
    """Natural-log entropy with the 0*ln(0) = 0 convention."""
    nz = q[q > 0]
    return float(-(nz * np.log(nz)).sum()) + 0.0  # avoid -0.0


def haralick_features(glcm: Glcm) -> np.ndarray:
    """The 13 texture statistics of a normalized GLCM, ordered F0..F12.

    Conventions for degenerate matrices: correlation is 0 when the marginal
    variance vanishes, the first information measure is 0 when both marginal
    entropies are 0, and the second information measure clamps its exponent
    argument at 0 before the square root.  Sum variance is taken around the
    sum average.
    """
    p = glcm.p
    g = glcm.gray_levels
    i = np.arange(g, dtype=np.float64)

    px = p.sum(axis=1)
    py = p.sum(axis=0)
    mu = float((i * px).sum())
    var = float(((i - mu) ** 2 * px).sum())

    idx = np.arange(g)
    sum_idx = (idx[:, None] + idx[None, :]).ravel()
    diff_idx = np.abs(idx[:, None] - idx[None, :]).ravel()
    p_sum = np.bincount(sum_idx, weights=p.ravel(), minlength=2 * g - 1)
    p_diff = np.bincount(diff_idx, weights=p.ravel(), minlength=g)
    k_sum = np.arange(2 * g - 1, dtype=np.float64)
    k_diff = np.arange(g, dtype=np.float64)

    f = np.empty(N_FEATURES, dtype=np.float64)
    f[0] = float((p * p).sum())
    f[1] = float((k_diff ** 2 * p_diff).sum())

    ij_mean = float((i[:, None] * i[None, :] * p).sum())
    f[2] = (ij_mean - mu * mu) / var if var > 0 else 0.0

    f[3] = float((((i[:, None] - mu) ** 2) * p).sum())

    weights = 1.0 / (1.0 + (i[:, None] - i[None, :]) ** 2)
    f[4] = float((weights * p).sum())

    f[5] = float((k_sum * p_sum).sum())
    f[6] = float(((k_sum - f[5]) ** 2 * p_sum).sum())
    f[7] = _entropy(p_sum)
    f[8] = _entropy(p.ravel())

    diff_mean = float((k_diff * p_diff).sum())
    f[9] = float(((k_diff - diff_mean) ** 2 * p_diff).sum())
    f[10] = _entropy(p_diff)

    hx = _entropy(px)
    hy = _entropy(py)
    pp = px[:, None] * py[None, :]
    nz = pp > 0
    log_pp = np.log(pp[nz])
    hxy1 = float(-(p[nz] * log_pp).sum())
    hxy2 = float(-(pp[nz] * log_pp).sum())
    denom = max(hx, hy)
    f[11] = (f[8] - hxy1) / denom if denom > 0 else 0.0
    f[12] = float(np.sqrt(1.0 - np.exp(-2.0 * max(hxy2 - f[8], 0.0))))
    return f


@dataclass(frozen=True)
class FeatureVector:
    """26 texture values for one tile: F0..F12 on B, then F0..F12 on S."""

    tile_id: int
    values: np.ndarray  # (26,) float64

    def __post_init__(self):
        if self.values.shape != (2 * N_FEATURES,):
            raise ValueError(f"expected {2 * N_FEATURES} values")
        if not np.isfinite(self.values).all():
            raise ValueError(f"non-finite feature for tile {self.tile_id}")


@dataclass(frozen=True)
class ExtractResult:
    """Feature vectors plus the tiles that produced them.

    ``tiles`` aligns one-to-one with ``vectors``; tiles without a single
    valid pixel pair are dropped and listed in ``skipped_tile_ids``.
    """

    vectors: list[FeatureVector]
    tiles: list[Tile]
    skipped_tile_ids: list[int]


def feature_columns() -> list[str]:
    """Column names in feature-vector order: F*_B then F*_S."""
    return [f"F{k}_B" for k in range(N_FEATURES)] + \
           [f"F{k}_S" for k in range(N_FEATURES)]


def extract_features(image: RasterImage, mask: TissueMask, spec: TileSpec,
                     gray_levels: int, d: int = DEFAULT_DISTANCE,
                     directions: tuple[tuple[int, int], ...] | None = None,
                     ) -> ExtractResult:
    """Tile the masked image and compute the 26-value descriptor per tile."""
    tiles = build_grid(image, mask, spec)
    planes = {
        Channel.BRIGHTNESS: quantize_channel(image, Channel.BRIGHTNESS, gray_levels),
        Channel.SATURATION: quantize_channel(image, Channel.SATURATION, gray_levels),
    }
    vectors: list[FeatureVector] = []
    kept: list[Tile] = []
    skipped: list[int] = []
    for tile in tiles:
        try:
            per_channel = [
                haralick_features(compute_glcm(planes[ch], tile, d, directions))
                for ch in (Channel.BRIGHTNESS, Channel.SATURATION)
            ]
        except NoValidPairs:
            skipped.append(tile.tile_id)
            continue
        vectors.append(FeatureVector(tile_id=tile.tile_id,
                                     values=np.concatenate(per_channel)))
        kept.append(tile)
    if not vectors:
        raise EmptyGrid("every tile was skipped: no co-occurring pairs anywhere")
    return ExtractResult(vectors=vectors, tiles=kept, skipped_tile_ids=skipped)
