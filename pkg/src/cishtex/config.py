"""Run configuration: JSON file + flag overrides, validation, seed derivation."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .clustering import (DEFAULT_CLUSTERS, DEFAULT_FUZZINESS, DEFAULT_MAX_ITER,
                         DEFAULT_N_INIT, DEFAULT_SWEEP_RANGE, DEFAULT_TOL)
from .errors import ConfigInvalid
from .evaluation import DEFAULT_TILES_PER_CLASS
from .imaging import DEFAULT_GRAY_LEVELS, DEFAULT_PIXEL_SIZE_UM
from .tiling import DEFAULT_DIAMETER_UM, DEFAULT_MIN_MASK_FRACTION, DEFAULT_STEP_UM

_MAX_SEED = 2 ** 64 - 1


@dataclass(frozen=True)
class RunConfig:
    """Every knob of the pipeline, mirrored 1:1 by the JSON config keys."""

    image: str | None = None
    mask: str | None = None
    pixel_size_um: float = DEFAULT_PIXEL_SIZE_UM
    tile_diameter_um: float = DEFAULT_DIAMETER_UM
    tile_step_um: float = DEFAULT_STEP_UM
    min_mask_fraction: float = DEFAULT_MIN_MASK_FRACTION
    bins: int = DEFAULT_GRAY_LEVELS
    distance: int = 1
    directions: str = "four"  # "four" or "single"
    method: str = "pca"       # "svd" or "pca"
    standardize: bool = True
    clusters: int = DEFAULT_CLUSTERS
    fuzziness: float = DEFAULT_FUZZINESS
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    n_init: int = DEFAULT_N_INIT
    sweep_min: int = DEFAULT_SWEEP_RANGE[0]
    sweep_max: int = DEFAULT_SWEEP_RANGE[1]
    n_per_class: int = DEFAULT_TILES_PER_CLASS
    seed: int = 0
    out_dir: str = "out"
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def validate(self, require_image: bool = True) -> None:
        if require_image and not self.image:
            raise ConfigInvalid("missing image path")
        if require_image and self.image and not Path(self.image).exists():
            raise ConfigInvalid(f"image does not exist: {self.image}")
        if not self.pixel_size_um > 0:
            raise ConfigInvalid("pixel_size_um must be positive")
        if not (self.tile_diameter_um > 0 and self.tile_step_um > 0):
            raise ConfigInvalid("tile diameter and step must be positive")
        if not 0 < self.min_mask_fraction <= 1:
            raise ConfigInvalid("min_mask_fraction must be in (0, 1]")
        if self.bins < 2:
            raise ConfigInvalid("bins must be >= 2")
        if self.distance < 1:
            raise ConfigInvalid("distance must be >= 1")
        if self.directions not in ("four", "single"):
            raise ConfigInvalid(f"unknown direction mode: {self.directions}")
        if self.method not in ("svd", "pca"):
            raise ConfigInvalid(f"unknown reduction method: {self.method}")
        if self.clusters < 2:
            raise ConfigInvalid("clusters must be >= 2")
        if not self.fuzziness > 1:
            raise ConfigInvalid("fuzziness must be > 1")
        if not self.tol > 0:
            raise ConfigInvalid("tol must be positive")
        if self.max_iter < 1 or self.n_init < 1:
            raise ConfigInvalid("max_iter and n_init must be >= 1")
        if self.sweep_min < 2 or self.sweep_max < self.sweep_min:
            raise ConfigInvalid(f"invalid sweep range [{self.sweep_min}, {self.sweep_max}]")
        if self.n_per_class < 1:
            raise ConfigInvalid("n_per_class must be >= 1")
        if not 0 <= self.seed <= _MAX_SEED:
            raise ConfigInvalid("seed must fit in 64 bits")

    def to_dict(self) -> dict:
        return {
            "image": self.image,
            "mask": self.mask,
            "pixel_size_um": self.pixel_size_um,
            "tile": {
                "diameter_um": self.tile_diameter_um,
                "step_um": self.tile_step_um,
                "min_mask_fraction": self.min_mask_fraction,
            },
            "bins": self.bins,
            "distance": self.distance,
            "directions": self.directions,
            "reduction": {"method": self.method, "standardize": self.standardize},
            "fcm": {
                "c": self.clusters,
                "m": self.fuzziness,
                "tol": self.tol,
                "max_iter": self.max_iter,
                "n_init": self.n_init,
            },
            "sweep": {"c_min": self.sweep_min, "c_max": self.sweep_max},
            "sampling": {"n_per_class": self.n_per_class},
            "seed": self.seed,
            "out_dir": self.out_dir,
        }


def _take(src: dict, key: str, kind, dest: dict, name: str) -> None:
    if key in src and src[key] is not None:
        try:
            dest[name] = kind(src[key])
        except (TypeError, ValueError) as exc:
            raise ConfigInvalid(f"bad value for {key!r}: {src[key]!r}") from exc


def config_from_dict(data: dict) -> RunConfig:
    """Build a RunConfig from parsed JSON (unknown keys rejected)."""
    known = {"image", "mask", "pixel_size_um", "tile", "bins", "distance",
             "directions", "reduction", "fcm", "sweep", "sampling", "seed",
             "out_dir"}
    extra = set(data) - known
    if extra:
        raise ConfigInvalid(f"unknown config keys: {sorted(extra)}")
    kw: dict = {}
    _take(data, "image", str, kw, "image")
    _take(data, "mask", str, kw, "mask")
    _take(data, "pixel_size_um", float, kw, "pixel_size_um")
    _take(data, "bins", int, kw, "bins")
    _take(data, "distance", int, kw, "distance")
    _take(data, "directions", str, kw, "directions")
    _take(data, "seed", int, kw, "seed")
    _take(data, "out_dir", str, kw, "out_dir")
    tile = data.get("tile", {})
    _take(tile, "diameter_um", float, kw, "tile_diameter_um")
    _take(tile, "step_um", float, kw, "tile_step_um")
    _take(tile, "min_mask_fraction", float, kw, "min_mask_fraction")
    red = data.get("reduction", {})
    _take(red, "method", str, kw, "method")
    _take(red, "standardize", bool, kw, "standardize")
    fcm = data.get("fcm", {})
    _take(fcm, "c", int, kw, "clusters")
    _take(fcm, "m", float, kw, "fuzziness")
    _take(fcm, "tol", float, kw, "tol")
    _take(fcm, "max_iter", int, kw, "max_iter")
    _take(fcm, "n_init", int, kw, "n_init")
    sweep = data.get("sweep", {})
    _take(sweep, "c_min", int, kw, "sweep_min")
    _take(sweep, "c_max", int, kw, "sweep_max")
    sampling = data.get("sampling", {})
    _take(sampling, "n_per_class", int, kw, "n_per_class")
    return RunConfig(**kw)


def load_config(path: str | Path) -> RunConfig:
    """Parse a JSON config file."""
    path = Path(path)
    if not path.exists():
        raise ConfigInvalid(f"config file does not exist: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigInvalid("config root must be a JSON object")
    return config_from_dict(data)


def apply_overrides(cfg: RunConfig, **overrides) -> RunConfig:
    """Apply non-None CLI overrides on top of a config."""
    changes = {k: v for k, v in overrides.items() if v is not None}
    return replace(cfg, **changes) if changes else cfg


def stage_seed(seed: int, stage: str) -> int:
    """Derive a stage's sub-seed: keyed blake2b of the stage name.

    The global seed keys the hash, so stages are decorrelated while the
    whole run stays reproducible from one value.
    """
    digest = hashlib.blake2b(stage.encode("utf-8"), digest_size=8,
                             key=int(seed).to_bytes(8, "little")).digest()
    return int.from_bytes(digest, "little")
