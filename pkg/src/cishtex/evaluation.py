"""Blind tile sampling, weighted expert-score aggregation and confusion matrices.

Evaluators grade expression strength (0-3) and pattern (0-2); per tile and
per class the grades of several evaluators are combined as an
expertise-weighted mean and rounded half away from zero.  Confusion
matrices compare the expert tile grades against the grade of the cluster
the tile belongs to.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import MissingClassScore, OutOfRangeScore, UnknownTile
from .tiling import Tile

DEFAULT_TILES_PER_CLASS = 10

STRENGTH_LEVELS = {"none": 0, "low": 1, "moderate": 2, "strong": 3}
PATTERN_LEVELS = {"none": 0, "sparse": 1, "dense": 2}


@dataclass(frozen=True)
class GradingScheme:
    """Categorical grade bounds for both axes."""

    strength_max: int = 3
    pattern_max: int = 2

    def check(self, strength: int, pattern: int) -> None:
        if not (isinstance(strength, int) and 0 <= strength <= self.strength_max):
            raise OutOfRangeScore(f"strength {strength!r} outside [0, {self.strength_max}]")
        if not (isinstance(pattern, int) and 0 <= pattern <= self.pattern_max):
            raise OutOfRangeScore(f"pattern {pattern!r} outside [0, {self.pattern_max}]")

    def to_dict(self) -> dict:
        return {"strength": dict(STRENGTH_LEVELS), "pattern": dict(PATTERN_LEVELS)}


SCHEME = GradingScheme()


@dataclass(frozen=True)
class AnnotationRecord:
    """One evaluator's scores for one tile (or one class when tile_id < 0)."""

    evaluator_id: str
    weight: float
    tile_id: int
    strength: int
    pattern: int
    class_id: int | None = None

    def __post_init__(self):
        if not self.weight > 0:
            raise ValueError("weight must be positive")
        SCHEME.check(self.strength, self.pattern)


@dataclass(frozen=True)
class TileGrade:
    """Weighted consensus for one tile."""

    tile_id: int
    strength_mean: float
    pattern_mean: float
    strength: int
    pattern: int
    n_evaluators: int
    total_weight: float


@dataclass(frozen=True)
class ClassGrade:
    """Weighted consensus characterization of one cluster."""

    class_id: int
    strength: int
    pattern: int
    strength_mean: float = 0.0
    pattern_mean: float = 0.0


@dataclass(frozen=True)
class SampledTile:
    """One manifest entry for blind grading."""

    tile_id: int
    image_path: str
    bbox: tuple[int, int, int, int]  # x0, y0, x1, y1 (exclusive)
    hidden_class: int
    order: int


@dataclass(frozen=True)
class SamplingManifest:
    """Sampled tiles plus the grading scheme, ready for the annotation UI."""

    tiles: list[SampledTile]
    scheme: GradingScheme = SCHEME
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme.to_dict(),
            "tiles": [
                {
                    "tile_id": t.tile_id,
                    "image_path": t.image_path,
                    "bbox": {"x0": t.bbox[0], "y0": t.bbox[1],
                             "x1": t.bbox[2], "y1": t.bbox[3]},
                    "hidden_class": t.hidden_class,
                    "order": t.order,
                }
                for t in self.tiles
            ],
        }


@dataclass(frozen=True)
class EvaluationReport:
    """Confusion matrices and accuracies for both grading axes."""

    strength_matrix: np.ndarray  # 4x4, expert grade x class grade
    pattern_matrix: np.ndarray   # 3x3
    strength_accuracy: float
    pattern_accuracy: float
    strength_adjacent_accuracy: float
    pattern_adjacent_accuracy: float
    tile_grades: dict[int, TileGrade]
    class_grades: dict[int, ClassGrade]
    n_tiles: int

    def to_dict(self) -> dict:
        return {
            "n_tiles": self.n_tiles,
            "strength": {
                "matrix": self.strength_matrix.tolist(),
                "accuracy": self.strength_accuracy,
                "adjacent_accuracy": self.strength_adjacent_accuracy,
            },
            "pattern": {
                "matrix": self.pattern_matrix.tolist(),
                "accuracy": self.pattern_accuracy,
                "adjacent_accuracy": self.pattern_adjacent_accuracy,
            },
            "per_tile": [
                {
                    "tile_id": g.tile_id,
                    "strength_mean": g.strength_mean,
                    "pattern_mean": g.pattern_mean,
                    "strength": g.strength,
                    "pattern": g.pattern,
                    "n_evaluators": g.n_evaluators,
                    "total_weight": g.total_weight,
                }
                for g in sorted(self.tile_grades.values(), key=lambda g: g.tile_id)
            ],
            "class_grades": [
                {
                    "class_id": g.class_id,
                    "strength": g.strength,
                    "pattern": g.pattern,
                    "strength_mean": g.strength_mean,
                    "pattern_mean": g.pattern_mean,
                }
                for g in sorted(self.class_grades.values(), key=lambda g: g.class_id)
            ],
        }


def round_half_away(x: float) -> int:
    """Round to the nearest integer, halves away from zero."""
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def sample_tiles(tiles: list[Tile], labels: np.ndarray, seed: int,
                 n_per_class: int = DEFAULT_TILES_PER_CLASS,
                 image_path_fmt: str = "tiles/tile_{tile_id:04d}.png",
                 ) -> SamplingManifest:
    """Sample up to n_per_class tiles per class, uniformly without replacement.

    Classes with fewer tiles are taken exhaustively with a warning.  The
    manifest's ``order`` field is a seeded shuffle of all sampled tiles;
    entries themselves are listed by tile_id.
    """
    if len(tiles) != len(labels):
        raise ValueError("labels must align one-to-one with tiles")
    rng = np.random.default_rng(seed)
    labels = np.asarray(labels)
    by_tile = {t.tile_id: t for t in tiles}
    notes: list[str] = []

    chosen: list[tuple[int, int]] = []  # (tile_id, class)
    for cls in sorted(int(c) for c in np.unique(labels)):
        ids = sorted(t.tile_id for t, lb in zip(tiles, labels) if int(lb) == cls)
        if len(ids) < n_per_class:
            notes.append(f"class {cls} has only {len(ids)} tiles, sampled all")
            warnings.warn(notes[-1], stacklevel=2)
            picked = ids
        else:
            picked = sorted(rng.choice(ids, size=n_per_class, replace=False).tolist())
        chosen.extend((tid, cls) for tid in picked)

    presentation = rng.permutation(len(chosen))
    entries = []
    for (tid, cls), order in zip(chosen, presentation):
        entries.append(SampledTile(
            tile_id=tid,
            image_path=image_path_fmt.format(tile_id=tid),
            bbox=by_tile[tid].bbox,
            hidden_class=cls,
            order=int(order),
        ))
    return SamplingManifest(tiles=entries, warnings=notes)


def _weighted_grades(groups: dict[int, list[AnnotationRecord]],
                     weights: dict[str, float] | None):
    """Weighted mean per key per axis, renormalized over present evaluators."""
    for key, recs in sorted(groups.items()):
        total_w = 0.0
        s_acc = 0.0
        p_acc = 0.0
        for r in recs:
            w = weights[r.evaluator_id] if weights else r.weight
            if not w > 0:
                raise ValueError(f"nonpositive weight for {r.evaluator_id}")
            total_w += w
            s_acc += w * r.strength
            p_acc += w * r.pattern
        yield key, s_acc / total_w, p_acc / total_w, len(recs), total_w


def aggregate(records: list[AnnotationRecord],
              weights: dict[str, float] | None = None,
              valid_tiles: set[int] | None = None) -> dict[int, TileGrade]:
    """Per-tile weighted consensus over all evaluators who scored the tile.

    ``weights`` overrides the per-record weights when given.  When
    ``valid_tiles`` is given, a record for any other tile raises
    UnknownTile.
    """
    groups: dict[int, list[AnnotationRecord]] = {}
    for r in records:
        if r.tile_id < 0:
            continue  # class-level rows are handled by grade_classes
        if valid_tiles is not None and r.tile_id not in valid_tiles:
            raise UnknownTile(f"tile {r.tile_id} was never sampled")
        groups.setdefault(r.tile_id, []).append(r)
    return {
        tid: TileGrade(tile_id=tid, strength_mean=sm, pattern_mean=pm,
                       strength=round_half_away(sm), pattern=round_half_away(pm),
                       n_evaluators=n, total_weight=w)
        for tid, sm, pm, n, w in _weighted_grades(groups, weights)
    }


def grade_classes(records: list[AnnotationRecord],
                  weights: dict[str, float] | None = None) -> dict[int, ClassGrade]:
    """Weighted consensus grade per class from class-level records."""
    groups: dict[int, list[AnnotationRecord]] = {}
    for r in records:
        if r.tile_id >= 0 or r.class_id is None:
            continue
        groups.setdefault(int(r.class_id), []).append(r)
    return {
        cid: ClassGrade(class_id=cid, strength=round_half_away(sm),
                        pattern=round_half_away(pm),
                        strength_mean=sm, pattern_mean=pm)
        for cid, sm, pm, _n, _w in _weighted_grades(groups, weights)
    }


def confusion(tile_grades: dict[int, TileGrade],
              class_grades: dict[int, ClassGrade],
              labels: dict[int, int]) -> EvaluationReport:
    """Expert-vs-class confusion matrices over all graded tiles.

    ``labels`` maps tile_id to its cluster; each cluster must carry a
    ClassGrade.  Rows are expert grades, columns the cluster's grade.
    Adjacent accuracy admits disagreement by one level.
    """
    s_mat = np.zeros((SCHEME.strength_max + 1, SCHEME.strength_max + 1), dtype=np.int64)
    p_mat = np.zeros((SCHEME.pattern_max + 1, SCHEME.pattern_max + 1), dtype=np.int64)
    s_adj = p_adj = 0
    n = 0
    for tid, grade in sorted(tile_grades.items()):
        if tid not in labels:
            raise UnknownTile(f"tile {tid} has no cluster label")
        cls = labels[tid]
        if cls not in class_grades:
            raise MissingClassScore(f"class {cls} has no grade")
        cg = class_grades[cls]
        s_mat[grade.strength, cg.strength] += 1
        p_mat[grade.pattern, cg.pattern] += 1
        s_adj += abs(grade.strength - cg.strength) <= 1
        p_adj += abs(grade.pattern - cg.pattern) <= 1
        n += 1
    if n == 0:
        raise ValueError("no graded tiles to compare")
    return EvaluationReport(
        strength_matrix=s_mat,
        pattern_matrix=p_mat,
        strength_accuracy=float(np.trace(s_mat)) / n,
        pattern_accuracy=float(np.trace(p_mat)) / n,
        strength_adjacent_accuracy=s_adj / n,
        pattern_adjacent_accuracy=p_adj / n,
        tile_grades=tile_grades,
        class_grades=class_grades,
        n_tiles=n,
    )
